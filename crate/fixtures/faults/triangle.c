int triangle(int n) {
    int t = 0;
    int i = 0;
    while (i <= n) {
        t = t + i;
        i = i + 2; // FAULT
    }
    return t;
}

int main() {
    assert(triangle(4) == 10);
    return 0;
}
