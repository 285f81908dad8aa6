int steps(int n) {
    int k = 0;
    while (n > 1) {
        n -= 3; // FAULT
        k++;
    }
    return k;
}

int main() {
    assert(steps(5) == 4);
    return 0;
}
