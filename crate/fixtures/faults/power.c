int power(int b, int e) {
    int r = 1;
    for (int i = 0; i < e; i++) {
        r = r * b;
    }
    r = r + 1; // FAULT
    return r;
}

int main() {
    assert(power(2, 3) == 8);
    return 0;
}
