int maxOf(int a, int b, int c) {
    int m = a;
    if (b > m) m = b;
    if (c < m) m = c; // FAULT
    return m;
}

int main() {
    assert(maxOf(1, 5, 3) == 5);
    return 0;
}
