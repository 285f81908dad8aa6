int parity(int n) {
    int p = 0;
    while (n > 0) {
        p = p ^ (n & 1);
        n = n >> 2; // FAULT
    }
    return p;
}

int main() {
    assert(parity(7) == 1);
    return 0;
}
