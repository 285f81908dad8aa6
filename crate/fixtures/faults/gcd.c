int gcd(int a, int b) {
    while (b != 0) {
        int t = a / b; // FAULT
        a = b;
        b = t;
    }
    return a;
}

int main() {
    assert(gcd(12, 18) == 6);
    return 0;
}
