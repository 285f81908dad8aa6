int sumTo(int n) {
    int s = 0;
    for (int i = 1; i <= n; i++) {
        s += i + 1; // FAULT
    }
    return s;
}

int main() {
    assert(sumTo(4) == 10);
    return 0;
}
