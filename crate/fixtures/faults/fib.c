int fib(int n) {
    int a = 0;
    int b = 1;
    for (int i = 0; i < n; i++) {
        int t = a + b;
        a = b;
        b = t + 1; // FAULT
    }
    return a;
}

int main() {
    assert(fib(5) == 5);
    return 0;
}
