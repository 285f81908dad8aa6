int digitSum(int n) {
    int s = 0;
    while (n > 0) {
        s += n % 10;
        n = n / 100; // FAULT
    }
    return s;
}

int main() {
    assert(digitSum(123) == 6);
    return 0;
}
