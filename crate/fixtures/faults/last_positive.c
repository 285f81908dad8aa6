int lastPositive(int a, int b, int c) {
    int r = -1;
    if (a > 0) r = 0;
    if (b > 0) r = 1;
    if (c >= 0) r = 2; // FAULT
    return r;
}

int main() {
    assert(lastPositive(3, 4, 0) == 1);
    return 0;
}
