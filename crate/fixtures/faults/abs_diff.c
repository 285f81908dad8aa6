int absDiff(int a, int b) {
    int d = a - b;
    if (d > 0) { // FAULT
        d = -d;
    }
    return d;
}

int main() {
    assert(absDiff(2, 7) == 5);
    return 0;
}
