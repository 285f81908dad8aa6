int countEven(int n) {
    int c = 0;
    for (int i = 0; i < n; i++) {
        if (i % 2 == 1) { // FAULT
            c++;
        }
    }
    return c;
}

int main() {
    assert(countEven(5) == 3);
    return 0;
}
