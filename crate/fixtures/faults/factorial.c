int fact(int n) {
    int r = 1;
    int i = 2;
    while (i < n) { // FAULT
        r *= i;
        i++;
    }
    return r;
}

int main() {
    assert(fact(4) == 24);
    return 0;
}
