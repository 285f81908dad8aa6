int avg(int a, int b) {
    int s = a + b;
    int r = s / 3; // FAULT
    return r;
}

int main() {
    assert(avg(4, 8) == 6);
    return 0;
}
