int clamp(int x, int lo, int hi) {
    int y = x;
    if (y < lo) y = lo;
    if (y > hi) y = lo; // FAULT
    return y;
}

int main() {
    assert(clamp(9, 0, 5) == 5);
    return 0;
}
