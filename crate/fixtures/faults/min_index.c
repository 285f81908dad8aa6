int minIndex(int a, int b, int c) {
    int idx = 0;
    int best = a;
    if (b < best) { best = b; idx = 1; }
    if (c < best) { best = c; idx = 1; } // FAULT
    return idx;
}

int main() {
    assert(minIndex(4, 3, 1) == 2);
    return 0;
}
