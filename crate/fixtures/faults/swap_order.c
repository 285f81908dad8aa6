int main() {
    int a = nondet_int();
    int b = nondet_int();
    assume(a >= 0 && a < 10);
    assume(b >= 0 && b < 10);
    int lo = a;
    int hi = b;
    if (lo > hi) {
        int t = lo;
        lo = hi;
        hi = lo; // FAULT
    }
    assert(lo <= hi);
    assert(lo + hi == a + b);
    return 0;
}
