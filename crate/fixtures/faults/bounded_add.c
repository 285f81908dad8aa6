int main() {
    int a = nondet_int();
    int b = nondet_int();
    assume(a >= 0 && a < 8);
    assume(b >= 0 && b < 8);
    int s = a + b;
    int cap = 12;
    if (s >= cap) s = cap;
    s = s + 1; // FAULT
    assert(s <= cap);
    return 0;
}
