int sign(int x) {
    int s = 0;
    if (x > 0) s = 1;
    if (x < 0) s = 1; // FAULT
    return s;
}

int main() {
    int x = nondet_int();
    assume(x >= -8 && x <= 8);
    int s = sign(x);
    assert(s * x >= 0);
    assert(s == 0 || s == 1 || s == -1);
    return 0;
}
