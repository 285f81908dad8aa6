int main() {
    int x = nondet_int();
    assume(x >= 0 && x < 16);
    int y = x + x;
    int z = y - x + 1; // FAULT
    assert(z == x);
    return 0;
}
