int isLeap(int y) {
    int leap = 0;
    if (y % 4 == 0) leap = 1;
    if (y % 100 == 0) leap = 1; // FAULT
    if (y % 400 == 0) leap = 1;
    return leap;
}

int main() {
    assert(isLeap(1900) == 0);
    return 0;
}
