int countA(const char s[], int n) {
    int c = 0;
    for (int i = 0; i < n; i++) {
        if (s[i] == 'b') c++; // FAULT
    }
    return c;
}

int main() {
    assert(countA("abca", 4) == 2);
    return 0;
}
