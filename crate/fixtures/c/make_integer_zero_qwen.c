#include <stdio.h>
#include <assert.h>

int makeTheIntegerZero(int num1, int num2) {
    int a = 0;
    int x = num1;
    int y = num2;
    
    while (x < y) {
        x -= y;
        a += 1;
        int b = x;
        int c = 0;
        int cc = 0;
        int z = 1;
        
        while (b) {
            c += (b % 2 == 1);
            cc += (b % 2 == 1) * z;
            z *= 2;
            b /= 2;
        }
        
        if (c <= a && cc >= a) {
            return a;
        }
    }
    return -1;
}

int main() {
    assert(makeTheIntegerZero(5, 7) == -1);
    printf("All assertions passed.\n");
    return 0;
}
