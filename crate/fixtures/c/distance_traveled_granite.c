#include <assert.h>

int distanceTraveled(int mainTank, int additionalTank){
    int res = 0;
    while (mainTank) {
        if (mainTank < 5) {
            res += 5 * 10;
            mainTank -= 5;
            if (additionalTank) {
                additionalTank -= 1;
                mainTank += 1;
            }
        } else {
            res += mainTank * 10;
            mainTank = 0;
        }
    }
    return res;
}

int main() {
    assert(distanceTraveled(1, 2) == 10);
    return 0;
}
