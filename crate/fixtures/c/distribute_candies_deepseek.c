#include <assert.h>
#include <stdio.h>

int distributeCandies(int n, int limit) {
    limit = (limit < n) ? limit : n;
    int ans = 0;
    for (int i = 0; i <= limit; i++) {
        if (n - i > limit * 2) {
            continue;
        }
        ans += (limit < n - i) ? limit : 
            n - i - max(0, n - i - limit) + 1;
    }
    return ans;
}

int main() {
    assert(distributeCandies(5, 2) == 3);
    return 0;
}
