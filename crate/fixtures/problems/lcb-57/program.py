def distanceTraveled(a: int, b: int) -> int:
    res = 0
    while a:
        if a < 5:
            res += 5 * 10
            a -= 5
            if b:
                b -= 1
                a += 1
        else:
            res += a * 10
            a = 0
    return res

assert distanceTraveled(a = 1, b = 2) == 10
