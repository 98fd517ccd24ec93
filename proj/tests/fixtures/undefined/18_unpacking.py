def split(pairs):
    first, *rest = pairs
    (a, b), c = rest[0], rest[1]
    del c
    return first, a, b, accumulate(rest)
