seen = 0


def bump(values):
    global seen
    if (n := len(values)) > 0:
        seen += n
    return n + offset
