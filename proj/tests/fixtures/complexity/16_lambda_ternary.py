def sorter(xs):
    return sorted(xs, key=lambda v: v if v > 0 else -v)
