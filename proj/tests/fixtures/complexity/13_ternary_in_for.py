def clamp_all(xs):
    out = []
    for x in xs:
        out.append(x if x < 10 else 10)
    return out
