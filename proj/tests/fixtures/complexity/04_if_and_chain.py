if a and b and c:
    go()
