def scan(xs):
    for x in xs:
        if x:
            if x > 3:
                print(x)
