def read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as err:
        return str(err)
