from math import *


def hyp(a, b):
    return sqrt(a * a + b * b) + inf
