class Solution:
    def f(self, xs):
        return frobnicate(xs) + len(xs)
