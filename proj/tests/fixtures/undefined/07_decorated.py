class Solution:
    def climbStairs(self, n: int) -> int:
        @lru_cache(maxsize=None)
        def ways(i):
            return 1 if i <= 1 else ways(i - 1) + ways(i - 2)

        return ways(n)
