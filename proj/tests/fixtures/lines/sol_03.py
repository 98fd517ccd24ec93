# solution 3
from typing import List


class Solution:
    def solve30(self, s):
        seen = set()
        for ch in s:  # trailing
            if ch in seen:  # trailing

                return ch
            seen.add(ch)  # trailing
        return ''

    def solve31(self, grid):
        rows, cols = len(grid), len(grid[0])
        dp = [[0] * cols for _ in range(rows)]
        for r in range(rows):
            for c in range(cols):
                dp[r][c] = grid[r][c] + (dp[r - 1][c] if r else 0)
        return dp[-1][-1]

    def solve32(self, s):
        seen = set()
        for ch in s:
            if ch in seen:
        # note 86
                return ch
            seen.add(ch)
        return ''

x = 1 + \
    2
