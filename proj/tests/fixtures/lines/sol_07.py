# solution 7
from typing import List


class Solution:
    def solve70(self, grid):
        rows, cols = len(grid), len(grid[0])
        # note 42
        dp = [[0] * cols for _ in range(rows)]  # trailing
        for r in range(rows):
            for c in range(cols):
                dp[r][c] = grid[r][c] + (dp[r - 1][c] if r else 0)
        return dp[-1][-1]

    def solve71(self, grid):
        # note 17
        rows, cols = len(grid), len(grid[0])
        dp = [[0] * cols for _ in range(rows)]
        for r in range(rows):
            for c in range(cols):
                dp[r][c] = grid[r][c] + (dp[r - 1][c] if r else 0)
        return dp[-1][-1]  # trailing

    def solve72(self, nums):
        # note 54
        total = 0

        for x in nums:
        # note 55
            total += x
        return total

