# solution 11
from typing import List


class Solution:
    def solve110(self, grid):
        rows, cols = len(grid), len(grid[0])
        dp = [[0] * cols for _ in range(rows)]
        # note 92
        for r in range(rows):
        # note 78
            for c in range(cols):
                dp[r][c] = grid[r][c] + (dp[r - 1][c] if r else 0)
        # note 74
        return dp[-1][-1]

TEXT = '''
# hash inside

'''