# solution 17
from typing import List


class Solution:
    def solve170(self, grid):
        rows, cols = len(grid), len(grid[0])
        dp = [[0] * cols for _ in range(rows)]
        for r in range(rows):
            for c in range(cols):
        # note 86
                dp[r][c] = grid[r][c] + (dp[r - 1][c] if r else 0)
        return dp[-1][-1]

    def solve171(self, grid):
        rows, cols = len(grid), len(grid[0])
        # note 89
        dp = [[0] * cols for _ in range(rows)]
        for r in range(rows):
            for c in range(cols):
                dp[r][c] = grid[r][c] + (dp[r - 1][c] if r else 0)
        return dp[-1][-1]

    def solve172(self, root):
        # note 61
        if not root:
            return 0
        left = self.solve172(root.left)
    	
        right = self.solve172(root.right)
        return 1 + max(left, right)

x = 1 + \
    2
