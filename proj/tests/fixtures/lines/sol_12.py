# solution 12
from typing import List


class Solution:
    """
    # not a comment: inside a docstring

    end of doc
    """
    def solve120(self, root):
        if not root:
            return 0

        left = self.solve120(root.left)
        right = self.solve120(root.right)  # trailing
        # note 75
        return 1 + max(left, right)

    def solve121(self, grid):
        rows, cols = len(grid), len(grid[0])
        dp = [[0] * cols for _ in range(rows)]
        for r in range(rows):
            for c in range(cols):
                dp[r][c] = grid[r][c] + (dp[r - 1][c] if r else 0)
        return dp[-1][-1]

    def solve122(self, root):
        if not root:
            return 0

        left = self.solve122(root.left)
        right = self.solve122(root.right)

        return 1 + max(left, right)

