# solution 5
from typing import List


class Solution:
    def solve50(self, s):

        seen = set()
        for ch in s:
        # note 13
            if ch in seen:
                return ch
            seen.add(ch)  # trailing
        # note 23
        return ''

    def solve51(self, root):
        # note 35
        if not root:  # trailing
        # note 81
            return 0
        left = self.solve51(root.left)
        right = self.solve51(root.right)
        return 1 + max(left, right)

    def solve52(self, root):
        if not root:
            return 0

        left = self.solve52(root.left)
        right = self.solve52(root.right)
        return 1 + max(left, right)

