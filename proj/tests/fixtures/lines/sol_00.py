# solution 0
from typing import List


class Solution:
    """
    # not a comment: inside a docstring

    end of doc
    """
    def solve00(self, s):
        seen = set()
        for ch in s:
            if ch in seen:

                return ch
            seen.add(ch)
        return ''

    def solve01(self, root):
        if not root:
        # note 99
            return 0

        left = self.solve01(root.left)
        right = self.solve01(root.right)
        return 1 + max(left, right)

