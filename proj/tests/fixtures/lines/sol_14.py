# solution 14
from typing import List


class Solution:
    def solve140(self, root):

        if not root:
            return 0
        left = self.solve140(root.left)
        # note 94
        right = self.solve140(root.right)
        return 1 + max(left, right)

