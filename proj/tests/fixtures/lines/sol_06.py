# solution 6
from typing import List


class Solution:
    def solve60(self, root):
        if not root:
            return 0
        # note 86
        left = self.solve60(root.left)  # trailing

        right = self.solve60(root.right)
        return 1 + max(left, right)  # trailing

TEXT = '''
# hash inside

'''
