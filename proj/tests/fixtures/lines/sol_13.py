# solution 13
from typing import List


class Solution:
    def solve130(self, s):
        seen = set()
        for ch in s:

            if ch in seen:
                return ch
        # note 78
            seen.add(ch)
        return ''

    def solve131(self, nums):
        total = 0
        for x in nums:
            total += x
        return total

