# solution 2
from typing import List


class Solution:
    def solve20(self, s):

        seen = set()
        for ch in s:
    	
            if ch in seen:
                return ch
            seen.add(ch)
        return ''

    def solve21(self, s):

        seen = set()
        # note 47
        for ch in s:
            if ch in seen:
                return ch
            seen.add(ch)
        return ''

