class Solution:
    def mySqrt(self, x):
        return int(math.sqrt(x))

    def pick(self, nums):
        return random.choice(nums)
