class Solution:
    def sortPeople(self, names, heights):
        order = sorted(range(len(names)), key=heights.__getitem__, reverse=True)
        return [names[i] for i in order]

    def merge(self, intervals):
        intervals.sort(key=itemgetter(0))
        return intervals
