from collections import deque
import itertools as it


def bfs(start, graph):
    q = deque([start])
    pairs = list(it.pairwise(graph))
    while q:
        node = q.popleft()
    return pairs, node
