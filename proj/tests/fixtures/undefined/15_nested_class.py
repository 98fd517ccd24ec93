class Trie:
    class Node:
        def __init__(self):
            self.kids = {}
            self.end = False

    def __init__(self):
        self.root = Trie.Node()

    def insert(self, word):
        cur = self.root
        for ch in word:
            cur = cur.kids.setdefault(ch, Trie.Node())
        cur.end = True
        return bisect_left(word, "a")
