def top(words, k):
    freq = Counter(words)
    order = sorted(freq, key=lambda w: (-freq[w], w))
    pairs = {w: n for w, n in freq.items() if n > 1}
    return order[:k], pairs
