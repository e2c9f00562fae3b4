"""Pure-Python reference versions of the inner loops in ``_kernels.pyx``.

Sequences are lists of hashable symbols (the metrics pass small ints).
"""


def lcs_length(a, b):
    """Length of the longest common subsequence of ``a`` and ``b``."""
    if not a or not b:
        return 0
    if len(b) > len(a):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            if x == y:
                cur.append(prev[j] + 1)
            else:
                cur.append(cur[j] if cur[j] > prev[j + 1] else prev[j + 1])
        prev = cur
    return prev[-1]


def greedy_align(hyp, ref, hyp_lemmas, ref_lemmas):
    """Monotone exact-then-lemma alignment; returns ``(matches, chunks)``.

    Stage one walks the hypothesis left to right and links each token to the
    leftmost unused reference token with the same form to the right of the
    previous link. Stage two repeats this for lemmas, restricted to the gap
    between the neighbouring stage-one links so no link crosses another.
    """
    n, m = len(hyp), len(ref)
    link = [-1] * n
    used = [False] * m
    last = -1
    for i in range(n):
        for j in range(last + 1, m):
            if not used[j] and hyp[i] == ref[j]:
                link[i] = j
                used[j] = True
                last = j
                break
    for i in range(n):
        if link[i] >= 0:
            continue
        lo = -1
        for k in range(i - 1, -1, -1):
            if link[k] >= 0:
                lo = link[k]
                break
        hi = m
        for k in range(i + 1, n):
            if link[k] >= 0:
                hi = link[k]
                break
        for j in range(lo + 1, hi):
            if not used[j] and hyp_lemmas[i] == ref_lemmas[j]:
                link[i] = j
                used[j] = True
                break
    matches = 0
    chunks = 0
    prev_i = prev_j = -2
    for i in range(n):
        j = link[i]
        if j < 0:
            continue
        matches += 1
        if not (i == prev_i + 1 and j == prev_j + 1):
            chunks += 1
        prev_i, prev_j = i, j
    return matches, chunks
