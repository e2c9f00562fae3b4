# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops; same contracts as ``_kernels_py``."""

from libc.stdlib cimport malloc, free


cdef long *_as_array(seq, Py_ssize_t n) except NULL:
    cdef long *out = <long *> malloc((n if n > 0 else 1) * sizeof(long))
    cdef Py_ssize_t i
    if out == NULL:
        raise MemoryError()
    for i in range(n):
        out[i] = seq[i]
    return out


def lcs_length(a, b):
    cdef Py_ssize_t n = len(a), m = len(b), i, j
    if n == 0 or m == 0:
        return 0
    cdef long *x = _as_array(a, n)
    cdef long *y = _as_array(b, m)
    cdef long *prev = <long *> malloc((m + 1) * sizeof(long))
    cdef long *cur = <long *> malloc((m + 1) * sizeof(long))
    cdef long *tmp
    cdef long result
    try:
        for j in range(m + 1):
            prev[j] = 0
        cur[0] = 0
        for i in range(n):
            for j in range(m):
                if x[i] == y[j]:
                    cur[j + 1] = prev[j] + 1
                elif cur[j] > prev[j + 1]:
                    cur[j + 1] = cur[j]
                else:
                    cur[j + 1] = prev[j + 1]
            tmp = prev
            prev = cur
            cur = tmp
        result = prev[m]
    finally:
        free(x)
        free(y)
        free(prev)
        free(cur)
    return result


def greedy_align(hyp, ref, hyp_lemmas, ref_lemmas):
    cdef Py_ssize_t n = len(hyp), m = len(ref), i, j, k, lo, hi, last
    cdef long *h = _as_array(hyp, n)
    cdef long *r = _as_array(ref, m)
    cdef long *hl = _as_array(hyp_lemmas, n)
    cdef long *rl = _as_array(ref_lemmas, m)
    cdef long *link = <long *> malloc((n if n > 0 else 1) * sizeof(long))
    cdef char *used = <char *> malloc(m if m > 0 else 1)
    cdef long matches = 0, chunks = 0, prev_i = -2, prev_j = -2
    try:
        for i in range(n):
            link[i] = -1
        for j in range(m):
            used[j] = 0
        last = -1
        for i in range(n):
            for j in range(last + 1, m):
                if not used[j] and h[i] == r[j]:
                    link[i] = j
                    used[j] = 1
                    last = j
                    break
        for i in range(n):
            if link[i] >= 0:
                continue
            lo = -1
            k = i - 1
            while k >= 0:
                if link[k] >= 0:
                    lo = link[k]
                    break
                k -= 1
            hi = m
            for k in range(i + 1, n):
                if link[k] >= 0:
                    hi = link[k]
                    break
            for j in range(lo + 1, hi):
                if not used[j] and hl[i] == rl[j]:
                    link[i] = j
                    used[j] = 1
                    break
        for i in range(n):
            j = link[i]
            if j < 0:
                continue
            matches += 1
            if not (i == prev_i + 1 and j == prev_j + 1):
                chunks += 1
            prev_i = i
            prev_j = j
    finally:
        free(h)
        free(r)
        free(hl)
        free(rl)
        free(link)
        free(used)
    return matches, chunks
