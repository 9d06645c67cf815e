# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled mod-p row reduction."""


cdef long long _inv(long long a, long long p):
    cdef long long result = 1, e = p - 2
    a %= p
    while e > 0:
        if e & 1:
            result = (result * a) % p
        a = (a * a) % p
        e >>= 1
    return result


def rref_inplace(long long[:, ::1] a, long long p):
    """Reduce ``a`` to RREF over F_p in place; return the pivot columns.

    Leftmost pivot column, first nonzero row at or below the current row.
    Entries must already lie in [0, p).
    """
    cdef Py_ssize_t rows = a.shape[0], cols = a.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, k
    cdef long long inv, f, t
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        k = -1
        for i in range(r, rows):
            if a[i, c] != 0:
                k = i
                break
        if k < 0:
            continue
        if k != r:
            for j in range(cols):
                t = a[r, j]
                a[r, j] = a[k, j]
                a[k, j] = t
        inv = _inv(a[r, c], p)
        for j in range(c, cols):
            a[r, j] = (a[r, j] * inv) % p
        for i in range(rows):
            if i != r:
                f = a[i, c]
                if f != 0:
                    for j in range(c, cols):
                        if a[r, j] != 0:
                            a[i, j] = (a[i, j] - f * a[r, j]) % p
                            if a[i, j] < 0:
                                a[i, j] += p
        pivots.append(c)
        r += 1
    return pivots
