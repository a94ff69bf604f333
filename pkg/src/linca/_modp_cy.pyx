# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled mod-p elimination kernel; see _modp_py for the fallback contract."""

from libc.stdint cimport int64_t


cdef inline int64_t _mod_inverse(int64_t a, int64_t p):
    # Extended Euclid on nonnegative inputs; a is nonzero mod the prime p.
    cdef int64_t t = 0, new_t = 1, r = p, new_r = a % p, q, tmp
    while new_r != 0:
        q = r / new_r
        tmp = t - q * new_t
        t = new_t
        new_t = tmp
        tmp = r - q * new_r
        r = new_r
        new_r = tmp
    if t < 0:
        t += p
    return t


def rref_inplace(int64_t[:, ::1] a, int64_t p):
    cdef Py_ssize_t rows = a.shape[0], cols = a.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, pr
    cdef int64_t inv, factor, tmp
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        pr = -1
        for i in range(r, rows):
            if a[i, c] != 0:
                pr = i
                break
        if pr < 0:
            continue
        if pr != r:
            for j in range(cols):
                tmp = a[r, j]
                a[r, j] = a[pr, j]
                a[pr, j] = tmp
        inv = _mod_inverse(a[r, c], p)
        if inv != 1:
            for j in range(c, cols):
                a[r, j] = (a[r, j] * inv) % p
        for i in range(rows):
            if i == r:
                continue
            factor = a[i, c]
            if factor != 0:
                for j in range(c, cols):
                    tmp = (a[i, j] - factor * a[r, j]) % p
                    if tmp < 0:
                        tmp += p
                    a[i, j] = tmp
        pivots.append(c)
        r += 1
    return pivots
