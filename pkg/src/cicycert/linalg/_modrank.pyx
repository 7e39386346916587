# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled modular elimination for primes below 2**63."""
from libc.stdint cimport uint64_t, int64_t
from libc.stdlib cimport malloc, free

cdef extern from *:
    """
    typedef unsigned __int128 cc_u128;
    typedef __int128 cc_i128;
    static inline uint64_t cc_mulmod(uint64_t a, uint64_t b, uint64_t p) {
        return (uint64_t)(((cc_u128)a * b) % p);
    }
    static inline uint64_t cc_invmod(uint64_t a, uint64_t p) {
        cc_i128 t = 0, nt = 1, r = p, nr = a, q, tmp;
        while (nr != 0) {
            q = r / nr;
            tmp = t - q * nt; t = nt; nt = tmp;
            tmp = r - q * nr; r = nr; nr = tmp;
        }
        if (t < 0) t += p;
        return (uint64_t)t;
    }
    """
    uint64_t cc_mulmod(uint64_t a, uint64_t b, uint64_t p) nogil
    uint64_t cc_invmod(uint64_t a, uint64_t p) nogil

MAX_PRIME = 2**63


cdef uint64_t* _load(rows, Py_ssize_t nrows, Py_ssize_t ncols, uint64_t p) except NULL:
    cdef uint64_t* m = <uint64_t*> malloc(max(nrows * ncols, 1) * sizeof(uint64_t))
    if m == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, j
    for i in range(nrows):
        r = rows[i]
        if len(r) != ncols:
            free(m)
            raise ValueError("ragged matrix")
        for j in range(ncols):
            m[i * ncols + j] = <uint64_t>(r[j] % p)
    return m


cdef Py_ssize_t _eliminate(uint64_t* m, Py_ssize_t nrows, Py_ssize_t ncols, uint64_t p,
                           bint full, Py_ssize_t* pivots) nogil:
    cdef Py_ssize_t r = 0, c, i, j, piv
    cdef uint64_t inv, f, nf, x
    cdef uint64_t* pr
    cdef uint64_t* row
    for c in range(ncols):
        if r == nrows:
            break
        piv = -1
        for i in range(r, nrows):
            if m[i * ncols + c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, ncols):
                x = m[r * ncols + j]
                m[r * ncols + j] = m[piv * ncols + j]
                m[piv * ncols + j] = x
        pr = m + r * ncols
        inv = cc_invmod(pr[c], p)
        for j in range(c, ncols):
            pr[j] = cc_mulmod(pr[j], inv, p)
        for i in range(0 if full else r + 1, nrows):
            if i == r:
                continue
            row = m + i * ncols
            f = row[c]
            if f == 0:
                continue
            nf = p - f
            for j in range(c, ncols):
                if pr[j] != 0:
                    x = row[j] + cc_mulmod(nf, pr[j], p)
                    if x >= p:
                        x -= p
                    row[j] = x
        pivots[r] = c
        r += 1
    return r


def rref_mod(rows, Py_ssize_t ncols, p):
    cdef uint64_t pp = p
    cdef Py_ssize_t nrows = len(rows)
    if p >= MAX_PRIME:
        raise ValueError("prime too large for the compiled kernel")
    cdef uint64_t* m = _load(rows, nrows, ncols, pp)
    cdef Py_ssize_t* piv = <Py_ssize_t*> malloc(max(min(nrows, ncols), 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t r, i, j
    try:
        with nogil:
            r = _eliminate(m, nrows, ncols, pp, True, piv)
        out = [[m[i * ncols + j] for j in range(ncols)] for i in range(r)]
        return out, [piv[i] for i in range(r)]
    finally:
        free(m)
        free(piv)


def rank_mod(rows, Py_ssize_t ncols, p):
    cdef uint64_t pp = p
    cdef Py_ssize_t nrows = len(rows)
    if p >= MAX_PRIME:
        raise ValueError("prime too large for the compiled kernel")
    cdef uint64_t* m = _load(rows, nrows, ncols, pp)
    cdef Py_ssize_t* piv = <Py_ssize_t*> malloc(max(min(nrows, ncols), 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t r
    try:
        with nogil:
            r = _eliminate(m, nrows, ncols, pp, False, piv)
        return r
    finally:
        free(m)
        free(piv)


def det_mod(rows, p):
    cdef uint64_t pp = p
    cdef Py_ssize_t n = len(rows), c, i, j, piv
    cdef uint64_t det = 1, inv, f, nf, x
    cdef bint neg = False
    if p >= MAX_PRIME:
        raise ValueError("prime too large for the compiled kernel")
    cdef uint64_t* m = _load(rows, n, n, pp)
    try:
        with nogil:
            for c in range(n):
                piv = -1
                for i in range(c, n):
                    if m[i * n + c] != 0:
                        piv = i
                        break
                if piv < 0:
                    det = 0
                    break
                if piv != c:
                    neg = not neg
                    for j in range(c, n):
                        x = m[c * n + j]
                        m[c * n + j] = m[piv * n + j]
                        m[piv * n + j] = x
                det = cc_mulmod(det, m[c * n + c], pp)
                inv = cc_invmod(m[c * n + c], pp)
                for i in range(c + 1, n):
                    f = cc_mulmod(m[i * n + c], inv, pp)
                    if f == 0:
                        continue
                    nf = pp - f
                    for j in range(c, n):
                        x = m[i * n + j] + cc_mulmod(nf, m[c * n + j], pp)
                        if x >= pp:
                            x -= pp
                        m[i * n + j] = x
        if neg and det:
            return pp - det
        return det
    finally:
        free(m)
