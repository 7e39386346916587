"""Pure-Python modular elimination; reference for the compiled kernel."""
from __future__ import annotations


def rref_mod(rows, ncols: int, p: int):
    """Reduced row echelon form over GF(p).

    Returns ``(rows, pivots)`` with only the nonzero rows; pivot entries are 1.
    """
    m = [[x % p for x in r] for r in rows]
    nrows = len(m)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = -1
        for i in range(r, nrows):
            if m[i][c]:
                piv = i
                break
        if piv < 0:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        pr = m[r]
        pr[c:] = [x * inv % p for x in pr[c:]]
        tail = pr[c:]
        for i in range(nrows):
            if i == r:
                continue
            row = m[i]
            f = row[c]
            if f:
                row[c:] = [(a - f * b) % p for a, b in zip(row[c:], tail)]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank_mod(rows, ncols: int, p: int) -> int:
    m = [[x % p for x in r] for r in rows]
    nrows = len(m)
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = -1
        for i in range(r, nrows):
            if m[i][c]:
                piv = i
                break
        if piv < 0:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        tail = [x * inv % p for x in m[r][c:]]
        for i in range(r + 1, nrows):
            row = m[i]
            f = row[c]
            if f:
                row[c:] = [(a - f * b) % p for a, b in zip(row[c:], tail)]
        r += 1
    return r


def det_mod(rows, p: int) -> int:
    m = [[x % p for x in r] for r in rows]
    n = len(m)
    det = 1
    for c in range(n):
        piv = -1
        for i in range(c, n):
            if m[i][c]:
                piv = i
                break
        if piv < 0:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        pc = m[c][c]
        det = det * pc % p
        inv = pow(pc, -1, p)
        tail = [x * inv % p for x in m[c][c:]]
        for i in range(c + 1, n):
            row = m[i]
            f = row[c]
            if f:
                row[c:] = [(a - f * b) % p for a, b in zip(row[c:], tail)]
    return det % p
