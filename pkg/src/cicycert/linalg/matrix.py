"""Dense exact matrices over QQ or GF(p)."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from ..algebra.fields import QQ, PrimeField
from . import _backend


class MatrixError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ExactMatrix:
    rows: tuple
    ncols: int
    field: object = QQ

    def __post_init__(self):
        F = self.field
        if not getattr(F, "exact", False):
            raise MatrixError(f"{F!r} is not an exact scalar context")
        rows = tuple(tuple(F(x) for x in r) for r in self.rows)
        for r in rows:
            if len(r) != self.ncols:
                raise MatrixError("ragged rows")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def _raw(cls, rows, ncols, field) -> "ExactMatrix":
        obj = object.__new__(cls)
        object.__setattr__(obj, "rows", tuple(tuple(r) for r in rows))
        object.__setattr__(obj, "ncols", ncols)
        object.__setattr__(obj, "field", field)
        return obj

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], field=QQ, ncols: int | None = None) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        return cls(tuple(tuple(r) for r in rows), ncols, field)

    @classmethod
    def zeros(cls, nrows: int, ncols: int, field=QQ) -> "ExactMatrix":
        return cls._raw([[0] * ncols for _ in range(nrows)], ncols, field)

    @classmethod
    def identity(cls, n: int, field=QQ) -> "ExactMatrix":
        return cls._raw([[int(i == j) for j in range(n)] for i in range(n)], n, field)

    @classmethod
    def diagonal(cls, entries: Sequence, field=QQ) -> "ExactMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], n, field)

    @classmethod
    def block(cls, grid: Sequence[Sequence["ExactMatrix | None"]], field=None) -> "ExactMatrix":
        """Assemble from a grid of blocks; ``None`` stands for a zero block."""
        nr, nc = len(grid), len(grid[0])
        heights = [None] * nr
        widths = [None] * nc
        for i, row in enumerate(grid):
            if len(row) != nc:
                raise MatrixError("ragged block grid")
            for j, b in enumerate(row):
                if b is None:
                    continue
                field = field or b.field
                if b.field != field:
                    raise MatrixError("blocks over different scalar contexts")
                for lst, k, v in ((heights, i, b.nrows), (widths, j, b.ncols)):
                    if lst[k] is not None and lst[k] != v:
                        raise MatrixError(f"block size mismatch at ({i}, {j})")
                    lst[k] = v
        if None in heights or None in widths:
            raise MatrixError("a block row or column contains only zero blocks")
        rows = []
        for i, row in enumerate(grid):
            for r in range(heights[i]):
                line = []
                for j, b in enumerate(row):
                    line.extend(b.rows[r] if b is not None else [0] * widths[j])
                rows.append(line)
        return cls._raw(rows, sum(widths), field or QQ)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> list:
        return [r[j] for r in self.rows]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix._raw([list(c) for c in zip(*self.rows)] if self.rows else [], self.nrows, self.field)

    def submatrix(self, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None) -> "ExactMatrix":
        rows = range(self.nrows) if rows is None else rows
        cols = range(self.ncols) if cols is None else list(cols)
        return ExactMatrix._raw([[self.rows[i][j] for j in cols] for i in rows], len(cols), self.field)

    def hstack(self, *others: "ExactMatrix") -> "ExactMatrix":
        return ExactMatrix.block([[self, *others]])

    def vstack(self, *others: "ExactMatrix") -> "ExactMatrix":
        return ExactMatrix.block([[m] for m in (self, *others)])

    def _same(self, other: "ExactMatrix"):
        if self.field != other.field:
            raise MatrixError(f"mixed scalar contexts {self.field} / {other.field}")

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same(other)
        if self.shape != other.shape:
            raise MatrixError("shape mismatch")
        red = self.field.reduce
        return ExactMatrix._raw(
            [[red(a + b) for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols, self.field
        )

    def __neg__(self) -> "ExactMatrix":
        red = self.field.reduce
        return ExactMatrix._raw([[red(-a) for a in r] for r in self.rows], self.ncols, self.field)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + (-other)

    def scale(self, c) -> "ExactMatrix":
        c = self.field(c)
        red = self.field.reduce
        return ExactMatrix._raw([[red(a * c) for a in r] for r in self.rows], self.ncols, self.field)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same(other)
        if self.ncols != other.nrows:
            raise MatrixError("inner dimensions differ")
        red = self.field.reduce
        cols = list(zip(*other.rows)) if other.rows else [()] * other.ncols
        return ExactMatrix._raw(
            [[red(sum(a * b for a, b in zip(r, c))) for c in cols] for r in self.rows], other.ncols, self.field
        )

    def apply(self, vec: Sequence) -> list:
        if len(vec) != self.ncols:
            raise MatrixError("vector length mismatch")
        red = self.field.reduce
        F = self.field
        v = [F(x) for x in vec]
        return [red(sum(a * b for a, b in zip(r, v))) for r in self.rows]

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.rows, self.ncols, self.field))

    def with_field(self, F) -> "ExactMatrix":
        return ExactMatrix(self.rows, self.ncols, F)

    def rank(self) -> int:
        return rank(self)

    def rank_and_kernel(self):
        return rank_and_kernel(self)

    def det(self):
        return det(self)

    def inverse(self) -> "ExactMatrix":
        return inverse(self)

    def is_full_rank(self) -> bool:
        return self.rank() == min(self.shape)

    def __repr__(self) -> str:
        return f"ExactMatrix({self.nrows}x{self.ncols} over {self.field!r})"


def _integer_rows(M: ExactMatrix) -> list[list[int]]:
    out = []
    for r in M.rows:
        den = 1
        for x in r:
            if isinstance(x, Fraction) and x.denominator != 1:
                den = lcm(den, x.denominator)
        out.append([int(x * den) for x in r])
    return out


def _bareiss_rref(m: list[list[int]], ncols: int):
    """Fraction-free Gauss-Jordan: every pivot of the result equals the last pivot."""
    nrows = len(m)
    prev = 1
    r = 0
    pivots = []
    for c in range(ncols):
        if r == nrows:
            break
        best = -1
        for i in range(r, nrows):
            if m[i][c] != 0 and (best < 0 or abs(m[i][c]) < abs(m[best][c])):
                best = i
        if best < 0:
            continue
        m[r], m[best] = m[best], m[r]
        p = m[r][c]
        pr = m[r]
        for i in range(nrows):
            if i == r:
                continue
            a = m[i][c]
            row = m[i]
            if a == 0:
                if p != prev:
                    m[i] = [p * x // prev for x in row]
                continue
            m[i] = [(p * x - a * y) // prev for x, y in zip(row, pr)]
        prev = p
        pivots.append(c)
        r += 1
    return m[:r], pivots, prev


def _primitive(v: list[int]) -> list[int]:
    g = 0
    for x in v:
        g = gcd(g, x)
    if g > 1:
        v = [x // g for x in v]
    lead = next((x for x in v if x != 0), 0)
    return [-x for x in v] if lead < 0 else v


def rref(M: ExactMatrix):
    """Row echelon data ``(rows, pivots)``.

    Over GF(p) rows are reduced with unit pivots.  Over QQ they are the
    fraction-free form in which every pivot equals a common integer.
    """
    F = M.field
    if isinstance(F, PrimeField):
        return _backend.rref_mod([list(r) for r in M.rows], M.ncols, F.p)
    rows, pivots, _ = _bareiss_rref(_integer_rows(M), M.ncols)
    return rows, pivots


def rank(M: ExactMatrix) -> int:
    F = M.field
    if isinstance(F, PrimeField):
        return _backend.rank_mod([list(r) for r in M.rows], M.ncols, F.p)
    rows, pivots = rref(M)
    return len(pivots)


def kernel_from_rref(rows, pivots, ncols: int, field) -> list[list]:
    pivset = set(pivots)
    basis = []
    if isinstance(field, PrimeField):
        p = field.p
        for f in range(ncols):
            if f in pivset:
                continue
            v = [0] * ncols
            v[f] = 1
            for r, c in zip(rows, pivots):
                v[c] = (-r[f]) % p
            basis.append(v)
        return basis
    D = rows[0][pivots[0]] if pivots else 1
    for f in range(ncols):
        if f in pivset:
            continue
        v = [0] * ncols
        v[f] = D
        for r, c in zip(rows, pivots):
            v[c] = -r[f]
        basis.append(_primitive(v))
    return basis


def rank_and_kernel(M: ExactMatrix) -> tuple[int, list[list]]:
    """Exact rank and a kernel basis.

    Kernel vectors come from the reduced echelon form, so the basis is
    canonical: over GF(p) the free coordinate is 1, over QQ the vectors are
    primitive integer multiples of the reduced-echelon ones.
    """
    rows, pivots = rref(M)
    return len(pivots), kernel_from_rref(rows, pivots, M.ncols, M.field)


def det(M: ExactMatrix):
    if M.nrows != M.ncols:
        raise MatrixError("determinant of a non-square matrix")
    F = M.field
    if isinstance(F, PrimeField):
        return _backend.det_mod([list(r) for r in M.rows], F.p)
    n = M.nrows
    if n == 0:
        return 1
    dens = []
    m = []
    for r in M.rows:
        den = 1
        for x in r:
            if isinstance(x, Fraction):
                den = lcm(den, x.denominator)
        dens.append(den)
        m.append([int(x * den) for x in r])
    sign = 1
    prev = 1
    for c in range(n - 1):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        p = m[c][c]
        for i in range(c + 1, n):
            m[i] = [
                (p * m[i][j] - m[i][c] * m[c][j]) // prev if j > c else 0 for j in range(n)
            ]
        prev = p
    value = sign * m[n - 1][n - 1]
    total_den = 1
    for den in dens:
        total_den *= den
    return QQ.div(value, total_den) if total_den != 1 else value


def inverse(M: ExactMatrix) -> ExactMatrix:
    n = M.nrows
    if n != M.ncols:
        raise MatrixError("inverse of a non-square matrix")
    F = M.field
    aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(M.rows)]
    A = ExactMatrix._raw(aug, 2 * n, F)
    rows, pivots = rref(A)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise MatrixError("matrix is singular")
    if isinstance(F, PrimeField):
        return ExactMatrix._raw([r[n:] for r in rows[:n]], n, F)
    D = rows[0][0]
    return ExactMatrix._raw([[QQ.div(x, D) for x in r[n:]] for r in rows[:n]], n, F)


def column_span_contains(base: ExactMatrix, extra: ExactMatrix) -> bool:
    """Whether every column of ``extra`` lies in the column span of ``base``."""
    return rank(base.hstack(extra)) == rank(base)
