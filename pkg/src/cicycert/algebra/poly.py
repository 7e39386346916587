"""Dense univariate polynomials, sparse homogeneous forms and rational curves."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Mapping, Sequence

from .fields import QQ


def _trim(coeffs: list) -> tuple:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True, eq=False)
class UniPoly:
    """Polynomial in ``t`` stored low degree first; always trimmed."""

    coeffs: tuple
    field: object = QQ

    def __post_init__(self):
        F = self.field
        object.__setattr__(self, "coeffs", _trim([F(c) for c in self.coeffs]))

    @classmethod
    def _raw(cls, coeffs: list, field) -> "UniPoly":
        # coefficients already canonical in ``field``
        obj = object.__new__(cls)
        object.__setattr__(obj, "coeffs", _trim(coeffs))
        object.__setattr__(obj, "field", field)
        return obj

    @classmethod
    def zero(cls, field=QQ) -> "UniPoly":
        return cls._raw([], field)

    @classmethod
    def constant(cls, c, field=QQ) -> "UniPoly":
        return cls((c,), field)

    @classmethod
    def t(cls, field=QQ) -> "UniPoly":
        return cls((0, 1), field)

    @classmethod
    def from_roots(cls, roots, lead=1, field=QQ) -> "UniPoly":
        p = cls.constant(lead, field)
        for r in roots:
            p = p * cls((-r, 1), field)
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else 0

    def _coerce(self, other) -> "UniPoly":
        if isinstance(other, UniPoly):
            if other.field != self.field:
                raise ValueError(f"mixed scalar contexts {self.field} / {other.field}")
            return other
        return UniPoly.constant(other, self.field)

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        red = self.field.reduce
        out = list(a)
        for i, c in enumerate(b):
            out[i] = red(out[i] + c)
        return UniPoly._raw(out, self.field)

    __radd__ = __add__

    def __neg__(self):
        red = self.field.reduce
        return UniPoly._raw([red(-c) for c in self.coeffs], self.field)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, UniPoly):
            c = self.field(other)
            red = self.field.reduce
            return UniPoly._raw([red(a * c) for a in self.coeffs], self.field)
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return UniPoly.zero(self.field)
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        red = self.field.reduce
        return UniPoly._raw([red(c) for c in out], self.field)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = UniPoly.constant(1, self.field)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs and self.field == other.field
        if other == 0:
            return self.is_zero()
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.coeffs, self.field))

    def __call__(self, t):
        acc = 0
        red = self.field.reduce
        for c in reversed(self.coeffs):
            acc = red(acc * t + c)
        return acc

    def derivative(self) -> "UniPoly":
        red = self.field.reduce
        return UniPoly._raw([red(k * c) for k, c in enumerate(self.coeffs)][1:], self.field)

    def compose(self, other: "UniPoly") -> "UniPoly":
        """``self(other(t))`` by Horner."""
        acc = UniPoly.zero(self.field)
        for c in reversed(self.coeffs):
            acc = acc * other + c
        return acc

    def divmod(self, other: "UniPoly"):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        F = self.field
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return UniPoly.zero(F), self
        q = [0] * (dq + 1)
        inv_lead = F.inv(other.lead)
        for i in range(dq, -1, -1):
            c = F.reduce(rem[i + len(other.coeffs) - 1] * inv_lead)
            q[i] = c
            if c == 0:
                continue
            for j, b in enumerate(other.coeffs):
                rem[i + j] = F.reduce(rem[i + j] - c * b)
        return UniPoly._raw(q, F), UniPoly._raw(rem[: len(other.coeffs) - 1], F)

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        return self * self.field.inv(self.lead)

    def with_field(self, F) -> "UniPoly":
        return UniPoly(self.coeffs, F)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            terms.append(f"{c}" if k == 0 else f"{c}*t^{k}")
        return " + ".join(terms)


def poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd; gcd(0, 0) = 0."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def gcd_all(polys: Sequence[UniPoly]) -> UniPoly:
    polys = list(polys)
    if not polys:
        raise ValueError("gcd of an empty family")
    g = UniPoly.zero(polys[0].field)
    for p in polys:
        g = poly_gcd(g, p)
        if g.degree == 0:
            break
    return g


def is_squarefree(p: UniPoly) -> bool:
    if p.degree <= 0:
        return True
    return poly_gcd(p, p.derivative()).degree == 0


def squarefree_decomposition(p: UniPoly) -> list[tuple[UniPoly, int]]:
    """Yun's algorithm; valid in characteristic 0 or when deg p < char."""
    if p.degree <= 0:
        return []
    f = p.monic()
    out = []
    a = poly_gcd(f, f.derivative())
    b = f // a
    c = f.derivative() // a
    d = c - b.derivative()
    i = 1
    while b.degree > 0:
        a = poly_gcd(b, d)
        if a.degree > 0:
            out.append((a, i))
        b = b // a
        c = d // a
        d = c - b.derivative()
        i += 1
    return out


@lru_cache(maxsize=None)
def monomials(nvars: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """All exponent vectors of the given total degree, lex-descending."""
    out = []
    for combo in itertools.combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    out.sort(reverse=True)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class HomForm:
    """Homogeneous polynomial in ``nvars`` variables, sparse, no zero terms."""

    nvars: int
    degree: int
    terms: Mapping[tuple, object] = dc_field(default_factory=dict)
    field: object = QQ

    def __post_init__(self):
        F = self.field
        clean = {}
        for e, c in dict(self.terms).items():
            e = tuple(int(x) for x in e)
            if len(e) != self.nvars or sum(e) != self.degree or min(e, default=0) < 0:
                raise ValueError(f"exponent {e} invalid for a degree-{self.degree} form in {self.nvars} variables")
            c = F(c)
            if c != 0:
                clean[e] = F.reduce(clean.get(e, 0) + c)
                if clean[e] == 0:
                    del clean[e]
        object.__setattr__(self, "terms", clean)

    @classmethod
    def _raw(cls, nvars, degree, terms, field) -> "HomForm":
        obj = object.__new__(cls)
        object.__setattr__(obj, "nvars", nvars)
        object.__setattr__(obj, "degree", degree)
        object.__setattr__(obj, "terms", {e: c for e, c in terms.items() if c != 0})
        object.__setattr__(obj, "field", field)
        return obj

    @classmethod
    def variable(cls, j: int, nvars: int, field=QQ) -> "HomForm":
        e = [0] * nvars
        e[j] = 1
        return cls(nvars, 1, {tuple(e): 1}, field)

    @classmethod
    def from_vector(cls, nvars: int, degree: int, vec: Sequence, field=QQ) -> "HomForm":
        mons = monomials(nvars, degree)
        if len(vec) != len(mons):
            raise ValueError("coefficient vector length does not match monomial count")
        return cls(nvars, degree, dict(zip(mons, vec)), field)

    def to_vector(self) -> list:
        return [self.terms.get(e, 0) for e in monomials(self.nvars, self.degree)]

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "HomForm"):
        if other.nvars != self.nvars or other.field != self.field:
            raise ValueError("forms live in different rings")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        if other.degree != self.degree and not (self.is_zero() or other.is_zero()):
            raise ValueError("cannot add forms of different degrees")
        if self.is_zero():
            return other
        red = self.field.reduce
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = red(out.get(e, 0) + c)
        return HomForm._raw(self.nvars, self.degree, out, self.field)

    __radd__ = __add__

    def __neg__(self):
        red = self.field.reduce
        return HomForm._raw(self.nvars, self.degree, {e: red(-c) for e, c in self.terms.items()}, self.field)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        red = self.field.reduce
        if not isinstance(other, HomForm):
            c = self.field(other)
            return HomForm._raw(self.nvars, self.degree, {e: red(v * c) for e, v in self.terms.items()}, self.field)
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return HomForm._raw(self.nvars, self.degree + other.degree, {e: red(c) for e, c in out.items()}, self.field)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = HomForm(self.nvars, 0, {(0,) * self.nvars: 1}, self.field)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, HomForm):
            return NotImplemented
        return (self.nvars, self.field) == (other.nvars, other.field) and self.terms == other.terms and (
            self.degree == other.degree or not self.terms
        )

    def __hash__(self) -> int:
        return hash((self.nvars, self.degree, frozenset(self.terms.items())))

    def partial(self, j: int) -> "HomForm":
        if not 0 <= j < self.nvars:
            raise IndexError(f"variable index {j} out of range for {self.nvars} variables")
        if self.degree == 0:
            return HomForm._raw(self.nvars, 0, {}, self.field)
        red = self.field.reduce
        out = {}
        for e, c in self.terms.items():
            if e[j]:
                f = list(e)
                f[j] -= 1
                out[tuple(f)] = red(c * e[j])
        return HomForm._raw(self.nvars, self.degree - 1, out, self.field)

    def gradient(self) -> list["HomForm"]:
        return [self.partial(j) for j in range(self.nvars)]

    def __call__(self, point: Sequence):
        if len(point) != self.nvars:
            raise ValueError(f"expected {self.nvars} coordinates, got {len(point)}")
        red = self.field.reduce
        acc = 0
        for e, c in self.terms.items():
            term = c
            for x, k in zip(point, e):
                if k:
                    term = term * x**k
            acc += term
        return red(acc)

    def rename(self, index_map: Sequence[int], nvars: int) -> "HomForm":
        """Substitute ``z_i -> z_{index_map[i]}`` in a ring with ``nvars`` variables."""
        if len(index_map) != self.nvars:
            raise ValueError("index map must cover every variable")
        red = self.field.reduce
        out: dict = {}
        for e, c in self.terms.items():
            f = [0] * nvars
            for i, k in enumerate(e):
                f[index_map[i]] += k
            f = tuple(f)
            out[f] = red(out.get(f, 0) + c)
        return HomForm._raw(nvars, self.degree, out, self.field)

    def linear_substitute(self, rows: Sequence[Sequence]) -> "HomForm":
        """``g(A z)``: variable ``z_i`` becomes ``sum_j rows[i][j] z_j``."""
        lins = [
            HomForm(len(rows[0]), 1, {tuple(int(k == j) for k in range(len(rows[0]))): a for j, a in enumerate(r)}, self.field)
            for r in rows
        ]
        m = len(rows[0])
        result = HomForm._raw(m, self.degree, {}, self.field)
        for e, c in self.terms.items():
            term = HomForm(m, 0, {(0,) * m: c}, self.field)
            for i, k in enumerate(e):
                for _ in range(k):
                    term = term * lins[i]
            result = result + term if not result.is_zero() else term
        return result

    def with_field(self, F) -> "HomForm":
        return HomForm(self.nvars, self.degree, self.terms, F)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mon = "*".join(f"z{i}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            parts.append(f"{c}*{mon}" if mon else f"{c}")
        return " + ".join(parts)


def divide_form(f: HomForm, g: HomForm) -> tuple[HomForm, HomForm]:
    """Division by a single form in lex order: ``f = q g + r``.

    ``r`` is zero exactly when ``g`` divides ``f``, since ``{g}`` is a
    Groebner basis of the principal ideal it generates.
    """
    f._check(g)
    if g.is_zero():
        raise ZeroDivisionError("division by the zero form")
    F = f.field
    lead_e = max(g.terms)
    lead_inv = F.inv(g.terms[lead_e])
    work = dict(f.terms)
    quot: dict = {}
    rem: dict = {}
    while work:
        e = max(work)
        c = work.pop(e)
        shift = tuple(a - b for a, b in zip(e, lead_e))
        if min(shift) < 0:
            rem[e] = c
            continue
        k = F.reduce(c * lead_inv)
        quot[shift] = k
        for ge, gc in g.terms.items():
            if ge == lead_e:
                continue
            m = tuple(a + b for a, b in zip(ge, shift))
            v = F.reduce(work.get(m, 0) - k * gc)
            if v:
                work[m] = v
            else:
                work.pop(m, None)
    qdeg = max(f.degree - g.degree, 0)
    return HomForm._raw(f.nvars, qdeg, quot, F), HomForm._raw(f.nvars, f.degree, rem, F)


def variables(nvars: int, field=QQ) -> list[HomForm]:
    return [HomForm.variable(j, nvars, field) for j in range(nvars)]


class CurveError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RationalCurve:
    """A point of M_d: n+1 polynomials of degree <= d, no common zero on P^1.

    Some component must reach degree exactly ``d`` (no base point at infinity)
    and the affine gcd of the components must be constant.
    """

    components: tuple
    degree: int

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps or all(c.is_zero() for c in comps):
            raise CurveError("zero curve")
        fields = {c.field for c in comps}
        if len(fields) != 1:
            raise CurveError("components over different scalar contexts")
        top = max(c.degree for c in comps)
        if top > self.degree:
            raise CurveError(f"component of degree {top} exceeds bound {self.degree}")
        if top < self.degree:
            raise CurveError("base point at infinity: no component reaches the degree bound")
        if self.degree > 0 and gcd_all(comps).degree > 0:
            raise CurveError("components share a common factor")

    @classmethod
    def from_lists(cls, comps: Sequence[Sequence], field=QQ, degree: int | None = None) -> "RationalCurve":
        polys = tuple(UniPoly(tuple(c), field) for c in comps)
        if degree is None:
            degree = max(p.degree for p in polys)
        return cls(polys, degree)

    @classmethod
    def from_vector(cls, vec: Sequence, n: int, d: int, field=QQ) -> "RationalCurve":
        if len(vec) != (n + 1) * (d + 1):
            raise ValueError("coefficient vector has the wrong length")
        polys = tuple(UniPoly(tuple(vec[j * (d + 1):(j + 1) * (d + 1)]), field) for j in range(n + 1))
        return cls(polys, d)

    def __eq__(self, other):
        if not isinstance(other, RationalCurve):
            return NotImplemented
        return self.degree == other.degree and self.components == other.components

    def __hash__(self):
        return hash((self.degree, self.components))

    @property
    def n(self) -> int:
        return len(self.components) - 1

    @property
    def field(self):
        return self.components[0].field

    def __call__(self, t) -> tuple:
        return tuple(c(t) for c in self.components)

    def derivative(self) -> tuple:
        return tuple(c.derivative() for c in self.components)

    def to_vector(self) -> list:
        d = self.degree
        return [c.coeff(k) for c in self.components for k in range(d + 1)]

    def with_field(self, F) -> "RationalCurve":
        return RationalCurve(tuple(c.with_field(F) for c in self.components), self.degree)

    def extend(self, pattern: Sequence) -> "RationalCurve":
        """New curve whose entries are ``components[i]`` for int ``i`` or zero for ``None``."""
        zero = UniPoly.zero(self.field)
        return RationalCurve(tuple(zero if i is None else self.components[i] for i in pattern), self.degree)


def compose_form_with_curve(g: HomForm, c) -> UniPoly:
    """``g(c_0(t), ..., c_n(t))`` as a univariate polynomial."""
    comps = c.components if isinstance(c, RationalCurve) else tuple(c)
    if len(comps) != g.nvars:
        raise ValueError(f"form has {g.nvars} variables but the curve has {len(comps)} components")
    F = g.field
    powers: list[list[UniPoly]] = [[UniPoly.constant(1, F)] for _ in comps]

    def power(j: int, k: int) -> UniPoly:
        row = powers[j]
        while len(row) <= k:
            row.append(row[-1] * comps[j])
        return row[k]

    result = UniPoly.zero(F)
    for e, coef in g.terms.items():
        term = UniPoly.constant(coef, F)
        for j, k in enumerate(e):
            if k:
                term = term * power(j, k)
                if term.is_zero():
                    break
        result = result + term
    return result


def jacobian_row(g: HomForm, c: RationalCurve, t, partials: Sequence[HomForm] | None = None) -> list:
    """Derivative of ``c -> g(c(t))`` in the coefficient coordinates of M_d.

    Entry ``j*(d+1) + k`` is ``(dg/dz_j)(c(t)) * t^k``.
    """
    if partials is None:
        partials = g.gradient()
    F = g.field
    pt = c(t)
    d = c.degree
    tpow = [1]
    for _ in range(d):
        tpow.append(F.reduce(tpow[-1] * t))
    row = []
    for dg in partials:
        v = dg(pt) if not dg.is_zero() else 0
        row.extend(F.reduce(v * tk) for tk in tpow)
    return row
