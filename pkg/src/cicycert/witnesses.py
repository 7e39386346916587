"""Witness curves on special and random Calabi-Yau complete intersections.

A witness package is a curve ``c_g``, forms ``g_1..g_r`` vanishing on it, and
marked points for every form.  All data is integral so that the same package
can be reduced into any prime field or used over QQ.
"""
from __future__ import annotations

import random
from functools import reduce
from math import gcd, lcm
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

from .algebra.fields import DEFAULT_PRIME, QQ, PrimeField, field_from_json
from .algebra.poly import (
    CurveError,
    HomForm,
    RationalCurve,
    UniPoly,
    compose_form_with_curve,
    divide_form,
    gcd_all,
    monomials,
    variables,
)
from .linalg.matrix import ExactMatrix, inverse, rank, rank_and_kernel

CY_TYPES = ((2, 2, 2, 2), (3, 2, 2), (3, 3), (4, 2), (5,))
QUARTIC_MAX_DEGREE = 8
POINT_RANGE = 2**20
COEFF_RANGE = 9


class WitnessError(ValueError):
    """Construction failed an internal guard (incidence or validity)."""


class WitnessUnavailable(WitnessError):
    """No paper-mode construction exists for these parameters."""


class ResamplingExhausted(WitnessError):
    def __init__(self, message: str, seed, attempts: int):
        super().__init__(f"{message} (seed={seed}, attempts={attempts})")
        self.seed = seed
        self.attempts = attempts


def parse_type(text) -> tuple[int, ...]:
    if isinstance(text, (tuple, list)):
        degs = tuple(int(x) for x in text)
    else:
        degs = tuple(int(x) for x in str(text).replace("(", "").replace(")", "").split(",") if x.strip())
    if degs not in CY_TYPES:
        raise ValueError(f"unsupported complete intersection type {degs}")
    return degs


def type_label(degs: Sequence[int]) -> str:
    return ",".join(str(h) for h in degs)


@dataclass(frozen=True)
class CompleteIntersectionSpec:
    n: int
    degrees: tuple
    forms: tuple

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(self.degrees))
        object.__setattr__(self, "forms", tuple(self.forms))
        r = len(self.degrees)
        if r != self.n - 3:
            raise ValueError(f"need r = n - 3 forms, got r={r}, n={self.n}")
        if sum(self.degrees) != self.n + 1:
            raise ValueError("degrees must sum to n + 1")
        if len(self.forms) != r:
            raise ValueError("one form per degree")
        for g, h in zip(self.forms, self.degrees):
            if g.degree != h or g.nvars != self.n + 1:
                raise ValueError(f"form of degree {g.degree} in {g.nvars} variables does not match ({h}, {self.n + 1})")

    @property
    def r(self) -> int:
        return len(self.degrees)

    def with_field(self, F) -> "CompleteIntersectionSpec":
        return CompleteIntersectionSpec(self.n, self.degrees, tuple(g.with_field(F) for g in self.forms))


@dataclass(frozen=True)
class MarkedPointSet:
    """``points[i]`` holds the marked points for form ``i`` (0-based)."""

    points: tuple

    def __post_init__(self):
        pts = tuple(tuple(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        for i, group in enumerate(pts):
            if len(set(group)) != len(group):
                raise ValueError(f"marked points for form {i + 1} are not distinct")

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def check_counts(self, degrees: Sequence[int], d: int):
        if len(self.points) < len(degrees):
            raise ValueError("marked points missing for some forms")
        for i, h in enumerate(degrees):
            if len(self.points[i]) != h * d + 1:
                raise ValueError(f"form {i + 1} needs {h * d + 1} marked points, got {len(self.points[i])}")

    def with_field(self, F) -> "MarkedPointSet":
        return MarkedPointSet(tuple(tuple(F(t) for t in g) for g in self.points))


@dataclass(frozen=True)
class WitnessPackage:
    spec: CompleteIntersectionSpec
    curve: RationalCurve
    points: MarkedPointSet
    provenance: str
    seed: object = None
    meta: dict = dc_field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.curve.n != self.spec.n:
            raise ValueError("curve and forms live in different projective spaces")
        self.points.check_counts(self.spec.degrees, self.curve.degree)

    @property
    def d(self) -> int:
        return self.curve.degree

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def degrees(self) -> tuple:
        return self.spec.degrees

    @property
    def field(self):
        return self.curve.field

    def incidence_residuals(self) -> list[UniPoly]:
        return [compose_form_with_curve(g, self.curve) for g in self.spec.forms]

    def is_incident(self) -> bool:
        return all(p.is_zero() for p in self.incidence_residuals())

    def with_field(self, F) -> "WitnessPackage":
        if isinstance(self.field, PrimeField) and F != self.field:
            raise WitnessError(f"package already reduced modulo {self.field.p}; cannot move it to {F!r}")
        return WitnessPackage(
            self.spec.with_field(F), self.curve.with_field(F), self.points.with_field(F),
            self.provenance, self.seed, dict(self.meta),
        )

    def with_points(self, points: MarkedPointSet) -> "WitnessPackage":
        return WitnessPackage(self.spec, self.curve, points, self.provenance, self.seed, dict(self.meta))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "degrees": list(self.degrees),
            "d": self.d,
            "field": self.field.to_json(),
            "provenance": self.provenance,
            "seed": None if self.seed is None else str(self.seed),
            "curve": [[_num(c.coeff(k)) for k in range(self.d + 1)] for c in self.curve.components],
            "forms": [
                {"degree": g.degree, "terms": [[list(e), _num(c)] for e, c in sorted(g.terms.items(), reverse=True)]}
                for g in self.spec.forms
            ],
            "points": [[_num(t) for t in g] for g in self.points.points],
            "meta": {k: self.meta[k] for k in sorted(self.meta)},
        }

    @classmethod
    def from_json(cls, doc: dict) -> "WitnessPackage":
        F = field_from_json(doc["field"])
        n, d = int(doc["n"]), int(doc["d"])
        curve = RationalCurve(tuple(UniPoly(tuple(_parse_num(x) for x in comp), F) for comp in doc["curve"]), d)
        forms = tuple(
            HomForm(n + 1, int(f["degree"]), {tuple(e): _parse_num(c) for e, c in f["terms"]}, F) for f in doc["forms"]
        )
        spec = CompleteIntersectionSpec(n, tuple(int(h) for h in doc["degrees"]), forms)
        points = MarkedPointSet(tuple(tuple(F(_parse_num(x)) for x in g) for g in doc["points"]))
        seed = doc.get("seed")
        return cls(spec, curve, points, doc["provenance"], None if seed is None else int(seed), dict(doc.get("meta", {})))


def _num(x) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return str(int(x))


def _parse_num(s):
    s = str(s)
    if "/" in s:
        return Fraction(s)
    return int(s)


# --- random building blocks -------------------------------------------------


def _rint(rng: random.Random, bound: int = COEFF_RANGE, nonzero: bool = False) -> int:
    while True:
        x = rng.randint(-bound, bound)
        if x or not nonzero:
            return x


def random_poly(rng: random.Random, degree: int, bound: int = COEFF_RANGE) -> UniPoly:
    coeffs = [_rint(rng, bound) for _ in range(degree)] + [_rint(rng, bound, nonzero=True)]
    return UniPoly(tuple(coeffs), QQ)


def random_form(rng: random.Random, nvars: int, degree: int, bound: int = COEFF_RANGE) -> HomForm:
    mons = monomials(nvars, degree)
    return HomForm(nvars, degree, {e: _rint(rng, bound) for e in mons}, QQ)


def is_birational(c: RationalCurve, rng: random.Random, tries: int = 3) -> bool:
    """Generic fibre of ``t -> c(t)`` is one point.

    For a random ``t0`` the points with ``c(t) = c(t0)`` are the common zeros
    of the 2x2 minors ``c_i(t)c_j(t0) - c_j(t)c_i(t0)``; birational iff that gcd
    is the single linear factor ``t - t0``.
    """
    comps = c.components
    for _ in range(tries):
        t0 = rng.randint(-POINT_RANGE, POINT_RANGE)
        v = c(t0)
        if all(x == 0 for x in v):
            continue
        minors = [comps[i] * v[j] - comps[j] * v[i] for i in range(len(comps)) for j in range(i + 1, len(comps))]
        return gcd_all([m for m in minors if not m.is_zero()]).degree == 1
    return False


def random_curve(n: int, d: int, rng: random.Random, bound: int = COEFF_RANGE, budget: int = 50) -> RationalCurve:
    """Random gcd-free, birational degree-d curve in P^n with integer coefficients."""
    for _ in range(budget):
        comps = tuple(UniPoly(tuple(_rint(rng, bound) for _ in range(d + 1)), QQ) for _ in range(n + 1))
        try:
            c = RationalCurve(comps, d)
        except CurveError:
            continue
        if d == 1 or is_birational(c, rng):
            return c
    raise ResamplingExhausted("could not draw a valid random curve", None, budget)


def random_points(rng: random.Random, k: int, exclude=()) -> tuple:
    seen = set(exclude)
    out = []
    while len(out) < k:
        t = rng.randint(-POINT_RANGE, POINT_RANGE)
        if t not in seen:
            seen.add(t)
            out.append(t)
    return tuple(out)


def random_marked_points(degrees: Sequence[int], d: int, rng: random.Random, shared: Sequence[Sequence[int]] = ()) -> MarkedPointSet:
    """Independent points per form; forms listed together in ``shared`` reuse one set."""
    groups: list = [None] * len(degrees)
    for cls in shared:
        cls = list(cls)
        ks = {degrees[i] for i in cls}
        if len(ks) != 1:
            raise ValueError("only forms of equal degree can share marked points")
        pts = random_points(rng, degrees[cls[0]] * d + 1)
        for i in cls:
            groups[i] = pts
    for i, h in enumerate(degrees):
        if groups[i] is None:
            groups[i] = random_points(rng, h * d + 1)
    return MarkedPointSet(tuple(groups))


def vanishing_forms(c: RationalCurve, degree: int) -> list[HomForm]:
    """Integer basis of degree-``degree`` forms vanishing on ``c``.

    Columns of the condition matrix are monomials, rows the coefficients of
    ``t^k`` in the composed monomial; the kernel basis is primitive integral.
    """
    mons, M = _condition_matrix(c, degree)
    _, ker = rank_and_kernel(M)
    return [HomForm(c.n + 1, degree, dict(zip(mons, v)), c.field) for v in ker]


def _condition_matrix(c: RationalCurve, degree: int):
    nv = c.n + 1
    mons = monomials(nv, degree)
    cols = []
    for e in mons:
        p = compose_form_with_curve(HomForm._raw(nv, degree, {e: 1}, c.field), c)
        cols.append([p.coeff(k) for k in range(degree * c.degree + 1)])
    return mons, ExactMatrix.from_rows([list(r) for r in zip(*cols)], c.field, ncols=len(mons))


def vanishing_dimension(c: RationalCurve, degree: int) -> int:
    mons, M = _condition_matrix(c, degree)
    return len(mons) - rank(M)


def projected_form_through(c: RationalCurve, degree: int, rng: random.Random, bound: int = POINT_RANGE) -> HomForm:
    """Orthogonal projection of a random integer coefficient vector onto the
    forms vanishing on ``c``, cleared to a primitive integer form.

    Unlike small combinations of an echelon basis this gives a form whose
    coefficients are all of comparable size, which keeps floating point work
    on the resulting variety well conditioned.
    """
    mons, M = _condition_matrix(c, degree)
    Mt = M.transpose()
    for _ in range(8):
        w = [Fraction(rng.randint(-bound, bound)) for _ in mons]
        y = inverse(M @ Mt).apply(M.apply(w)) if M.nrows else []
        v = [a - b for a, b in zip(w, Mt.apply(y))] if M.nrows else w
        den = reduce(lcm, (x.denominator for x in v), 1)
        iv = [int(x * den) for x in v]
        g = reduce(gcd, iv, 0)
        if g:
            return HomForm(c.n + 1, degree, {e: x // g for e, x in zip(mons, iv) if x}, QQ)
    raise WitnessError(f"no degree-{degree} form vanishes on the curve")


def random_form_through(basis: Sequence[HomForm], rng: random.Random, bound: int = COEFF_RANGE) -> HomForm:
    if not basis:
        raise WitnessError("empty linear system")
    acc = None
    while acc is None or acc.is_zero():
        acc = None
        for g in basis:
            a = _rint(rng, bound)
            if a:
                term = g * a
                acc = term if acc is None else acc + term
    return acc


# --- special surfaces in P^3 ------------------------------------------------


def _coprime_pair(rng: random.Random, degree: int) -> tuple[UniPoly, UniPoly]:
    while True:
        if degree == 0:
            return UniPoly.constant(_rint(rng, nonzero=True)), UniPoly.constant(_rint(rng, nonzero=True))
        f0, f1 = random_poly(rng, degree), UniPoly(tuple(_rint(rng) for _ in range(degree + 1)), QQ)
        if not f1.is_zero() and gcd_all([f0, f1]).degree == 0:
            return f0, f1


def _random_unimodular_free(rng: random.Random, size: int) -> list[list[int]]:
    while True:
        A = [[_rint(rng, 3) for _ in range(size)] for _ in range(size)]
        M = ExactMatrix.from_rows(A)
        if rank(M) == size:
            return A


def _adjugate(A: list[list[int]]) -> list[list[int]]:
    from .linalg.matrix import det

    n = len(A)
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[A[r][s] for s in range(n) if s != j] for r in range(n) if r != i]
            cof = det(ExactMatrix.from_rows(minor)) if n > 1 else 1
            adj[j][i] = (-1) ** (i + j) * int(cof)
    return adj


def segre_quadric_curve(d: int, a: int | None = None, seed=None, linear_change: bool = True):
    """Smooth quadric ``z0 z3 - z1 z2`` and a curve of bidegree ``(a, d - a)`` on it.

    Returns ``(g, c)``.  With ``linear_change`` both are moved by a random
    integer change of coordinates ``c -> A c``, ``g -> g(adj(A) z)``.
    """
    if d < 1:
        raise ValueError("degree must be positive")
    if a is None:
        a = 1
    if not 1 <= a <= max(1, d - 1):
        raise ValueError(f"bidegree split a={a} out of range for d={d}")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    z = variables(4)
    g = z[0] * z[3] - z[1] * z[2]
    for _ in range(50):
        f0, f1 = _coprime_pair(rng, a)
        q0, q1 = _coprime_pair(rng, d - a)
        comps = [f0 * q0, f0 * q1, f1 * q0, f1 * q1]
        if linear_change:
            A = _random_unimodular_free(rng, 4)
            comps = [sum((p * A[i][j] for j, p in enumerate(comps)), UniPoly.zero()) for i in range(4)]
            gg = g.linear_substitute(_adjugate(A))
        else:
            gg = g
        try:
            c = RationalCurve(tuple(comps), d)
        except CurveError:
            continue
        if (d == 1 or is_birational(c, rng)) and compose_form_with_curve(gg, c).is_zero():
            return gg, c
    raise ResamplingExhausted("segre curve sampling failed", seed, 50)


def quartic_surface_curve(d: int, seed=None, budget: int = 20, prime: int = DEFAULT_PRIME):
    """Random degree-d curve in P^3 and a random quartic containing it.

    The pair is accepted once the ``4d x 4(d+1)`` Jacobian of the quartic at
    ``4d`` random points has rank ``4d``.  Returns ``(g, c, points)``.
    """
    if not 1 <= d <= QUARTIC_MAX_DEGREE:
        raise WitnessUnavailable(f"quartic construction needs 1 <= d <= {QUARTIC_MAX_DEGREE}, got d={d}")
    from .incidence import jacobian_matrix

    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    F = PrimeField(prime, check=False)
    for attempt in range(budget):
        c = random_curve(3, d, rng)
        g = projected_form_through(c, 4, rng)
        pts = random_points(rng, 4 * d)
        J = jacobian_matrix([g.with_field(F)], c.with_field(F), [[F(t) for t in pts]])
        if rank(J) == 4 * d:
            return g, c, pts
    raise ResamplingExhausted("no quartic with full-rank Jacobian", seed, budget)


# --- paper constructions ---------------------------------------------------


def _balance(g: HomForm, other: int) -> int:
    # power of two bringing a small-coefficient summand to the size of g
    top = max(abs(int(v)) for v in g.terms.values())
    return 2 ** max(0, top.bit_length() - other.bit_length())


def _paper_forms(degs, d, rng, a):
    """Forms and curve for the special complete intersection of type ``degs``.

    ``alpha`` only involves z0..z3, which keeps the zero blocks of the
    Jacobian where the gluing layouts expect them.
    """
    if degs in ((4, 2), (5,)):
        g, c, pts4 = quartic_surface_curve(d, rng)
    else:
        g, c = segre_quadric_curve(d, a, rng)
        pts4 = None
    if degs == (2, 2, 2, 2):
        n = 7
        z = variables(8)
        forms = (
            g.rename([0, 1, 2, 3], 8),
            g.rename([4, 5, 2, 3], 8),
            g.rename([0, 1, 6, 7], 8),
            z[6] ** 2 + z[7] ** 2 - z[2] ** 2 - z[3] ** 2,
        )
        cg = c.extend(EXTENSION_PATTERNS[degs])
    elif degs == (3, 2, 2):
        n = 6
        z = variables(7)
        alpha = random_form(rng, 4, 2).rename([0, 1, 2, 3], 7)
        forms = (
            z[0] * g.rename([0, 1, 2, 3], 7) + (z[0] - z[4]) * alpha,
            g.rename([4, 5, 2, 3], 7),
            g.rename([4, 5, 6, 3], 7),
        )
        cg = c.extend(EXTENSION_PATTERNS[degs])
    elif degs == (3, 3):
        n = 5
        z = variables(6)
        alpha = random_form(rng, 4, 2).rename([0, 1, 2, 3], 6)
        forms = (
            z[0] * g.rename([0, 1, 2, 3], 6) + (z[0] - z[5]) * alpha,
            z[0] * g.rename([5, 4, 2, 3], 6) + (z[1] - z[4]) * alpha,
        )
        cg = c.extend(EXTENSION_PATTERNS[degs])
    elif degs == (4, 2):
        n = 5
        z = variables(6)
        forms = (g.rename([0, 1, 2, 3], 6) + z[0] ** 3 * z[4] * _balance(g, 1), z[0] * z[4] + z[1] * z[5])
        cg = c.extend(EXTENSION_PATTERNS[degs])
    else:
        n = 4
        z = variables(5)
        lin = random_form(rng, 5, 1)
        q = random_form(rng, 5, 4)
        forms = (lin * g.rename([0, 1, 2, 3], 5) + q * z[4] * _balance(g, COEFF_RANGE),)
        cg = c.extend(EXTENSION_PATTERNS[degs])
    return n, forms, cg, pts4, g


EXTENSION_PATTERNS = {
    (2, 2, 2, 2): (0, 1, 2, 3, 0, 1, 2, 3),
    (3, 2, 2): (0, 1, 2, 3, 0, 1, 2),
    (3, 3): (0, 1, 2, 3, 1, 0),
    (4, 2): (0, 1, 2, 3, None, None),
    (5,): (0, 1, 2, 3, None),
}

SHARED_POINT_LAYOUTS = {(3, 3): [[0, 1]], (3, 2, 2): [[1, 2]]}


def build_witness(degs, d: int, seed=None, shared_points: bool = False, a: int | None = None,
                  budget: int = 8, certify: bool = True, prime: int = DEFAULT_PRIME) -> WitnessPackage:
    """Special complete intersection of the given type containing a degree-d curve.

    With ``certify`` the package is redrawn until the top-level Jacobian has
    full rank modulo ``prime``; the number of draws lands in ``meta``.
    """
    degs = parse_type(degs)
    if d < 1:
        raise ValueError("degree must be positive")
    if degs in ((4, 2), (5,)) and d > QUARTIC_MAX_DEGREE:
        raise WitnessUnavailable(
            f"paper-mode witness for type ({type_label(degs)}) needs a quartic surface curve, available for d <= {QUARTIC_MAX_DEGREE}"
        )
    rng = random.Random(seed)
    shared = SHARED_POINT_LAYOUTS.get(degs, []) if shared_points else []
    for attempt in range(1, budget + 1):
        n, forms, cg, pts4, base = _paper_forms(degs, d, rng, a)
        spec = CompleteIntersectionSpec(n, degs, forms)
        pts = random_marked_points(degs, d, rng, shared)
        if pts4 is not None and degs == (4, 2):
            extra = random_points(rng, 1, exclude=pts4)
            pts = MarkedPointSet((pts4 + extra,) + pts.points[1:])
        meta = {"attempts": attempt, "shared_points": bool(shared_points), "type": type_label(degs),
                "base_surface": [[list(e), _num(v)] for e, v in sorted(base.terms.items(), reverse=True)],
                "extension_pattern": list(EXTENSION_PATTERNS[degs])}
        if degs not in ((4, 2), (5,)):
            meta["bidegree"] = [a or 1, d - (a or 1)]
        pkg = WitnessPackage(spec, cg, pts, "paper", seed, meta)
        if not pkg.is_incident():
            raise WitnessError("construction bug: forms do not vanish on the witness curve")
        if not certify or _top_rank_ok(pkg, prime):
            return pkg
    raise ResamplingExhausted(f"no full-rank paper witness of type ({type_label(degs)}), d={d}", seed, budget)


def _top_rank_ok(pkg: WitnessPackage, prime: int) -> bool:
    from .incidence import build_jacobian

    F = PrimeField(prime, check=False)
    J = build_jacobian(pkg.with_field(F), pkg.spec.r)
    return rank(J.matrix) == J.expected_rank


def random_ci_through_curve(n: int, degrees: Sequence[int], d: int, seed=None, budget: int = 8,
                            smooth_samples: int | None = None, prime: int = DEFAULT_PRIME) -> WitnessPackage:
    """Random forms of the given degrees through a random degree-d curve."""
    degrees = tuple(int(h) for h in degrees)
    CompleteIntersectionSpec(n, degrees, tuple(HomForm(n + 1, h, {}, QQ) for h in degrees))
    from math import comb

    for h in degrees:
        if comb(n + h, h) - (h * d + 1) < 1:
            raise WitnessError(f"no degree-{h} forms contain a degree-{d} curve in P^{n}")
    rng = random.Random(seed)
    s = smooth_samples or 2 * d + 1
    for attempt in range(1, budget + 1):
        c = random_curve(n, d, rng)
        dims = {h: vanishing_dimension(c, h) for h in set(degrees)}
        forms = tuple(projected_form_through(c, h, rng) for h in degrees)
        pts = random_marked_points(degrees, d, rng)
        meta = {"attempts": attempt, "type": type_label(degrees), "system_dims": {str(h): k for h, k in sorted(dims.items())}}
        pkg = WitnessPackage(CompleteIntersectionSpec(n, degrees, forms), c, pts, "random", seed, meta)
        if not pkg.is_incident():
            raise WitnessError("construction bug: random forms do not vanish on the curve")
        if smoothness_along_curve(pkg, s, seed=rng, prime=prime)["passed"]:
            return pkg
    raise ResamplingExhausted("smoothness spot-check kept failing", seed, budget)


def smoothness_along_curve(pkg: WitnessPackage, samples: int, seed=None, prime: int = DEFAULT_PRIME) -> dict:
    """Rank of ``[dg_i/dz_j (c(t))]`` at random points, over GF(prime)."""
    if samples < 2 * pkg.d + 1:
        raise ValueError("need at least 2d+1 sample points")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    F = PrimeField(prime, check=False)
    pk = pkg.with_field(F) if pkg.field != F else pkg
    grads = [g.gradient() for g in pk.spec.forms]
    r = pk.spec.r
    per_point = []
    for t in random_points(rng, samples):
        pt = pk.curve(F(t))
        M = ExactMatrix._raw([[dg(pt) for dg in row] for row in grads], pk.n + 1, F)
        per_point.append({"t": str(t), "rank": rank(M)})
    return {
        "samples": samples,
        "expected_rank": r,
        "points": per_point,
        "passed": all(p["rank"] == r for p in per_point),
    }


def _poly_det(M):
    if len(M) == 1:
        return M[0][0]
    acc = None
    for j, a in enumerate(M[0]):
        if a.is_zero():
            continue
        term = a * _poly_det([row[:j] + row[j + 1:] for row in M[1:]])
        term = term if j % 2 == 0 else -term
        acc = term if acc is None else acc + term
    return acc if acc is not None else M[0][0] * 0


def singular_points_on_curve(pkg: WitnessPackage, prime: int = DEFAULT_PRIME) -> dict:
    """Where the gradients of the forms become dependent along the curve.

    The maximal minors of ``[dg_i/dz_j (c(t))]`` are polynomials of degree at
    most ``sum (h_i - 1) d``; their gcd has the affine singular points as
    roots, and a uniform drop of the top degree signals ``t = infinity``.
    Unlike sampling, this sees every point of the curve.
    """
    from itertools import combinations

    F = PrimeField(prime, check=False)
    pk = pkg.with_field(F) if pkg.field != F else pkg
    P = [[compose_form_with_curve(dg, pk.curve) for dg in g.gradient()] for g in pk.spec.forms]
    r, nv = pk.spec.r, pk.n + 1
    bound = sum(h - 1 for h in pk.degrees) * pk.d
    g = None
    top = -1
    for cols in combinations(range(nv), r):
        m = _poly_det([[row[j] for j in cols] for row in P])
        if m.is_zero():
            continue
        top = max(top, m.degree)
        g = m if g is None else gcd_all([g, m])
        if g.degree == 0 and top == bound:
            break
    if g is None:
        return {"rank_drops_everywhere": True, "affine_degree": None, "infinity_order": None, "smooth": False}
    return {"rank_drops_everywhere": False, "affine_degree": g.degree, "infinity_order": bound - top,
            "smooth": g.degree == 0 and top == bound}


def surface_containment(pkg: WitnessPackage) -> dict | None:
    """Whether ``X`` contains the surface swept by the extension pattern.

    The pattern embeds ``P^3 -> P^n``; the image of ``div(g)`` lies in ``X``
    iff every ``g_i`` pulled back along that embedding is a multiple of ``g``.
    A curve moving inside such a surface is not rigid in ``X`` unless it is
    rigid in the surface, so this explains extra kernel of ``J_r``.
    """
    if "base_surface" not in pkg.meta:
        return None
    F = pkg.field
    terms = {tuple(e): _parse_num(c) for e, c in pkg.meta["base_surface"]}
    g = HomForm(4, sum(next(iter(terms))), terms, QQ).with_field(F)
    pattern = pkg.meta["extension_pattern"]
    rows = [[int(j == p) for j in range(4)] if p is not None else [0] * 4 for p in pattern]
    per_form = []
    for gi in pkg.spec.forms:
        pulled = gi.linear_substitute(rows)
        _, rem = divide_form(pulled, g)
        per_form.append(rem.is_zero())
    return {"surface_degree": g.degree, "pattern": list(pattern), "per_form": per_form, "contained": all(per_form)}


def package_for(degs, d: int, mode: str, seed=None, **kw) -> WitnessPackage:
    degs = parse_type(degs)
    if mode == "paper":
        return build_witness(degs, d, seed, **kw)
    if mode == "random":
        return random_ci_through_curve(sum(degs) - 1, degs, d, seed)
    raise ValueError(f"unknown mode {mode!r}")
