"""Jacobians of incidence schemes and their rank certificates.

Level ``l`` uses the forms ``g_1..g_l``.  The rows of ``J_l`` are grouped by
form and, within a form, by marked point; column ``j*(d+1) + k`` is the
coefficient of ``t^k`` in the ``j``-th component of the curve.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .algebra.fields import DEFAULT_PRIME, QQ, PrimeField, random_prime
from .algebra.poly import RationalCurve, UniPoly, jacobian_row
from .linalg.lemmas import LAYOUTS, LayoutError, LemmaReport, check_block_gluing
from .linalg.matrix import ExactMatrix, rank, rank_and_kernel, rref
from .witnesses import MarkedPointSet, WitnessPackage, random_marked_points


class IncidenceError(ValueError):
    pass


def jacobian_matrix(forms, curve: RationalCurve, point_groups) -> ExactMatrix:
    F = curve.field
    rows = []
    for g, pts in zip(forms, point_groups):
        grad = g.gradient()
        rows.extend(jacobian_row(g, curve, F(t), grad) for t in pts)
    return ExactMatrix._raw(rows, (curve.n + 1) * (curve.degree + 1), F)


@dataclass(frozen=True, eq=False)
class IncidenceJacobian:
    level: int
    matrix: ExactMatrix
    row_labels: tuple  # (form index, point index), both 0-based
    package: WitnessPackage

    @property
    def expected_rank(self) -> int:
        d = self.package.d
        return sum(h * d + 1 for h in self.package.degrees[: self.level])

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def build_jacobian(pkg: WitnessPackage, level: int) -> IncidenceJacobian:
    r = pkg.spec.r
    if not 0 <= level <= r:
        raise IncidenceError(f"level must lie in 0..{r}")
    if len(pkg.points) < level:
        raise IncidenceError("marked points missing")
    forms = pkg.spec.forms[:level]
    M = jacobian_matrix(forms, pkg.curve, pkg.points.points[:level])
    labels = tuple((i, j) for i in range(level) for j in range(len(pkg.points[i])))
    return IncidenceJacobian(level, M, labels, pkg)


@dataclass
class RankCertificate:
    level: int
    rank: int
    expected_rank: int
    kernel_dim: int
    field: str
    seed: object
    passed: bool
    top_level: bool = False
    incident: bool = True

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "rank": self.rank,
            "expected_rank": self.expected_rank,
            "kernel_dim": self.kernel_dim,
            "field": self.field,
            "seed": None if self.seed is None else str(self.seed),
            "passed": self.passed,
            "top_level": self.top_level,
            "incident": self.incident,
        }


TOP_KERNEL_DIM = 4


def certify_full_rank(J: IncidenceJacobian) -> RankCertificate:
    pkg = J.package
    rk = rank(J.matrix)
    ker = J.matrix.ncols - rk
    top = J.level == pkg.spec.r
    ok = rk == J.expected_rank and (not top or ker == TOP_KERNEL_DIM)
    return RankCertificate(J.level, rk, J.expected_rank, ker, pkg.field.to_json(), pkg.seed, ok, top, pkg.is_incident())


def certify_over(pkg: WitnessPackage, level: int, field) -> RankCertificate:
    return certify_full_rank(build_jacobian(pkg.with_field(field), level))


def certify_multi_prime(pkg: WitnessPackage, primes: Sequence[int], level: int | None = None) -> list[RankCertificate]:
    level = pkg.spec.r if level is None else level
    return [certify_over(pkg, level, PrimeField(p, check=False)) for p in primes]


def rational_crosscheck(pkg: WitnessPackage, prime: int, level: int | None = None, rng=None, retries: int = 3) -> dict:
    """Compare the rank over QQ with the rank modulo ``prime``.

    A smaller modular rank, or marked points that collide modulo the prime,
    marks it as unlucky; it is replaced by a fresh random prime up to
    ``retries`` times.
    """
    level = pkg.spec.r if level is None else level
    q_rank = certify_over(pkg, level, QQ).rank
    rng = rng or random.Random(prime)
    tried = []
    p = prime
    for _ in range(retries + 1):
        try:
            p_rank = certify_over(pkg, level, PrimeField(p, check=False)).rank
        except ValueError:
            # marked points collide modulo p
            tried.append({"prime": str(p), "rank": None})
            p = random_prime(rng)
            continue
        tried.append({"prime": str(p), "rank": p_rank})
        if p_rank == q_rank:
            return {"rational_rank": q_rank, "primes": tried, "agree": True}
        if p_rank > q_rank:
            raise IncidenceError("modular rank exceeds rational rank: arithmetic bug")
        p = random_prime(rng)
    return {"rational_rank": q_rank, "primes": tried, "agree": False}


def kernel_dimension_profile(pkg: WitnessPackage, field=None) -> dict:
    """Kernel dimensions of ``J_0, ..., J_r`` and the drop at each step."""
    F = field or PrimeField(DEFAULT_PRIME, check=False)
    pk = pkg.with_field(F) if pkg.field != F else pkg
    d = pk.d
    ncols = (pk.n + 1) * (d + 1)
    dims = [ncols]
    for level in range(1, pk.spec.r + 1):
        J = build_jacobian(pk, level)
        dims.append(ncols - rank(J.matrix))
    entries = []
    ok = True
    for level in range(pk.spec.r + 1):
        e = {"level": level, "kernel_dim": dims[level]}
        if level:
            want = pk.degrees[level - 1] * d + 1
            e["drop"] = dims[level - 1] - dims[level]
            e["expected_drop"] = want
            ok = ok and e["drop"] == want
        entries.append(e)
    ok = ok and dims[-1] == TOP_KERNEL_DIM
    return {"profile": entries, "kernel_dims": dims, "passed": ok, "field": F.to_json()}


def select_independent_coordinates(J: IncidenceJacobian, partition: Sequence[int] | None = None) -> dict:
    """Choose columns ``c_ind`` with a non-degenerate square block of ``J``.

    Without ``partition`` the pivot columns of the reduced echelon form are
    taken, which is greedy left-to-right selection with exact rank updates.
    With ``partition`` (a list of ``c_ind`` columns) that choice is validated.
    """
    M = J.matrix
    ncols = M.ncols
    if partition is None:
        _, pivots = rref(M)
        if len(pivots) != M.nrows:
            raise IncidenceError("Jacobian does not have full row rank")
        ind = list(pivots)
    else:
        ind = sorted(set(int(c) for c in partition))
        if len(ind) != M.nrows or any(not 0 <= c < ncols for c in ind):
            raise IncidenceError(f"partition needs {M.nrows} distinct columns in 0..{ncols - 1}")
    square = M.submatrix(None, ind)
    ok = rank(square) == M.nrows
    pivset = set(ind)
    return {"c_ind": ind, "c_free": [c for c in range(ncols) if c not in pivset], "nondegenerate": ok}


def paper_partition(pkg: WitnessPackage) -> list[int] | None:
    """``c_ind`` for the (2,2,2,2) witness.

    Components 2, 4, 6, 8 (1-based) contribute all coefficients, components
    1, 3, 5, 7 only those vanishing at ``t = 0``; the free coordinates are the
    four constant terms of the odd-numbered components.
    """
    if tuple(pkg.degrees) != (2, 2, 2, 2):
        return None
    w = pkg.d + 1
    free = {0, 2 * w, 4 * w, 6 * w}
    return [c for c in range(8 * w) if c not in free]


def orbit_tangent_vectors(c: RationalCurve) -> list[list]:
    """Infinitesimal reparametrisations ``t -> t + e``, ``t -> (1+e) t``,
    ``t -> t / (1 - e t)`` and the scaling of ``c``, as coefficient vectors."""
    d = c.degree
    F = c.field
    tpoly = UniPoly.t(F)
    dc = c.derivative()
    fields = [
        list(dc),
        [tpoly * p for p in dc],
        [tpoly * tpoly * p - tpoly * c_j * d for p, c_j in zip(dc, c.components)],
        list(c.components),
    ]
    out = []
    for comps in fields:
        if any(p.degree > d for p in comps):
            raise IncidenceError("orbit vector left the degree bound")
        out.append([p.coeff(k) for p in comps for k in range(d + 1)])
    return out


def verify_orbit_kernel(J: IncidenceJacobian) -> dict:
    vecs = orbit_tangent_vectors(J.package.curve)
    M = J.matrix
    in_kernel = [all(x == 0 for x in M.apply(v)) for v in vecs]
    independent = rank(ExactMatrix.from_rows(vecs, M.field)) == len(vecs)
    kernel_dim = M.ncols - rank(M)
    return {
        "in_kernel": in_kernel,
        "independent": independent,
        "kernel_dim": kernel_dim,
        "kernel_equals_orbit": all(in_kernel) and independent and kernel_dim == len(vecs),
    }


def rerandomized_points(pkg: WitnessPackage, seed) -> WitnessPackage:
    rng = random.Random(seed)
    shared = pkg.meta.get("shared_points", False)
    from .witnesses import SHARED_POINT_LAYOUTS

    layout = SHARED_POINT_LAYOUTS.get(tuple(pkg.degrees), []) if shared else []
    pts = random_marked_points(pkg.degrees, pkg.d, rng, layout)
    if pkg.field != QQ:
        pts = pts.with_field(pkg.field)
    return pkg.with_points(pts)


# --- block structure of the witnesses --------------------------------------

WITNESS_LAYOUT = {(3, 3): "A4", (3, 2, 2): "A5", (2, 2, 2, 2): "A6"}


def _column_groups(pkg: WitnessPackage, layout: str) -> list[list[int]]:
    w = pkg.d + 1
    if layout == "A6":
        # (theta_{2k}, theta_{2k+1}): component 2k without its constant term, all of 2k+1
        return [list(range(2 * k * w + 1, (2 * k + 1) * w)) + list(range((2 * k + 1) * w, (2 * k + 2) * w)) for k in range(4)]
    return [list(range(j * w, (j + 1) * w)) for j in range(pkg.n + 1)]


def extract_blocks(J: IncidenceJacobian, layout: str) -> tuple[dict, list[str]]:
    """All blocks ``B_ij`` of ``J`` plus the names of nonzero blocks the layout declares zero."""
    pkg = J.package
    cols = _column_groups(pkg, layout)
    starts = [0]
    for i in range(J.level):
        starts.append(starts[-1] + len(pkg.points[i]))
    blocks = {}
    for i in range(J.level):
        rows = range(starts[i], starts[i + 1])
        for j, cg in enumerate(cols):
            blocks[f"B{i + 1}{j + 1}"] = J.matrix.submatrix(rows, cg)
    declared = {n for row in LAYOUTS[layout] for n in row if n}
    violations = sorted(n for n, B in blocks.items() if n not in declared and not B.is_zero())
    return blocks, violations


def witness_gluing_report(pkg: WitnessPackage, field=None) -> dict:
    """Apply the matching gluing lemma to the top Jacobian of a paper witness."""
    layout = WITNESS_LAYOUT.get(tuple(pkg.degrees))
    if layout is None:
        return {"layout": None, "applicable": False}
    F = field or PrimeField(DEFAULT_PRIME, check=False)
    pk = pkg.with_field(F) if pkg.field != F else pkg
    J = build_jacobian(pk, pk.spec.r)
    if layout == "A6":
        sel = select_independent_coordinates(J, paper_partition(pk))
        sub = J.matrix.submatrix(None, sel["c_ind"])
        J = IncidenceJacobian(J.level, sub, J.row_labels, pk)
        blocks, violations = _blocks_on_partition(J, pk)
    else:
        blocks, violations = extract_blocks(J, layout)
    out = {"layout": layout, "field": F.to_json(), "zero_pattern_violations": violations, "jacobian_rank": rank(J.matrix),
           "jacobian_rows": J.matrix.nrows}
    if violations:
        out["applicable"] = False
        return out
    rep: LemmaReport = check_block_gluing(J.matrix, layout, blocks)
    out["applicable"] = True
    out["report"] = rep.to_dict()
    return out


def _blocks_on_partition(J: IncidenceJacobian, pkg: WitnessPackage):
    """Blocks of the square ``J_ind`` for the (2,2,2,2) partition."""
    k = 2 * pkg.d + 1
    blocks = {}
    for i in range(4):
        for j in range(4):
            blocks[f"B{i + 1}{j + 1}"] = J.matrix.submatrix(range(i * k, (i + 1) * k), range(j * k, (j + 1) * k))
    declared = {n for row in LAYOUTS["A6"] for n in row if n}
    violations = sorted(n for n, B in blocks.items() if n not in declared and not B.is_zero())
    return blocks, violations
