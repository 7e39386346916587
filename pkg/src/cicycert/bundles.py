"""Splitting types of pulled-back tangent bundles from section counts.

For a rational curve ``c`` and the level ``X_s`` cut out by ``g_1..g_s``,
``h^0(c*T_{X_s}(k))`` is an exact kernel dimension:

* ``k >= -1``: Euler presentation.  Sections are tuples ``v`` of degree
  ``d+k`` polynomials modulo ``lambda * c`` (``deg lambda = k``) with
  ``sum_j (dg_i/dz_j)(c) v_j = 0`` for every ``i <= s``.
* ``k = -m < 0``: sections of the untwisted bundle vanishing to order ``m``
  at ``t = 0``, i.e. ``v = mu * c (mod t^m)`` for some ``mu``.

The splitting type is then read off the jumps of ``k -> h^0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebra.fields import DEFAULT_PRIME, QQ, PrimeField
from .algebra.poly import RationalCurve, UniPoly, compose_form_with_curve, gcd_all, squarefree_decomposition
from .linalg.matrix import ExactMatrix, rank
from .witnesses import WitnessPackage


class BundleError(ValueError):
    pass


@dataclass(frozen=True)
class SplittingType:
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(sorted((int(a) for a in self.parts), reverse=True)))

    @property
    def rank(self) -> int:
        return len(self.parts)

    @property
    def degree(self) -> int:
        return sum(self.parts)

    def h0(self, k: int = 0) -> int:
        return sum(max(0, a + k + 1) for a in self.parts)

    def is_free(self) -> bool:
        return min(self.parts, default=0) >= 0

    def is_unobstructed(self) -> bool:
        return min(self.parts, default=0) >= -1

    def remove(self, a: int) -> "SplittingType":
        parts = list(self.parts)
        if a not in parts:
            raise BundleError(f"summand O({a}) not present in {self}")
        parts.remove(a)
        return SplittingType(tuple(parts))

    def to_list(self) -> list[int]:
        return list(self.parts)

    def __str__(self) -> str:
        return "{" + ", ".join(str(a) for a in self.parts) + "}"


def _pkg_in(pkg: WitnessPackage, field) -> WitnessPackage:
    if field is None and isinstance(pkg.field, PrimeField):
        # already reduced; converting residues to another prime is meaningless
        return pkg
    F = field or PrimeField(DEFAULT_PRIME, check=False)
    return pkg.with_field(F) if pkg.field != F else pkg


def _partials_along(pkg: WitnessPackage, s: int) -> list[list[UniPoly]]:
    out = []
    for g in pkg.spec.forms[:s]:
        out.append([compose_form_with_curve(dg, pkg.curve) for dg in g.gradient()])
    return out


def _condition_rows(P: list[list[UniPoly]], degrees: Sequence[int], d: int, vdeg: int, offset: int, ncols: int, F) -> list[list]:
    """Rows of ``v -> (sum_j P_ij v_j)_i`` for ``v_j`` of degree ``vdeg``."""
    w = vdeg + 1
    rows = []
    for Pi, h in zip(P, degrees):
        top = h * d + (vdeg - d)
        for r in range(top + 1):
            row = [0] * ncols
            for j, p in enumerate(Pi):
                if p.is_zero():
                    continue
                for l in range(max(0, r - p.degree), min(vdeg, r) + 1):
                    row[offset + j * w + l] = p.coeffs[r - l]
            rows.append(row)
    return rows


def twisted_section_dim(pkg: WitnessPackage, s: int, k: int, field=None, _cache: dict | None = None) -> int:
    """``h^0(c*T_{X_s}(k))`` over ``field`` (default: the default prime).

    Modulo a prime the value can only overshoot the rational one, and only on
    a Schwartz-Zippel exceptional set; pass ``QQ`` for the exact value.
    """
    if not 0 <= s <= pkg.spec.r:
        raise BundleError(f"number of forms must lie in 0..{pkg.spec.r}")
    pk = _pkg_in(pkg, field)
    F = pk.field
    c = pk.curve
    d, nv = c.degree, c.n + 1
    if k < -(2 * d + 2) - 64:
        raise BundleError("twist far below any meaningful window")
    P = _cache.get(s) if _cache is not None else None
    if P is None:
        P = _partials_along(pk, s)
        if _cache is not None:
            _cache[s] = P
    degs = pk.degrees[:s]
    if k >= -1:
        vdeg = d + k
        ncols = nv * (vdeg + 1)
        rows = _condition_rows(P, degs, d, vdeg, 0, ncols, F)
        kern = ncols - rank(ExactMatrix._raw(rows, ncols, F)) if rows else ncols
        return kern - (k + 1)
    m = -k
    # unknowns: v (degree d) then mu_0..mu_{m-1}
    w = d + 1
    ncols = nv * w + m
    rows = _condition_rows(P, degs, d, d, 0, ncols, F)
    red = F.reduce
    for j, cj in enumerate(c.components):
        for e in range(m):
            row = [0] * ncols
            if e <= d:
                row[j * w + e] = 1
            for a in range(e + 1):
                coef = cj.coeff(e - a)
                if coef:
                    row[nv * w + a] = red(-coef)
            rows.append(row)
    kern = ncols - rank(ExactMatrix._raw(rows, ncols, F))
    return kern - 1


def level_rank(pkg: WitnessPackage, s: int) -> int:
    return pkg.n - s


def expected_degree(pkg: WitnessPackage, s: int) -> int:
    return pkg.d * (pkg.n + 1 - sum(pkg.degrees[:s]))


def twist_profile(pkg: WitnessPackage, s: int, field=None, max_twist: int | None = None) -> dict:
    """``h^0`` over a window grown from ``-(2d+1)`` until the jump equals the rank."""
    pk = _pkg_in(pkg, field)
    d = pk.d
    rk = level_rank(pk, s)
    deg = expected_degree(pk, s)
    lo = -(2 * d + 1)
    hi_cap = max_twist if max_twist is not None else max(2, (rk - 1) * 2 * d - deg + 1)
    cache: dict = {}
    dims = {lo - 1: twisted_section_dim(pk, s, lo - 1, _cache=cache), lo: twisted_section_dim(pk, s, lo, _cache=cache)}
    k = lo
    while dims[k] - dims[k - 1] < rk:
        if k >= hi_cap:
            raise BundleError(f"twist window exhausted at k={k} without reaching rank {rk}")
        k += 1
        dims[k] = twisted_section_dim(pk, s, k, _cache=cache)
    jumps = [dims[j] - dims[j - 1] for j in range(lo, k + 1)]
    monotone = all(a <= b for a, b in zip(jumps, jumps[1:])) and all(0 <= j <= rk for j in jumps)
    return {"dims": dims, "low": lo - 1, "high": k, "rank": rk, "monotone": monotone, "field": pk.field.to_json()}


def splitting_from_dims(dims: dict, rk: int) -> SplittingType:
    """Invert ``h^0(E(k)) = sum max(0, a_i + k + 1)``: ``#{a_i >= j}`` is ``h0(-j) - h0(-j-1)``."""
    ks = sorted(dims)
    lo, hi = ks[0], ks[-1]
    if dims[lo] != 0:
        raise BundleError("window does not start where all sections vanish")
    counts = {}
    for k in ks[1:]:
        counts[-k] = dims[k] - dims[k - 1]
    parts = []
    for j in sorted(counts, reverse=True):
        at_least = counts[j]
        above = counts.get(j + 1, 0)
        if at_least < above:
            raise BundleError("section counts are not those of a split bundle")
        parts.extend([j] * (at_least - above))
    if len(parts) != rk:
        raise BundleError(f"reconstructed {len(parts)} summands, expected rank {rk}")
    E = SplittingType(tuple(parts))
    if any(E.h0(k) != v for k, v in dims.items()):
        raise BundleError("reconstruction does not reproduce the measured dimensions")
    return E


def splitting_type(pkg: WitnessPackage, s: int, field=None) -> SplittingType:
    prof = twist_profile(pkg, s, field)
    return splitting_from_dims(prof["dims"], prof["rank"])


def splitting_report(pkg: WitnessPackage, s: int, field=None) -> dict:
    prof = twist_profile(pkg, s, field)
    E = splitting_from_dims(prof["dims"], prof["rank"])
    deg_ok = E.degree == expected_degree(pkg, s)
    return {
        "level": s,
        "splitting": E.to_list(),
        "degree": E.degree,
        "expected_degree": expected_degree(pkg, s),
        "degree_ok": deg_ok,
        "monotone": prof["monotone"],
        "h0": {str(k): v for k, v in sorted(prof["dims"].items())},
        "free": E.is_free(),
        "unobstructed": E.is_unobstructed(),
        "field": prof["field"],
        "passed": deg_ok and prof["monotone"],
    }


def is_free(pkg: WitnessPackage, s: int, field=None) -> bool:
    return splitting_type(pkg, s, field).is_free()


def is_unobstructed(pkg: WitnessPackage, s: int, field=None) -> bool:
    return splitting_type(pkg, s, field).is_unobstructed()


# --- immersion -------------------------------------------------------------


@dataclass(frozen=True)
class ImmersionDefect:
    m: int
    support: tuple  # (factor coefficients, multiplicity); "inf" for the point at infinity

    def __post_init__(self):
        total = sum(mult * (1 if f == "inf" else len(f) - 1) for f, mult in self.support)
        if total != self.m:
            raise BundleError("defect does not equal the sum of local multiplicities")

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "support": [
                {"factor": f if f == "inf" else [str(x) for x in f], "multiplicity": mult} for f, mult in self.support
            ],
        }


def _minors(c: RationalCurve) -> list[UniPoly]:
    comps = c.components
    der = c.derivative()
    out = []
    for i in range(len(comps)):
        for j in range(i + 1, len(comps)):
            m = comps[i] * der[j] - comps[j] * der[i]
            if not m.is_zero():
                out.append(m)
    return out


def immersion_defect(c: RationalCurve) -> ImmersionDefect:
    """Total vanishing order of the differential of ``c`` on ``P^1``.

    The 2x2 minors of ``(c, c')`` are sections of ``O(2d-2)``; their common
    zeros in the chart are the roots of the gcd, and the order at infinity is
    ``2d - 2`` minus the largest minor degree.
    """
    if all(p.is_zero() for p in c.components):
        raise BundleError("zero curve")
    d = c.degree
    minors = _minors(c)
    if not minors:
        raise BundleError("constant map: the differential vanishes identically")
    G = gcd_all(minors)
    at_inf = 2 * d - 2 - max(p.degree for p in minors)
    support = []
    if G.degree > 0:
        for f, mult in squarefree_decomposition(G.monic()):
            support.append((tuple(f.coeffs), mult))
    if at_inf:
        support.append(("inf", at_inf))
    return ImmersionDefect(G.degree + at_inf, tuple(support))


def mobius_reparametrize(c: RationalCurve, abcd: Sequence[int]) -> RationalCurve:
    """``(gamma t + delta)^d c((alpha t + beta) / (gamma t + delta))``."""
    a, b, g, dl = (Fraction(x) if not isinstance(x, int) else x for x in abcd)
    if a * dl - b * g == 0:
        raise BundleError("Moebius map is degenerate")
    F = c.field
    d = c.degree
    num = UniPoly((b, a), F)
    den = UniPoly((dl, g), F)
    num_pows = [UniPoly.constant(1, F)]
    den_pows = [UniPoly.constant(1, F)]
    for _ in range(d):
        num_pows.append(num_pows[-1] * num)
        den_pows.append(den_pows[-1] * den)
    comps = []
    for p in c.components:
        acc = UniPoly.zero(F)
        for k in range(d + 1):
            ck = p.coeff(k)
            if ck:
                acc = acc + num_pows[k] * den_pows[d - k] * ck
        comps.append(acc)
    return RationalCurve(tuple(comps), d)


# --- normal bundle ---------------------------------------------------------


def normal_bundle_type(pkg: WitnessPackage, field=None, tangent: SplittingType | None = None) -> dict:
    """``N = c*T_X / T_C`` at the top level, with the rigidity verdict."""
    defect = immersion_defect(pkg.curve)
    r = pkg.spec.r
    out = {"immersion_defect": defect.to_dict()}
    E = tangent or splitting_type(pkg, r, field)
    out["tangent_splitting"] = E.to_list()
    if defect.m > 0:
        m = defect.m
        dim = twisted_section_dim(pkg, r, -m, field)
        out.update({"error": "immersion defect is positive; the normal sheaf is not the naive quotient",
                    "twisted_h0": {"k": -m, "value": dim, "expected_if_rigid": 3 - m}, "normal_splitting": None,
                    "verdict": "FAIL", "passed": False})
        return out
    if 2 not in E.parts:
        out.update({"error": "no O(2) summand for the tangent direction", "normal_splitting": None, "verdict": "FAIL", "passed": False})
        return out
    N = E.remove(2)
    ok = N.degree == -2 and N.parts == (-1, -1)
    out.update({
        "normal_splitting": N.to_list(),
        "degree": N.degree,
        "adjunction_ok": N.degree == -2,
        "verdict": "PASS" if ok else "FAIL",
        "passed": ok,
    })
    if not ok:
        out["reason"] = "obstructed direction present" if min(N.parts) < -1 else "curve moves (non-negative normal summand)"
    return out
