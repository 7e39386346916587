"""Executable checks for the Vandermonde-type gluing lemmas.

Each ``check_*`` function validates the lemma hypotheses computationally,
assembles the glued matrix and reports its rank.  Hypothesis violations on
polynomial inputs raise :class:`LemmaHypothesisError`; for block layouts they
are report content, since a failed hypothesis there is a legitimate outcome.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Mapping

from ..algebra.fields import QQ, PrimeField
from ..algebra.poly import UniPoly, is_squarefree, poly_gcd
from .matrix import ExactMatrix, MatrixError, column_span_contains, det, inverse, rank
from .vandermonde import V0, V1


class LemmaHypothesisError(ValueError):
    def __init__(self, code: str, message: str = ""):
        super().__init__(f"{code}: {message}" if message else code)
        self.code = code


class LayoutError(ValueError):
    pass


@dataclass
class LemmaReport:
    lemma: str
    size: tuple
    rank: int
    passed: bool
    hypotheses: dict = dc_field(default_factory=dict)
    details: dict = dc_field(default_factory=dict)

    @property
    def hypotheses_hold(self) -> bool:
        return all(self.hypotheses.values())

    def to_dict(self) -> dict:
        return {
            "lemma": self.lemma,
            "size": list(self.size),
            "rank": self.rank,
            "passed": self.passed,
            "hypotheses": dict(self.hypotheses),
            "details": _jsonable(self.details),
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, int):
        return str(x)
    if isinstance(x, (str, float)):
        return x
    return str(x)


def _same_field(*polys: UniPoly):
    fields = {p.field for p in polys}
    if len(fields) != 1:
        raise LemmaHypothesisError("mixed_fields", "polynomials over different scalar contexts")
    return fields.pop()


def _check_points(F, groups, counts):
    pts = []
    for g, k in zip(groups, counts):
        if len(g) != k:
            raise LemmaHypothesisError("wrong_point_count", f"expected {k} points, got {len(g)}")
        pts.extend(F(t) for t in g)
    if len(set(pts)) != len(pts):
        raise LemmaHypothesisError("points_not_distinct", "marked points must be pairwise distinct")
    return pts


def _coprime(a: UniPoly, b: UniPoly) -> bool:
    return poly_gcd(a, b).degree == 0


# --- Lemma A.2 -------------------------------------------------------------


def lemma_a2_matrix(h1, h2, t1, t2, d) -> ExactMatrix:
    """Rows stacked as printed: ``[V0(h1,t1) | V1(h2,t1)]`` over ``[V1(h1,t2) | V0(h2,t2)]``."""
    top = V0(h1, t1, d).hstack(V1(h2, t1, d))
    bottom = V1(h1, t2, d).hstack(V0(h2, t2, d))
    return top.vstack(bottom)


def lemma_a2_aligned_matrix(h1, h2, t1, t2, d) -> ExactMatrix:
    """Column-consistent variant ``[V1(h1, t) | V0(h2, t)]`` over all 2d+1 points.

    With ``t1`` at zeros of ``h1`` its first d rows vanish on the first d+1
    columns, so the matrix is block anti-triangular with square blocks
    ``V0(h2, t1)`` (d x d) and ``V1(h1, t2)`` ((d+1) x (d+1)).
    """
    pts = list(t1) + list(t2)
    return V1(h1, pts, d).hstack(V0(h2, pts, d))


def a2_specialization_identity(h1, h2, t1, t2, d) -> dict:
    """det of the aligned matrix vs. ``(-1)^(d(d+1)) |V0(h2,t1)| |V1(h1,t2)|``.

    ``d(d+1)`` is even, so the sign is +1 for this block ordering.
    """
    B = lemma_a2_aligned_matrix(h1, h2, t1, t2, d)
    lhs = det(B)
    sign = -1 if (d * (d + 1)) % 2 else 1
    rhs = B.field.reduce(sign * det(V0(h2, t1, d)) * det(V1(h1, t2, d)))
    return {"det_aligned": lhs, "factor_product": rhs, "sign": sign, "holds": lhs == rhs}


def check_lemma_A2(h1: UniPoly, h2: UniPoly, t1, t2, d: int, specialize: bool | None = None) -> LemmaReport:
    F = _same_field(h1, h2)
    if d < 1:
        raise LemmaHypothesisError("degree_too_small", "d must be positive")
    if h1.degree < d or h2.degree < d:
        raise LemmaHypothesisError("degree_too_small", f"deg h1={h1.degree}, deg h2={h2.degree} < d={d}")
    if not _coprime(h1, h2):
        raise LemmaHypothesisError("common_factor", "h1 and h2 share a factor")
    if not (is_squarefree(h1) and is_squarefree(h2)):
        raise LemmaHypothesisError("repeated_zeros", "h1 or h2 has a repeated zero")
    _check_points(F, (t1, t2), (d, d + 1))
    t1 = [F(t) for t in t1]
    t2 = [F(t) for t in t2]
    if specialize is None:
        specialize = all(h1(t) == 0 for t in t1)
    if specialize:
        if any(h1(t) != 0 for t in t1):
            raise LemmaHypothesisError("not_specialized", "specialisation needs t1 at zeros of h1")
        if any(h2(t) == 0 for t in t1 + t2) or any(h1(t) == 0 for t in t2):
            raise LemmaHypothesisError("points_hit_zeros", "h2 must not vanish on the marked points")
    elif any(h(t) == 0 for h in (h1, h2) for t in t1 + t2):
        raise LemmaHypothesisError("points_hit_zeros", "generic mode needs points off the zeros of h1, h2")

    B = lemma_a2_matrix(h1, h2, t1, t2, d)
    r = rank(B)
    details = {"mode": "specialization" if specialize else "generic", "det": det(B)}
    if specialize:
        details["top_left_block_zero"] = V0(h1, t1, d).is_zero()
        details["identity"] = a2_specialization_identity(h1, h2, t1, t2, d)
    passed = r == 2 * d + 1
    if specialize:
        passed = passed and details["top_left_block_zero"] and details["identity"]["holds"]
    return LemmaReport("A2", B.shape, r, passed, {"coprime": True, "squarefree": True, "degrees": True}, details)


# --- Lemma A.3 -------------------------------------------------------------


def lemma_a3_matrix(h1, h2, h3, t1, t2, t3, d) -> ExactMatrix:
    rows = []
    for pts in (t1, t2, t3):
        rows.append(V0(h1, pts, d).hstack(V0(h2, pts, d), V1(h3, pts, d)))
    return rows[0].vstack(rows[1], rows[2])


def check_lemma_A3(h1, h2, h3, t1, t2, t3, d: int) -> LemmaReport:
    """Pairwise coprimality is enforced for all three pairs, h1/h2 included."""
    F = _same_field(h1, h2, h3)
    if d < 1:
        raise LemmaHypothesisError("degree_too_small", "d must be positive")
    if h1.degree > d or h2.degree > d or h3.degree > 2 * d:
        raise LemmaHypothesisError("degree_too_large", "h1, h2 need degree <= d and h3 degree <= 2d")
    if h1.is_zero() or h2.is_zero() or h3.is_zero():
        raise LemmaHypothesisError("linearly_dependent", "zero polynomial")
    if rank(ExactMatrix.from_rows([[h1.coeff(k) for k in range(d + 1)], [h2.coeff(k) for k in range(d + 1)]], F)) < 2:
        raise LemmaHypothesisError("linearly_dependent", "h1 and h2 on the same line through the origin")
    # zero order at infinity of h as a section of O(nominal degree)
    inf = {"h1": d - h1.degree, "h2": d - h2.degree, "h3": 2 * d - h3.degree}
    polys = {"h1": h1, "h2": h2, "h3": h3}
    for a, b in (("h1", "h2"), ("h1", "h3"), ("h2", "h3")):
        if not _coprime(polys[a], polys[b]) or (inf[a] and inf[b]):
            raise LemmaHypothesisError("common_factor", f"{a} and {b} are not relatively prime")
    if not all(is_squarefree(p) for p in polys.values()) or max(inf.values()) > 1:
        raise LemmaHypothesisError("repeated_zeros", "a polynomial has a repeated zero")
    _check_points(F, (t1, t2, t3), (d, d, d + 1))
    t1, t2, t3 = ([F(t) for t in g] for g in (t1, t2, t3))

    B = lemma_a3_matrix(h1, h2, h3, t1, t2, t3, d)
    r = rank(B)
    sub = B.submatrix(range(2 * d), range(2 * d))
    A = B.submatrix(range(2 * d), range(2 * d, 3 * d + 1))
    details = {
        "block_V_rank": rank(sub),
        "block_V_full_rank": rank(sub) == 2 * d,
        "block_A_zero": A.is_zero(),
        "specialized": all(h3(t) == 0 for t in t1 + t2),
    }
    passed = r == 3 * d + 1 and details["block_V_full_rank"]
    return LemmaReport("A3", B.shape, r, passed, {"coprime": True, "squarefree": True, "independent": True}, details)


# --- Lemmas A.4 - A.6 ------------------------------------------------------

LAYOUTS = {
    "A4": [
        ["B11", "B12", "B13", "B14", None, "B16"],
        [None, "B22", "B23", "B24", "B25", "B26"],
    ],
    "A5": [
        ["B11", "B12", "B13", "B14", "B15", None, None],
        [None, None, "B23", "B24", "B25", "B26", None],
        [None, None, None, "B34", "B35", "B36", "B37"],
    ],
    "A6": [
        ["B11", "B12", None, None],
        [None, "B22", "B23", None],
        [None, None, "B33", "B34"],
        [None, "B42", None, "B44"],
    ],
}


def assemble_layout(layout: str, blocks: Mapping[str, ExactMatrix]) -> ExactMatrix:
    if layout not in LAYOUTS:
        raise LayoutError(f"unknown layout {layout!r}")
    grid = LAYOUTS[layout]
    missing = {n for row in grid for n in row if n is not None} - set(blocks)
    if missing:
        raise LayoutError(f"layout {layout} is missing blocks {sorted(missing)}")
    try:
        return ExactMatrix.block([[blocks[n] if n else None for n in row] for row in grid])
    except MatrixError as exc:
        raise LayoutError(str(exc)) from exc


def _full(M: ExactMatrix) -> bool:
    return rank(M) == min(M.shape)


def check_block_gluing(J: ExactMatrix | None, layout: str, blocks: Mapping[str, ExactMatrix]) -> LemmaReport:
    """Check the hypotheses of a gluing lemma and the full rank of the glued matrix."""
    glued = assemble_layout(layout, blocks)
    if J is not None and J != glued:
        raise LayoutError("matrix does not match the block layout")
    b = blocks
    hyp: dict[str, bool] = {}
    details: dict = {}
    if layout == "A4":
        hyp["equal_B13B14_B23B24"] = b["B13"].hstack(b["B14"]) == b["B23"].hstack(b["B24"])
        hyp["full_rank_B13_B14_B16"] = _full(b["B13"].hstack(b["B14"], b["B16"]))
        hyp["full_rank_B11_B12mB22_B25"] = _full(b["B11"].hstack(b["B12"] - b["B22"], b["B25"]))
        hyp["span_B13B14_contains_B11B12"] = column_span_contains(b["B13"].hstack(b["B14"]), b["B11"].hstack(b["B12"]))
    elif layout == "A5":
        hyp["equal_row2_row3"] = b["B24"].hstack(b["B25"], b["B26"]) == b["B34"].hstack(b["B35"], b["B36"])
        hyp["full_rank_B11_B12_B15"] = _full(b["B11"].hstack(b["B12"], b["B15"]))
        hyp["full_rank_B23_mB37"] = _full(b["B23"].hstack(-b["B37"]))
        hyp["full_rank_B34_B36"] = _full(b["B34"].hstack(b["B36"]))
        hyp["span_B11B12_contains_B13B14"] = column_span_contains(b["B11"].hstack(b["B12"]), b["B13"].hstack(b["B14"]))
    elif layout == "A6":
        names = [n for row in LAYOUTS["A6"] for n in row if n]
        k = b["B11"].nrows
        hyp["square_same_size"] = all(b[n].shape == (k, k) for n in names)
        hyp["blocks_nondegenerate"] = hyp["square_same_size"] and all(_full(b[n]) for n in names)
        if hyp["square_same_size"] and _full(b["B23"]):
            X = inverse(b["B23"])
            schur = ExactMatrix.block([[-(b["B33"] @ X @ b["B22"]), b["B34"]], [b["B42"], b["B44"]]])
            printed = ExactMatrix.block([[-(b["B22"] @ X @ b["B33"]), b["B34"]], [b["B42"], b["B44"]]])
            hyp["schur_block_nondegenerate"] = _full(schur)
            details["printed_order_nondegenerate"] = _full(printed)
        else:
            hyp["schur_block_nondegenerate"] = False
            details["B23_singular"] = True
    r = rank(glued)
    full = r == min(glued.shape)
    holds = all(hyp.values())
    details["conclusion_claimed"] = holds
    details["glued_full_rank"] = full
    # a lemma check passes when the conclusion is reached from satisfied hypotheses
    return LemmaReport(layout, glued.shape, r, holds and full, hyp, details)


# --- random instances --------------------------------------------------------


def _rand_poly(F, rng, degree, lead_nonzero=True):
    coeffs = [F.random_element(rng) for _ in range(degree + 1)]
    if lead_nonzero and coeffs[-1] == 0:
        coeffs[-1] = 1
    return UniPoly(tuple(coeffs), F)


def _rand_matrix(F, rng, nrows, ncols):
    return ExactMatrix._raw([[F.random_element(rng) for _ in range(ncols)] for _ in range(nrows)], ncols, F)


def random_a2_instance(F: PrimeField, rng: random.Random, d: int, specialize: bool = False):
    if specialize:
        roots = F.random_distinct(rng, d, exclude=[0])
        extra = _rand_poly(F, rng, 0)
        h1 = UniPoly.from_roots(roots, lead=extra.lead, field=F)
        t1 = roots
    else:
        h1 = _rand_poly(F, rng, d)
        t1 = None
    h2 = _rand_poly(F, rng, d)
    pts = F.random_distinct(rng, 2 * d + 1, exclude=t1 or [])
    if t1 is None:
        t1, t2 = pts[:d], pts[d : 2 * d + 1]
    else:
        t2 = pts[: d + 1]
    return h1, h2, t1, t2


def random_a3_instance(F: PrimeField, rng: random.Random, d: int, specialize: bool = False):
    h1 = _rand_poly(F, rng, d)
    h2 = _rand_poly(F, rng, d)
    if specialize:
        roots = F.random_distinct(rng, 2 * d)
        h3 = UniPoly.from_roots(roots, lead=_rand_poly(F, rng, 0).lead, field=F)
        t12 = roots
        t3 = F.random_distinct(rng, d + 1, exclude=roots)
    else:
        h3 = _rand_poly(F, rng, 2 * d)
        pts = F.random_distinct(rng, 3 * d + 1)
        t12, t3 = pts[: 2 * d], pts[2 * d :]
    return h1, h2, h3, t12[:d], t12[d:], t3


def random_gluing_instance(layout: str, F: PrimeField, rng: random.Random, d: int, singular_B23: bool = False):
    """Random blocks built to satisfy the layout's equality and span hypotheses."""
    R = lambda r, c: _rand_matrix(F, rng, r, c)  # noqa: E731
    w = d + 1
    if layout == "A4":
        h = 3 * d + 1
        b = {n: R(h, w) for n in ("B13", "B14", "B16", "B22", "B25", "B26")}
        b["B23"], b["B24"] = b["B13"], b["B14"]
        both = b["B13"].hstack(b["B14"]) @ R(2 * w, 2 * w)
        b["B11"] = both.submatrix(None, range(w))
        b["B12"] = both.submatrix(None, range(w, 2 * w))
    elif layout == "A5":
        h1, h2 = 3 * d + 1, 2 * d + 1
        b = {n: R(h1, w) for n in ("B11", "B12", "B15")}
        both = b["B11"].hstack(b["B12"]) @ R(2 * w, 2 * w)
        b["B13"] = both.submatrix(None, range(w))
        b["B14"] = both.submatrix(None, range(w, 2 * w))
        for n in ("B23", "B24", "B25", "B26", "B37"):
            b[n] = R(h2, w)
        b["B34"], b["B35"], b["B36"] = b["B24"], b["B25"], b["B26"]
    elif layout == "A6":
        k = 2 * d + 1
        b = {n: R(k, k) for n in ("B11", "B12", "B22", "B23", "B33", "B34", "B42", "B44")}
        if singular_B23:
            rows = [list(r) for r in b["B23"].rows]
            rows[-1] = [F.reduce(x + y) for x, y in zip(rows[0], rows[1 % k])] if k > 1 else [0]
            b["B23"] = ExactMatrix._raw(rows, k, F)
    else:
        raise LayoutError(f"unknown layout {layout!r}")
    return b


def run_trials(lemma: str, trials: int, d: int, seed: int, field: PrimeField | None = None,
               specialize: bool = False, inject_singular: bool = False, max_resample: int = 5) -> dict:
    """Fuzz one lemma on random instances and tally the outcomes."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    from ..algebra.fields import DEFAULT_PRIME

    F = field or PrimeField(DEFAULT_PRIME)
    rng = random.Random(seed)
    tally = {"lemma": lemma, "d": d, "seed": seed, "field": F.to_json(), "trials": trials, "passes": 0,
             "hypothesis_failures": 0, "conclusion_failures": 0, "resamples": 0, "counterexamples": []}
    for _ in range(trials):
        for attempt in range(max_resample + 1):
            try:
                if lemma == "A2":
                    inst = random_a2_instance(F, rng, d, specialize)
                    rep = check_lemma_A2(*inst, d, specialize=specialize)
                elif lemma == "A3":
                    inst = random_a3_instance(F, rng, d, specialize)
                    rep = check_lemma_A3(*inst, d)
                else:
                    inst = random_gluing_instance(lemma, F, rng, d, singular_B23=inject_singular)
                    rep = check_block_gluing(None, lemma, inst)
            except LemmaHypothesisError:
                # an invalid draw is redrawn, not scored
                tally["resamples"] += 1
                continue
            if lemma in ("A4", "A5", "A6") and not rep.hypotheses_hold:
                if inject_singular:
                    tally["hypothesis_failures"] += 1
                    break
                tally["resamples"] += 1
                continue
            if rep.passed:
                tally["passes"] += 1
                break
            # hypotheses held and the conclusion did not: never redrawn
            tally["conclusion_failures"] += 1
            tally["counterexamples"].append({"inputs": _jsonable(inst), "report": rep.to_dict()})
            break
        else:
            tally["hypothesis_failures"] += 1
    return tally
