"""Newton continuation of a witness curve under a perturbation of the forms.

The square system ``g_i^eps(c(t^i_j)) = 0`` is solved in the independent
coordinates ``c_ind`` with ``c_free`` frozen, where ``g_i^eps = g_i + eps*dg_i``.
This is the only module that computes in floating point (mpmath, configurable
precision).  The choice of ``c_ind`` comes from an exact rank certificate.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import mpmath

from .algebra.fields import DEFAULT_PRIME, QQ, BigComplexField, BigFloatField, PrimeField
from .algebra.poly import HomForm, compose_form_with_curve, monomials
from .incidence import build_jacobian, select_independent_coordinates
from .linalg.matrix import rank
from .witnesses import MarkedPointSet, WitnessPackage

POINT_DENOM = 2**20
# the real path is abandoned for the complex detour after this many halvings
REAL_PATH_HALVINGS = 8


class ContinuationError(RuntimeError):
    def __init__(self, message: str, result: dict | None = None):
        super().__init__(message)
        self.result = result or {}


@dataclass(frozen=True)
class ContinuationJob:
    package: WitnessPackage
    epsilon: float | str | Fraction = "1e-3"
    tol: float | str = "1e-12"
    precision: int = 128
    max_iterations: int = 10
    seed: int = 0
    max_halvings: int = 24
    predictor: bool = True
    quadratic_slack: float = 0.5

    def __post_init__(self):
        if self.precision < 64:
            raise ValueError("precision must be at least 64 bits")
        if mpmath.mpf(self.tol) <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("need at least one Newton iteration")


def _pow2_scale(values) -> int:
    """Exponent ``e`` with ``max |v| * 2^-e`` in ``(1/2, 1]``; exact in binary."""
    top = max((abs(Fraction(v)) for v in values), default=Fraction(0))
    if top == 0:
        return 0
    e = 0
    while top > 1:
        top /= 2
        e += 1
    while top <= Fraction(1, 2):
        top *= 2
        e -= 1
    return e


def _fresh_points(pkg: WitnessPackage, rng: random.Random) -> list[list[Fraction]]:
    """Dyadic points near Chebyshev nodes of ``[-1, 1]``, randomly jittered.

    Each group evaluates a degree ``h*d`` polynomial, so well spread nodes
    keep the evaluation part of the Jacobian far from singular.
    """
    seen = set()
    groups = []
    for h in pkg.degrees:
        N = h * pkg.d + 1
        g = []
        for j in range(N):
            while True:
                u = math.cos(math.pi * (2 * j + 1 + rng.uniform(-0.3, 0.3)) / (2 * N))
                t = Fraction(round(u * POINT_DENOM), POINT_DENOM)
                if t not in seen:
                    break
            seen.add(t)
            g.append(t)
        groups.append(g)
    return groups


def _pivot_columns(sys_: "_NumericSystem", x, k: int) -> list[int]:
    """Column-pivoted Gram-Schmidt on the float Jacobian; ``k`` columns."""
    with mpmath.workprec(64):
        J = sys_.jacobian(x)
        cols = [[J[i][j] for i in range(len(J))] for j in range(len(J[0]))]
        chosen = []
        for _ in range(k):
            best = max((j for j in range(len(cols)) if j not in chosen), key=lambda j: mpmath.norm(cols[j]))
            chosen.append(best)
            q = cols[best]
            nq = mpmath.norm(q)
            if nq == 0:
                break
            q = [v / nq for v in q]
            for j in range(len(cols)):
                if j not in chosen:
                    dot = mpmath.fsum(a * b for a, b in zip(q, cols[j]))
                    cols[j] = [a - dot * b for a, b in zip(cols[j], q)]
        return sorted(chosen)


def _scaled_curve(pkg: WitnessPackage) -> list[Fraction]:
    ce = _pow2_scale(pkg.curve.to_vector())
    return [Fraction(v) / Fraction(2) ** ce for v in pkg.curve.to_vector()]


def _scaled_forms(pkg: WitnessPackage, BF) -> list[HomForm]:
    # exact dyadic rescaling: same variety, coefficients of size at most one
    out = []
    for g in pkg.spec.forms:
        ge = _pow2_scale(g.terms.values())
        out.append(HomForm(g.nvars, g.degree, {e: BF(Fraction(v) / Fraction(2) ** ge) for e, v in g.terms.items()}, BF))
    return out


def _perturbations(base: list[HomForm], rng: random.Random, BF) -> list[HomForm]:
    """Random directions with the coefficient 2-norm of the (scaled) base forms.

    ``epsilon`` is then a relative perturbation size.
    """
    out = []
    for g in base:
        mons = monomials(g.nvars, g.degree)
        vals = [rng.uniform(-1.0, 1.0) for _ in mons]
        scale = math.sqrt(sum(float(v) ** 2 for v in g.terms.values()) / sum(v * v for v in vals))
        out.append(HomForm(g.nvars, g.degree, {e: BF(Fraction(v * scale)) for e, v in zip(mons, vals)}, BF))
    return out


class _NumericSystem:
    def __init__(self, forms, d, n, point_groups, BF):
        self.forms = forms
        self.grads = [g.gradient() for g in forms]
        self.d = d
        self.nv = n + 1
        self.points = [[BF(t) for t in grp] for grp in point_groups]

    def curve_at(self, x, t):
        w = self.d + 1
        out = []
        for j in range(self.nv):
            acc = mpmath.mpf(0)
            for k in range(self.d, -1, -1):
                acc = acc * t + x[j * w + k]
            out.append(acc)
        return out

    def residual(self, x):
        vals = []
        for g, pts in zip(self.forms, self.points):
            for t in pts:
                vals.append(g(self.curve_at(x, t)))
        return vals

    def jacobian(self, x, cols=None):
        rows = []
        w = self.d + 1
        for grad, pts in zip(self.grads, self.points):
            for t in pts:
                pt = self.curve_at(x, t)
                dv = [dg(pt) if not dg.is_zero() else mpmath.mpf(0) for dg in grad]
                tp = [mpmath.mpf(1)]
                for _ in range(self.d):
                    tp.append(tp[-1] * t)
                row = [dv[j] * tp[k] for j in range(self.nv) for k in range(w)]
                rows.append(row if cols is None else [row[c] for c in cols])
        return rows


def _maxabs(v):
    return max((abs(x) for x in v), default=mpmath.mpf(0))


def _newton_leg(sys_, x, cols, tol, floor, max_iter):
    """Newton on ``cols``; returns ``(x, residual trace, converged)``.

    Iteration continues past ``tol`` until the residual hits the precision
    floor or stagnates, so that the trace shows the asymptotic order.
    """
    trace = [_maxabs(sys_.residual(x))]
    for _ in range(max_iter):
        if trace[-1] <= floor:
            break
        F = sys_.residual(x)
        J = mpmath.matrix(sys_.jacobian(x, cols))
        try:
            step = mpmath.lu_solve(J, mpmath.matrix([-f for f in F]))
        except ZeroDivisionError as exc:
            raise ContinuationError("Jacobian numerically singular on the path") from exc
        x = list(x)
        for i, c in enumerate(cols):
            x[c] += step[i]
        r = _maxabs(sys_.residual(x))
        trace.append(r)
        if not mpmath.isfinite(r):
            return x, trace, False
        if r < tol and r > trace[-2] / 4:
            break
        if r >= tol and len(trace) >= 3 and r > trace[-2] > trace[-3]:
            return x, trace, False
    return x, trace, trace[-1] < tol


def convergence_orders(trace, noise=0) -> list[float]:
    """``log(r_{k+1}/r_k) / log(r_k/r_{k-1})`` over strictly decreasing triples.

    Residuals at or below ``noise`` are rounding error, not Newton progress,
    and are left out.
    """
    out = []
    for a, b, c in zip(trace, trace[1:], trace[2:]):
        if a > b > c > noise:
            out.append(float(mpmath.log(c / b) / mpmath.log(b / a)))
    return out


class _PathFailure(Exception):
    def __init__(self, reason, legs, iterations):
        super().__init__(reason)
        self.reason, self.legs, self.iterations = reason, legs, iterations


def _to_complex(g: HomForm, CF) -> HomForm:
    return HomForm(g.nvars, g.degree, {e: CF(v) for e, v in g.terms.items()}, CF)


def _fmt(v) -> str:
    if isinstance(v, mpmath.mpc):
        return f"{mpmath.nstr(v.real, 40)}{'+' if v.imag >= 0 else '-'}{mpmath.nstr(abs(v.imag), 40)}j"
    return mpmath.nstr(v, 40)


def _track(job, base, deltas, groups, K, x0, cols, path, tol, floor, max_halvings):
    """Follow ``s = path(tau)``, ``tau`` from 0 to 1, with adaptive legs.

    Returns ``(x, legs, final trace, iterations, system)``; raises
    ``_PathFailure`` when the step-halving budget runs out.
    """
    pkg = job.package

    def system(s):
        return _NumericSystem([b + dg * s for b, dg in zip(base, deltas)], pkg.d, pkg.n, groups, K)

    dsys = _NumericSystem(deltas, pkg.d, pkg.n, groups, K)

    def tangent(x, s):
        # dx/ds on the solution path: J_ind dx = -dF/ds
        J = mpmath.matrix(system(s).jacobian(x, cols))
        dx = mpmath.lu_solve(J, mpmath.matrix([-f for f in dsys.residual(x)]))
        out = [0 * x[0]] * len(x)
        for i, c in enumerate(cols):
            out[c] = dx[i]
        return out

    x = x0
    done = mpmath.mpf(0)
    step = mpmath.mpf(1)
    legs = []
    total_iter = 0
    halvings = 0
    final_trace = None
    while done < 1:
        target = min(mpmath.mpf(1), done + step)
        s0, s1 = path(done), path(target)
        start = x
        if job.predictor:
            try:
                start = [a + (s1 - s0) * b for a, b in zip(x, tangent(x, s0))]
            except ZeroDivisionError:
                start = x
        x_new, trace, ok = _newton_leg(system(s1), start, cols, tol, floor, job.max_iterations)
        legs.append({"from": _fmt(s0), "to": _fmt(s1), "iterations": len(trace) - 1,
                     "trace": [mpmath.nstr(r, 6) for r in trace], "converged": ok})
        total_iter += len(trace) - 1
        if ok:
            x, done = x_new, target
            final_trace = trace
            step = min(mpmath.mpf(1), step * 2)
            continue
        halvings += 1
        if halvings > max_halvings:
            raise _PathFailure("step halving budget exhausted", legs, total_iter)
        step = step / 2
    return x, legs, final_trace, total_iter, system


def newton_deform(job: ContinuationJob) -> dict:
    pkg = job.package
    if pkg.field != QQ:
        raise ValueError("continuation starts from an exact package over QQ")
    prec = job.precision
    BF = BigFloatField(prec)
    rng = random.Random(job.seed)
    eps_exact = Fraction(str(job.epsilon)) if not isinstance(job.epsilon, Fraction) else job.epsilon

    # exact setup: fresh dyadic points in [-1, 1] and certified c_ind
    groups = _fresh_points(pkg, rng)
    exact_pkg = pkg.with_points(MarkedPointSet(tuple(tuple(g) for g in groups)))
    Fp = PrimeField(DEFAULT_PRIME, check=False)
    Jp = build_jacobian(exact_pkg.with_field(Fp), pkg.spec.r)
    with mpmath.workprec(prec):
        BF0 = BigFloatField(64)
        probe = _NumericSystem(_scaled_forms(pkg, BF0), pkg.d, pkg.n, groups, BF0)
        x_probe = [BF0(v) for v in _scaled_curve(pkg)]
        numeric = _pivot_columns(probe, x_probe, Jp.matrix.nrows)
    sel = select_independent_coordinates(Jp, numeric)
    if not sel["nondegenerate"]:
        sel = select_independent_coordinates(Jp)
    if not sel["nondegenerate"]:
        raise ContinuationError("no certified independent coordinates")
    cols = sel["c_ind"]

    result = {
        "epsilon": str(job.epsilon),
        "tol": str(job.tol),
        "precision": prec,
        "seed": str(job.seed),
        "c_ind": cols,
        "c_free": sel["c_free"],
        "points": [[str(t) for t in g] for g in groups],
    }
    if eps_exact == 0:
        res = max(
            (abs(x) for g in pkg.spec.forms for x in compose_form_with_curve(g, pkg.curve).coeffs), default=0
        )
        result.update({"legs": [], "iterations": 0, "trace": [], "residual": str(res), "residual_exact": True,
                       "converged": True, "quadratic": {"orders": [], "passed": True, "note": "trivial"}})
        result["post_check"] = post_deformation_check(exact_pkg, pkg.curve.to_vector(), None, prec, exact=True)
        result["passed"] = res == 0 and result["post_check"]["passed"]
        return result

    with mpmath.workprec(prec):
        tol = mpmath.mpf(job.tol)
        floor = mpmath.mpf(2) ** (-(prec * 3) // 4)
        base = _scaled_forms(pkg, BF)
        deltas = _perturbations(base, rng, BF)
        eps = BF(eps_exact)
        x0 = [BF(v) for v in _scaled_curve(pkg)]
        attempts = []
        try:
            track = _track(job, base, deltas, groups, BF, x0, cols, lambda tau: eps * tau, tol, floor,
                           min(REAL_PATH_HALVINGS, job.max_halvings))
            path = "real"
        except _PathFailure as real_fail:
            # two real solutions can meet and turn complex at some eps' < eps;
            # over C the family is connected around that point
            attempts.append({"path": "real", "legs": real_fail.legs, "iterations": real_fail.iterations})
            CF = BigComplexField(prec)
            cbase = [_to_complex(g, CF) for g in base]
            cdeltas = [_to_complex(g, CF) for g in deltas]
            gamma = mpmath.mpf(rng.uniform(0.5, 1.0))
            try:
                track = _track(job, cbase, cdeltas, groups, CF, [CF(v) for v in x0], cols,
                               lambda tau: eps * mpmath.mpc(tau, gamma * tau * (1 - tau)), tol, floor,
                               job.max_halvings)
            except _PathFailure as fail:
                attempts.append({"path": "complex", "gamma": mpmath.nstr(gamma, 10), "legs": fail.legs,
                                 "iterations": fail.iterations})
                result.update({"attempts": attempts, "legs": fail.legs,
                               "iterations": sum(a["iterations"] for a in attempts),
                               "converged": False, "passed": False, "error": fail.reason})
                raise ContinuationError("continuation did not converge", result) from None
            path = "complex"
            result["gamma"] = mpmath.nstr(gamma, 10)
        x, legs, final_trace, total_iter, system = track
        if attempts:
            result["attempts"] = attempts
            total_iter += sum(a["iterations"] for a in attempts)
        result["path"] = path
        final_sys = system(eps)
        res_vec = final_sys.residual(x)
        res = _maxabs(res_vec)
        orders = convergence_orders(final_trace, mpmath.mpf(2) ** (-(prec * 4) // 5))
        tail = orders[-2:]
        quad_ok = bool(tail) and sum(tail) / len(tail) >= 2 - job.quadratic_slack
        result.update({
            "legs": legs,
            "subdivided": len(legs) > 1 or bool(attempts),
            "iterations": total_iter,
            "final_leg_iterations": len(final_trace) - 1,
            "trace": [mpmath.nstr(r, 8) for r in final_trace],
            "residual": mpmath.nstr(res, 8),
            "residual_exact": False,
            "all_equations_below_tol": all(abs(v) < tol for v in res_vec),
            "converged": True,
            "quadratic": {"orders": [round(o, 4) for o in orders], "slack": job.quadratic_slack, "passed": quad_ok},
            "curve": [_fmt(v) for v in x],
        })
        result["post_check"] = post_deformation_check(exact_pkg, x, final_sys, prec)
        result["passed"] = (
            result["all_equations_below_tol"] and quad_ok and result["post_check"]["passed"]
            and result["final_leg_iterations"] <= job.max_iterations
        )
    return result


def post_deformation_check(pkg: WitnessPackage, x, sys_: _NumericSystem | None, prec: int, exact: bool = False) -> dict:
    """Numerical rank of the full ``J_r`` at the deformed point via singular values."""
    if exact:
        J = build_jacobian(pkg.with_field(PrimeField(DEFAULT_PRIME, check=False)), pkg.spec.r)
        rk = rank(J.matrix)
        return {"method": "exact", "rank": rk, "rows": J.matrix.nrows, "passed": rk == J.matrix.nrows}
    with mpmath.workprec(prec):
        A = mpmath.matrix(sys_.jacobian(x))
        cplx = any(isinstance(A[i, j], mpmath.mpc) for i in range(A.rows) for j in range(A.cols))
        sv = (mpmath.svd_c if cplx else mpmath.svd_r)(A, compute_uv=False)
        svals = sorted((sv[i] for i in range(min(A.rows, A.cols))), reverse=True)
        top = svals[0]
        cutoff = top * mpmath.mpf(2) ** (-(prec // 2))
        num_rank = sum(1 for s in svals if s > cutoff)
        return {
            "method": "svd",
            "rows": A.rows,
            "sigma_max": mpmath.nstr(top, 8),
            "sigma_min": mpmath.nstr(svals[-1], 8),
            "relative_gap": mpmath.nstr(svals[-1] / top, 8),
            "numerical_rank": num_rank,
            "passed": num_rank == A.rows,
        }
