"""Compare the compiled and pure-Python modular elimination kernels.

    python benchmarks/bench_modrank.py [--sizes 40 80 160] [--repeat 3]

Two inputs per size: a dense random square matrix, and the top incidence
Jacobian of a random quintic witness of comparable width.  Both kernels must
return the same rank; the script exits non-zero otherwise.
"""
from __future__ import annotations

import argparse
import random
import sys
import time

from cicycert.algebra.fields import DEFAULT_PRIME, PrimeField
from cicycert.incidence import build_jacobian
from cicycert.linalg import _backend
from cicycert.witnesses import random_ci_through_curve


def _time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _cases(sizes, seed):
    rng = random.Random(seed)
    p = DEFAULT_PRIME
    for n in sizes:
        rows = [[rng.randrange(p) for _ in range(n)] for _ in range(n)]
        yield f"dense {n}x{n}", rows, n
    F = PrimeField(p, check=False)
    for d in (2, 4, 6):
        pkg = random_ci_through_curve(4, (5,), d, seed=seed)
        J = build_jacobian(pkg.with_field(F), 1).matrix
        yield f"quintic J_1 d={d} ({J.nrows}x{J.ncols})", [list(r) for r in J.rows], J.ncols


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[40, 80, 160])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _backend._ext is None:
        print("compiled kernel not built; run `pip install -e . --no-build-isolation` first", file=sys.stderr)
        return 2
    p = DEFAULT_PRIME
    print(f"{'case':<34} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    ok = True
    for name, rows, ncols in _cases(args.sizes, args.seed):
        tp, rp = _time(lambda: _backend.rank_mod(rows, ncols, p, backend="python"), args.repeat)
        tc, rc = _time(lambda: _backend.rank_mod(rows, ncols, p, backend="compiled"), args.repeat)
        ok &= rp == rc
        print(f"{name:<34} {tp:>10.4f} {tc:>11.5f} {tp / tc:>7.1f}x" + ("" if rp == rc else "  RANK MISMATCH"))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
