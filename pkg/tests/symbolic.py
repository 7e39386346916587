"""Symbolic checks of the specialisation identity behind the A.2 gluing.

With ``t^1`` the zeros ``a`` of ``h1`` the aligned matrix
``[V1(h1, t) | V0(h2, t)]`` has a vanishing top-left block, so
``det = (-1)^(d(d+1)) det V0(h2, a) det V1(h1, b)``.
"""
import sympy
from sympy.polys.matrices import DomainMatrix


def _setup(d):
    a = sympy.symbols(f"a0:{d}")
    b = sympy.symbols(f"b0:{d + 1}")
    s = sympy.symbols(f"s0:{d + 1}")
    x = sympy.Symbol("x")
    h1 = sympy.prod([x - r for r in a])
    h2 = sum(c * x**k for k, c in enumerate(s))

    def v(h, pts, low):
        return sympy.Matrix([[sympy.expand(h.subs(x, p) * p**k) for k in range(d, low - 1, -1)] for p in pts])

    pts = list(a) + list(b)
    B = v(h1, pts, 0).row_join(v(h2, pts, 1))
    return a + b + s, B, v(h2, a, 1), v(h1, b, 0)


def _det(M, gens):
    return DomainMatrix.from_Matrix(M).convert_to(sympy.ZZ[list(gens)]).det()


def a2_identity_direct(d: int) -> bool:
    gens, B, A, C = _setup(d)
    return _det(B, gens) == (-1) ** (d * (d + 1)) * _det(A, gens) * _det(C, gens)


def a2_identity_by_blocks(d: int) -> dict:
    """The identity split into three symbolic facts, each cheap at d = 3."""
    _, B, A, C = _setup(d)
    top_left_zero = B[:d, : d + 1].is_zero_matrix
    blocks_match = (B[:d, d + 1:] - A).expand().is_zero_matrix and (B[d:, : d + 1] - C).expand().is_zero_matrix
    # det [[0, A], [C, D]] for generic entries of this shape
    GA = sympy.Matrix(d, d, sympy.symbols(f"p0:{d * d}"))
    GC = sympy.Matrix(d + 1, d + 1, sympy.symbols(f"q0:{(d + 1) ** 2}"))
    GD = sympy.Matrix(d + 1, d, sympy.symbols(f"r0:{d * (d + 1)}"))
    G = sympy.zeros(d, d + 1).row_join(GA).col_join(GC.row_join(GD))
    gens = list(GA) + list(GC) + list(GD)
    formula = _det(G, gens) == (-1) ** (d * (d + 1)) * _det(GA, gens) * _det(GC, gens)
    return {"top_left_zero": bool(top_left_zero), "blocks_match": bool(blocks_match), "block_det_formula": formula}
