from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cicycert.algebra import (
    QQ,
    CurveError,
    HomForm,
    PrimeField,
    RationalCurve,
    UniPoly,
    compose_form_with_curve,
    divide_form,
    field_from_json,
    gcd_all,
    is_squarefree,
    jacobian_row,
    monomials,
    partial_derivative,
    poly_gcd,
    squarefree_decomposition,
    variables,
)
from cicycert.algebra.fields import DEFAULT_PRIME, FieldError

from strategies import F_SMALL, SMALL_P, curves, forms, unipolys

T = UniPoly.t()


def test_default_prime_is_prime_and_62_bit():
    F = PrimeField(DEFAULT_PRIME)
    assert DEFAULT_PRIME == 2**62 - 57
    assert F.p.bit_length() == 62


def test_prime_field_rejects_composite():
    with pytest.raises(FieldError):
        PrimeField(91)


def test_prime_field_inverse_and_division():
    F = PrimeField(101)
    assert F.reduce(7 * F.inv(7)) == 1
    assert F.div(3, 7) == F.reduce(3 * F.inv(7))
    assert F(Fraction(1, 2)) == F.inv(2)
    with pytest.raises(ZeroDivisionError):
        F.inv(0)


def test_field_json_round_trip():
    for F in (QQ, PrimeField(101), PrimeField(DEFAULT_PRIME)):
        assert field_from_json(F.to_json()) == F


# --- univariate ---------------------------------------------------------------


def test_from_roots_and_evaluation():
    p = UniPoly.from_roots([1, 2, 3])
    assert p.coeffs == (-6, 11, -6, 1)
    assert [p(x) for x in (1, 2, 3, 4)] == [0, 0, 0, 6]


def test_gcd_and_squarefree():
    a = UniPoly.from_roots([1, 1, 2])
    b = UniPoly.from_roots([1, 3])
    assert poly_gcd(a, b) == UniPoly.from_roots([1])
    assert not is_squarefree(a)
    dec = squarefree_decomposition(a)
    assert sorted((f.coeffs, m) for f, m in dec) == sorted([(UniPoly.from_roots([2]).coeffs, 1),
                                                            (UniPoly.from_roots([1]).coeffs, 2)])
    assert gcd_all([UniPoly.constant(3), a]).degree == 0


@given(unipolys(), unipolys(), unipolys())
def test_unipoly_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b).derivative() == a.derivative() * b + a * b.derivative()


@given(unipolys(), unipolys().filter(lambda p: not p.is_zero()))
def test_divmod_identity(a, b):
    q, r = a.divmod(b)
    assert q * b + r == a
    assert r.is_zero() or r.degree < b.degree


# --- forms ----------------------------------------------------------------


def test_compose_examples():
    z = variables(5)
    c = RationalCurve.from_lists([[1], [0, 1], [0, 0, 1], [0, 0, 0, 1], [0, 0, 0, 0, 1]])
    assert compose_form_with_curve(z[0], c) == UniPoly.constant(1)
    w = variables(2)
    # [t, t^2] has a base point at 0, so pass the raw components
    assert compose_form_with_curve(w[0] * w[1], (T, T**2)) == T**3


def test_compose_quadric_extension_vanishes():
    z = variables(8)
    g4 = z[6] ** 2 + z[7] ** 2 - z[2] ** 2 - z[3] ** 2
    c = RationalCurve.from_lists([[1, 2], [3, -1], [0, 5], [2, 2]])
    cg = c.extend((0, 1, 2, 3, 0, 1, 2, 3))
    assert compose_form_with_curve(g4, cg).is_zero()


def test_partial_derivative_examples():
    z = variables(8)
    assert partial_derivative(z[0] ** 2, 0) == z[0] * 2
    assert partial_derivative(z[6] ** 2 + z[7] ** 2 - z[2] ** 2 - z[3] ** 2, 2) == z[2] * -2
    w = variables(6)
    assert partial_derivative(w[0] * w[4] + w[1] * w[5], 5) == w[1]


def test_jacobian_row_examples():
    z = variables(5)
    c = RationalCurve.from_lists([[1, 1], [0, 1], [2], [3], [0, 2]])
    assert jacobian_row(z[0], c, 5) == [1, 5] + [0] * 8
    line = RationalCurve.from_lists([[1], [0, 1], [1], [1], [1]])
    assert jacobian_row(z[0] ** 2, line, 2) == [2, 4] + [0] * 8


def test_jacobian_rows_of_linear_form_are_vandermonde():
    from cicycert.linalg import V1

    z = variables(3)
    c = RationalCurve.from_lists([[1, 1, 0], [0, 1], [0, 0, 1]])
    pts = [2, 3, 5]
    rows = [jacobian_row(z[0], c, t)[:3] for t in pts]
    V = V1(UniPoly.constant(1), pts, 2)
    # V1 lists t^m .. t^0; the coefficient convention is t^0 .. t^d
    assert [list(reversed(r)) for r in V.rows] == rows


def test_homform_rejects_bad_exponents():
    with pytest.raises(ValueError):
        HomForm(2, 2, {(1, 0): 1})


def test_curve_validation():
    with pytest.raises(CurveError):
        RationalCurve.from_lists([[1, 1], [1, 1]])
    with pytest.raises(CurveError):
        RationalCurve.from_lists([[1], [2]], degree=1)


def test_divide_form():
    z = variables(3)
    g = z[0] * z[1] + z[2] ** 2
    f = g * (z[0] - z[2] * 3)
    q, r = divide_form(f, g)
    assert r.is_zero() and q == z[0] - z[2] * 3
    _, r2 = divide_form(f + z[1] ** 3, g)
    assert not r2.is_zero()


@given(forms())
def test_euler_identity(g):
    z = variables(g.nvars)
    acc = HomForm(g.nvars, g.degree, {}, g.field)
    for j in range(g.nvars):
        acc = acc + z[j] * g.partial(j) if g.degree > 0 else acc
    assert acc == g * g.degree


@given(st.data())
def test_chain_rule_along_curve(data):
    nv = data.draw(st.integers(2, 5))
    g = data.draw(forms(nvars=nv))
    c = data.draw(curves(n=nv - 1))
    lhs = compose_form_with_curve(g, c).derivative()
    rhs = UniPoly.zero()
    for dg, cj in zip(g.gradient(), c.components):
        rhs = rhs + compose_form_with_curve(dg, c) * cj.derivative()
    assert lhs == rhs


@given(st.data())
def test_compose_is_linear(data):
    nv = data.draw(st.integers(2, 4))
    h = data.draw(st.integers(1, 3))
    g1, g2 = data.draw(forms(nvars=nv, degree=h)), data.draw(forms(nvars=nv, degree=h))
    a = data.draw(st.integers(-5, 5))
    c = data.draw(curves(n=nv - 1))
    assert compose_form_with_curve(g1 * a + g2, c) == compose_form_with_curve(g1, c) * a + compose_form_with_curve(g2, c)


class Dual:
    """a + b*eps with eps^2 = 0 over GF(p)."""

    def __init__(self, a, b=0):
        self.a, self.b = a % SMALL_P, b % SMALL_P

    def _w(self, o):
        return o if isinstance(o, Dual) else Dual(o)

    def __add__(self, o):
        o = self._w(o)
        return Dual(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __mul__(self, o):
        o = self._w(o)
        return Dual(self.a * o.a, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = Dual(1)
        for _ in range(k):
            out = out * self
        return out


def _eval_dual(g, pt):
    acc = Dual(0)
    for e, coef in g.terms.items():
        term = Dual(coef)
        for x, k in zip(pt, e):
            term = term * x**k
        acc = acc + term
    return acc


@given(st.data())
def test_jacobian_row_matches_dual_number_derivative(data):
    nv = data.draw(st.integers(2, 4))
    d = data.draw(st.integers(1, 3))
    g = data.draw(forms(nvars=nv, field=F_SMALL))
    c = data.draw(curves(n=nv - 1, d=d, field=F_SMALL))
    t = data.draw(st.integers(0, SMALL_P - 1))
    col = data.draw(st.integers(0, nv * (d + 1) - 1))
    j, k = divmod(col, d + 1)
    pt = [Dual(v) for v in c(t)]
    pt[j] = pt[j] + Dual(0, pow(t, k, SMALL_P))
    assert jacobian_row(g, c, t)[col] == _eval_dual(g, pt).b


def test_monomial_count():
    from math import comb

    assert len(monomials(5, 5)) == comb(9, 4) == 126
    assert len(monomials(4, 4)) == 35
