import random

import pytest
from hypothesis import given, settings, strategies as st

from cicycert.algebra import QQ, RationalCurve
from cicycert.bundles import (
    BundleError,
    SplittingType,
    immersion_defect,
    is_free,
    is_unobstructed,
    mobius_reparametrize,
    normal_bundle_type,
    splitting_from_dims,
    splitting_report,
    splitting_type,
    twist_profile,
    twisted_section_dim,
)
from cicycert.witnesses import build_witness, random_ci_through_curve, random_curve

from strategies import curves


def test_splitting_type_algebra():
    E = SplittingType((-1, 2, -1))
    assert E.parts == (2, -1, -1)
    assert E.rank == 3 and E.degree == 0
    assert E.h0(0) == 3 and E.h0(-3) == 0 and E.h0(1) == 6
    assert not E.is_free() and E.is_unobstructed()
    assert E.remove(2).parts == (-1, -1)
    with pytest.raises(Exception):
        E.remove(5)


@settings(max_examples=60)
@given(st.lists(st.integers(-4, 4), min_size=1, max_size=5))
def test_splitting_recovered_from_section_counts(parts):
    E = SplittingType(tuple(parts))
    lo = -max(parts) - 2
    dims = {k: E.h0(k) for k in range(lo, -min(parts) + 2)}
    assert splitting_from_dims(dims, len(parts)) == E


def test_splitting_from_dims_rejects_bad_window():
    with pytest.raises(BundleError):
        splitting_from_dims({0: 1, 1: 2}, 1)


def test_line_in_p4():
    pkg = random_ci_through_curve(4, (5,), 1, seed=0)
    assert splitting_type(pkg, 0) == SplittingType((2, 1, 1, 1))


@pytest.mark.parametrize("n,d", [(4, 1), (5, 1), (5, 2), (7, 1), (4, 3)])
def test_ambient_section_count(n, d):
    degs = {4: (5,), 5: (3, 3), 7: (2, 2, 2, 2)}[n]
    pkg = random_ci_through_curve(n, degs, d, seed=n + d)
    assert twisted_section_dim(pkg, 0, 0) == (n + 1) * d + n
    assert twisted_section_dim(pkg, 0, 0, QQ) == (n + 1) * d + n


@pytest.mark.parametrize("d", [1, 2, 3])
def test_rigid_quintic(d):
    pkg = random_ci_through_curve(4, (5,), d, seed=10 + d)
    E = splitting_type(pkg, 1)
    assert E == SplittingType((2, -1, -1))
    assert twisted_section_dim(pkg, 1, 0) == 3
    nb = normal_bundle_type(pkg)
    assert nb["normal_splitting"] == [-1, -1] and nb["verdict"] == "PASS"
    assert not is_free(pkg, 1) and is_unobstructed(pkg, 1)
    assert is_free(pkg, 0)


def test_random_33_freeness_one_level_down():
    pkg = random_ci_through_curve(5, (3, 3), 1, seed=2)
    assert is_free(pkg, 1)
    assert splitting_type(pkg, 2) == SplittingType((2, -1, -1))


def test_twisted_dims_modular_match_rational_small():
    pkg = random_ci_through_curve(5, (3, 3), 1, seed=5)
    for s in range(3):
        for k in (-2, -1, 0, 1):
            assert twisted_section_dim(pkg, s, k) == twisted_section_dim(pkg, s, k, QQ)


def test_twist_profile_monotone():
    pkg = random_ci_through_curve(4, (5,), 2, seed=1)
    prof = twist_profile(pkg, 1)
    ks = sorted(prof["dims"])
    vals = [prof["dims"][k] for k in ks]
    assert vals[0] == 0 and all(a <= b for a, b in zip(vals, vals[1:]))
    assert prof["monotone"]


def test_splitting_report_fields():
    pkg = build_witness((5,), 1, seed=0)
    rep = splitting_report(pkg, 1)
    assert rep["splitting"] == [2, -1, -1]
    assert rep["degree"] == rep["expected_degree"] == 0
    assert rep["passed"] and rep["unobstructed"] and not rep["free"]


def test_level_bounds():
    pkg = build_witness((5,), 1, seed=0)
    with pytest.raises(BundleError):
        twisted_section_dim(pkg, 2, 0)


def test_normal_bundle_obstructed_splitting_fails():
    pkg = build_witness((5,), 1, seed=0)
    nb = normal_bundle_type(pkg, tangent=SplittingType((2, 0, -2)))
    assert nb["normal_splitting"] == [0, -2]
    assert nb["verdict"] == "FAIL" and not nb["passed"]


def test_immersion_examples():
    assert immersion_defect(RationalCurve.from_lists([[1], [0, 1], [0], [0], [0]], degree=1)).m == 0
    cusp = immersion_defect(RationalCurve.from_lists([[1], [0, 0, 1], [0, 0, 0, 1], [0]], degree=3))
    assert cusp.m == 1 and cusp.support[0][1] == 1
    for d in (2, 3, 4):
        rnc = RationalCurve.from_lists([[0] * k + [1] for k in range(d + 1)], degree=d)
        assert immersion_defect(rnc).m == 0


def test_cusp_at_infinity():
    # t -> 1/t moves the cusp of [1, t^2, t^3, 0] to infinity
    c = RationalCurve.from_lists([[1], [0, 0, 1], [0, 0, 0, 1], [0]], degree=3)
    moved = mobius_reparametrize(c, (0, 1, 1, 0))
    rep = immersion_defect(moved)
    assert rep.m == 1 and rep.support == (("inf", 1),)


@settings(max_examples=30)
@given(curves(n=3, d=3), st.tuples(*[st.integers(-3, 3)] * 4))
def test_defect_is_mobius_invariant(c, abcd):
    a, b, g, dl = abcd
    if a * dl - b * g == 0:
        return
    assert immersion_defect(mobius_reparametrize(c, abcd)).m == immersion_defect(c).m


def test_mobius_rejects_degenerate_map():
    c = random_curve(3, 2, random.Random(0))
    with pytest.raises(BundleError):
        mobius_reparametrize(c, (1, 2, 2, 4))


def test_paper_2222_has_wrong_degree():
    # the witness X is singular at points of the curve
    pkg = build_witness((2, 2, 2, 2), 2, seed=0, certify=False)
    rep = splitting_report(pkg, 4)
    assert rep["degree"] > rep["expected_degree"]
    assert not rep["passed"]


def test_non_default_prime_is_kept():
    from cicycert.algebra import PrimeField

    pkg = build_witness((5,), 1, seed=0)
    F = PrimeField(1_000_000_007)
    assert splitting_report(pkg, 1, F)["splitting"] == [2, -1, -1]
    with pytest.raises(ValueError):
        pkg.with_field(F).with_field(PrimeField(101))
