import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from cicycert.algebra import QQ, HomForm, RationalCurve, UniPoly, variables
from cicycert.algebra.poly import compose_form_with_curve
from cicycert.witnesses import (
    CompleteIntersectionSpec,
    MarkedPointSet,
    WitnessPackage,
    WitnessUnavailable,
    build_witness,
    package_for,
    parse_type,
    projected_form_through,
    quartic_surface_curve,
    random_ci_through_curve,
    random_curve,
    segre_quadric_curve,
    singular_points_on_curve,
    smoothness_along_curve,
    surface_containment,
    vanishing_dimension,
    vanishing_forms,
)

PAPER_TYPES = [(2, 2, 2, 2), (3, 2, 2), (3, 3), (4, 2), (5,)]


def test_parse_type():
    assert parse_type("3,3") == (3, 3)
    assert parse_type([5]) == (5,)
    with pytest.raises(ValueError):
        parse_type("3,x")


def test_spec_rejects_non_cy_degrees():
    z = variables(6)
    with pytest.raises(ValueError):
        CompleteIntersectionSpec(5, (3, 2), (z[0] ** 3, z[0] ** 2))


def test_marked_points_must_be_distinct_and_counted():
    with pytest.raises(ValueError):
        MarkedPointSet(((1, 1),))
    with pytest.raises(ValueError):
        MarkedPointSet(((1, 2),)).check_counts((5,), 1)


@pytest.mark.parametrize("degs", PAPER_TYPES)
@pytest.mark.parametrize("d", [1, 2])
def test_paper_witness_is_incident(degs, d):
    pkg = build_witness(degs, d, seed=3, certify=False)
    assert pkg.n == sum(degs) - 1
    assert pkg.is_incident()
    for g, pts in zip(pkg.spec.forms, pkg.points.points):
        assert len(pts) == g.degree * d + 1


def test_cg_of_quadric_type_kills_the_difference_form():
    # g4 = z6^2 + z7^2 - z2^2 - z3^2 on [c0, c1, c2, c3, c0, c1, c2, c3]
    pkg = build_witness((2, 2, 2, 2), 1, seed=0, certify=False)
    z = variables(8)
    g4 = z[6] ** 2 + z[7] ** 2 - z[2] ** 2 - z[3] ** 2
    assert pkg.spec.forms[3] == g4
    assert compose_form_with_curve(g4, pkg.curve).is_zero()
    comps = pkg.curve.components
    assert comps[4:] == comps[:4]


def test_quintic_witness_lies_in_hyperplane():
    pkg = build_witness((5,), 1, seed=0)
    assert pkg.curve.components[4].is_zero()


def test_segre_line():
    g, c = segre_quadric_curve(1, 1, seed=0, linear_change=False)
    assert g == variables(4)[0] * variables(4)[3] - variables(4)[1] * variables(4)[2]
    assert compose_form_with_curve(g, c).is_zero()
    assert c.degree == 1


@pytest.mark.parametrize("d,a", [(2, 1), (3, 1), (3, 2), (4, 2)])
def test_segre_curve_on_moved_quadric(d, a):
    g, c = segre_quadric_curve(d, a, seed=d * 10 + a)
    assert compose_form_with_curve(g, c).is_zero()
    assert c.degree == d


def test_segre_bidegree_range():
    with pytest.raises(ValueError):
        segre_quadric_curve(3, 3)


@pytest.mark.parametrize("d", [1, 3, 8])
def test_quartic_surface_curve(d):
    g, c, pts = quartic_surface_curve(d, seed=1)
    assert g.degree == 4 and compose_form_with_curve(g, c).is_zero()
    assert len(pts) == 4 * d


def test_quartic_bound():
    with pytest.raises(WitnessUnavailable):
        quartic_surface_curve(9)
    with pytest.raises(WitnessUnavailable):
        build_witness((5,), 12, seed=0)


@pytest.mark.parametrize("n,h,d,expected", [
    (3, 4, 1, 30),      # 35 - 5
    (4, 4, 1, 65),
    (4, 5, 3, 110),     # 126 - 16
    (5, 3, 1, 52),      # 56 - 4
    (7, 2, 2, 31),      # 36 - 5
])
def test_vanishing_dimension_is_generic(n, h, d, expected):
    c = random_curve(n, d, random.Random(n * 100 + d))
    assert vanishing_dimension(c, h) == expected


def test_quartics_through_an_octic_curve_exist():
    c = random_curve(3, 8, random.Random(2))
    assert vanishing_dimension(c, 4) >= 2


@settings(max_examples=15)
@given(st.integers(1, 3), st.integers(2, 4), st.integers(0, 10**6))
def test_vanishing_forms_vanish(d, h, seed):
    c = random_curve(3, d, random.Random(seed))
    basis = vanishing_forms(c, h)
    assert len(basis) == vanishing_dimension(c, h)
    assert all(compose_form_with_curve(g, c).is_zero() for g in basis[:5])
    g = projected_form_through(c, h, random.Random(seed + 1))
    assert not g.is_zero() and compose_form_with_curve(g, c).is_zero()
    assert all(isinstance(v, int) for v in g.terms.values())


@pytest.mark.parametrize("degs", PAPER_TYPES)
def test_json_round_trip(degs):
    pkg = build_witness(degs, 1, seed=5, certify=False)
    doc = json.loads(json.dumps(pkg.to_json()))
    back = WitnessPackage.from_json(doc)
    assert back == pkg
    assert back.to_json() == pkg.to_json()


def test_random_mode_round_trip_and_determinism():
    a = random_ci_through_curve(5, (3, 3), 2, seed=9)
    b = random_ci_through_curve(5, (3, 3), 2, seed=9)
    assert a == b
    assert WitnessPackage.from_json(a.to_json()) == a
    assert a.provenance == "random" and a.is_incident()


def test_random_mode_rejects_impossible_degree():
    # cubics in P^2-sized systems cannot hold a curve of high degree
    with pytest.raises(ValueError):
        random_ci_through_curve(4, (5,), 40, seed=0)


def test_package_for_modes():
    assert package_for("5", 1, "random", seed=1).provenance == "random"
    assert package_for("5", 1, "paper", seed=1).provenance == "paper"
    with pytest.raises(ValueError):
        package_for("5", 1, "other")


def test_extension_prefix_is_base_curve():
    pkg = build_witness((3, 3), 2, seed=4, certify=False)
    comps = pkg.curve.components
    pattern = pkg.meta["extension_pattern"]
    for j, src in enumerate(pattern):
        assert comps[j] == comps[src]


@pytest.mark.parametrize("degs", PAPER_TYPES)
def test_paper_witness_contains_the_base_surface(degs):
    pkg = build_witness(degs, 1, seed=2, certify=False)
    sc = surface_containment(pkg)
    assert sc["contained"] and all(sc["per_form"])


def test_random_witness_has_no_surface_record():
    assert surface_containment(random_ci_through_curve(4, (5,), 1, seed=0)) is None


def test_smoothness_quintic_generic():
    pkg = build_witness((5,), 1, seed=0)
    rep = smoothness_along_curve(pkg, 5, seed=1)
    assert rep["passed"] and all(p["rank"] == 1 for p in rep["points"])
    assert singular_points_on_curve(pkg)["smooth"]


def test_smoothness_detects_squared_factor():
    # z4^2 * q vanishes to order two along a curve in {z4 = 0}
    pkg = build_witness((5,), 1, seed=0)
    z = variables(5)
    bad = z[4] ** 2 * z[0] ** 3
    spec = CompleteIntersectionSpec(4, (5,), (bad,))
    sing = WitnessPackage(spec, pkg.curve, pkg.points, "random")
    assert sing.is_incident()
    assert not smoothness_along_curve(sing, 3, seed=0)["passed"]
    assert singular_points_on_curve(sing)["rank_drops_everywhere"]


def test_exact_check_sees_isolated_singular_points():
    # z0 z3 - z1 z2 + z4 * (...) style: a point singularity that sampling misses
    c = RationalCurve.from_lists([[1, 0], [0, 1], [0, 0], [0, 0], [0, 0]])  # [1, t, 0, 0, 0]
    z = variables(5)
    # gradient along c is (0, 0, t^4 * ..., ...) ; choose g = z2 * z1^4 + z3 * z0^4 : singular where t = 0
    g = z[2] * z[1] ** 4 + z[3] * z[0] ** 3 * z[1]
    pkg = WitnessPackage(CompleteIntersectionSpec(4, (5,), (g,)), c,
                         MarkedPointSet(((2, 3, 5, 7, 11, 13),)), "random")
    assert pkg.is_incident()
    exact = singular_points_on_curve(pkg)
    assert not exact["smooth"] and exact["affine_degree"] == 1
    assert smoothness_along_curve(pkg, 3, seed=0)["passed"]


@pytest.mark.parametrize("degs,smooth", [((2, 2, 2, 2), False), ((3, 2, 2), False),
                                         ((3, 3), True), ((4, 2), True), ((5,), True)])
def test_paper_witness_exact_smoothness(degs, smooth):
    pkg = build_witness(degs, 1, seed=0, certify=False)
    assert singular_points_on_curve(pkg)["smooth"] is smooth


def test_build_witness_records_attempts():
    pkg = build_witness((4, 2), 1, seed=1)
    assert pkg.meta["attempts"] >= 1
    assert pkg.meta["type"] == "4,2"
