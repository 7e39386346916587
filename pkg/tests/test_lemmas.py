import random

import pytest
import sympy
from symbolic import a2_identity_by_blocks, a2_identity_direct
from hypothesis import given, strategies as st

from cicycert.algebra import QQ, PrimeField, UniPoly
from cicycert.algebra.fields import DEFAULT_PRIME
from cicycert.linalg import (
    ExactMatrix,
    LayoutError,
    LemmaHypothesisError,
    assemble_layout,
    check_block_gluing,
    check_lemma_A2,
    check_lemma_A3,
    run_trials,
)
from cicycert.linalg.lemmas import (
    a2_specialization_identity,
    lemma_a2_matrix,
    random_a2_instance,
    random_a3_instance,
    random_gluing_instance,
)

t = UniPoly.t()
one = UniPoly.constant(1)
F = PrimeField(DEFAULT_PRIME)


def test_a2_example_matrix():
    B = lemma_a2_matrix(t, t - one, [2], [3, 4], 1)
    assert [list(r) for r in B.rows] == [[4, 2, 1], [9, 3, 6], [16, 4, 12]]
    rep = check_lemma_A2(t, t - one, [2], [3, 4], 1)
    assert rep.passed and rep.rank == 3 and rep.details["det"] == 12


def test_a2_specialised_top_left_block_vanishes():
    # t1 = (0) is the zero of h1 = t; identity check needs nonzero roots so use t - 5
    h1 = t - UniPoly.constant(5)
    rep = check_lemma_A2(h1, t - one, [5], [3, 4], 1)
    assert rep.details["mode"] == "specialization"
    assert rep.details["top_left_block_zero"]
    assert rep.details["identity"]["holds"]
    rep0 = check_lemma_A2(t, t - one, [0], [3, 4], 1, specialize=True)
    assert rep0.details["top_left_block_zero"]


def test_a2_rejects_common_factor():
    with pytest.raises(LemmaHypothesisError) as e:
        check_lemma_A2(t - one, t - one, [2], [3, 4], 1)
    assert e.value.code == "common_factor"


def test_a2_rejects_bad_points():
    with pytest.raises(LemmaHypothesisError):
        check_lemma_A2(t, t - one, [2], [2, 4], 1)
    with pytest.raises(LemmaHypothesisError):
        check_lemma_A2(t, t - one, [2], [3], 1)


@pytest.mark.parametrize("d", [1, 2])
def test_a2_identity_symbolically(d):
    assert a2_identity_direct(d)


def test_a2_identity_d3_by_blocks():
    # a direct 7x7 determinant in 11 symbols is out of reach at test speed
    rep = a2_identity_by_blocks(3)
    assert rep == {"top_left_zero": True, "blocks_match": True, "block_det_formula": True}


@pytest.mark.parametrize("d", [1, 2])
def test_block_route_agrees_with_direct(d):
    assert all(a2_identity_by_blocks(d).values())


def test_a3_example():
    h3 = UniPoly.from_roots([1, 2])
    rep = check_lemma_A3(t, t + one, h3, [5], [7], [11, 13], 1)
    assert rep.passed and rep.rank == 4


def test_a3_specialised_block_vanishes():
    h3 = UniPoly.from_roots([1, 2])
    rep = check_lemma_A3(t, t + one, h3, [1], [2], [11, 13], 1)
    assert rep.details["specialized"] and rep.details["block_A_zero"] and rep.passed


def test_a3_rejects_proportional():
    with pytest.raises(LemmaHypothesisError) as e:
        check_lemma_A3(t + one, (t + one) * 2, UniPoly.from_roots([1, 2]), [5], [7], [11, 13], 1)
    assert e.value.code == "linearly_dependent"


def test_a3_enforces_coprime_h1_h2():
    # h1 = t, h2 = t(...)? degree bound d=2 keeps both in range
    with pytest.raises(LemmaHypothesisError):
        check_lemma_A3(t * (t - one), t * (t + one), UniPoly.from_roots([3, 4, 5, 6]), [8, 9], [10, 11], [12, 13, 14], 2)


@pytest.mark.parametrize("layout", ["A4", "A5", "A6"])
def test_gluing_random_instances_pass(layout):
    rng = random.Random(5)
    rep = check_block_gluing(None, layout, random_gluing_instance(layout, F, rng, 2))
    assert rep.hypotheses_hold and rep.passed


def test_a6_identity_blocks():
    k = 3
    I = ExactMatrix.identity(k)
    blocks = {n: I for n in ("B11", "B12", "B22", "B23", "B33", "B34", "B42")}
    blocks["B44"] = I.scale(2)
    rep = check_block_gluing(None, "A6", blocks)
    assert rep.hypotheses["schur_block_nondegenerate"] and rep.passed


def test_a4_span_violation_reported():
    rng = random.Random(1)
    b = random_gluing_instance("A4", F, rng, 1)
    Z = ExactMatrix.zeros(b["B13"].nrows, b["B13"].ncols, F)
    b["B13"], b["B23"] = Z, Z
    b["B14"], b["B24"] = Z, Z
    rep = check_block_gluing(None, "A4", b)
    assert not rep.hypotheses["span_B13B14_contains_B11B12"]
    assert not rep.passed
    assert rep.details["conclusion_claimed"] is False


def test_layout_mismatch_is_an_error():
    with pytest.raises(LayoutError):
        assemble_layout("A9", {})
    with pytest.raises(LayoutError):
        assemble_layout("A6", {"B11": ExactMatrix.identity(2)})


@pytest.mark.parametrize("lemma,d", [("A2", 1), ("A2", 2), ("A3", 1), ("A3", 2)])
@pytest.mark.parametrize("specialize", [False, True])
def test_trials_small(lemma, d, specialize):
    tally = run_trials(lemma, 20, d, seed=3, specialize=specialize)
    assert tally["passes"] == 20 and tally["conclusion_failures"] == 0


def test_injected_singular_b23_is_a_hypothesis_failure():
    tally = run_trials("A6", 10, 2, seed=0, inject_singular=True)
    assert tally["hypothesis_failures"] == 10
    assert tally["conclusion_failures"] == 0 and tally["passes"] == 0


@given(st.integers(1, 3), st.integers(0, 10**9))
def test_a2_generic_property(d, seed):
    inst = random_a2_instance(F, random.Random(seed), d)
    try:
        rep = check_lemma_A2(*inst, d)
    except LemmaHypothesisError:
        return
    assert rep.passed


@given(st.integers(1, 3), st.integers(0, 10**9))
def test_a2_specialisation_identity_property(d, seed):
    h1, h2, t1, t2 = random_a2_instance(F, random.Random(seed), d, specialize=True)
    assert a2_specialization_identity(h1, h2, t1, t2, d)["holds"]


@given(st.integers(1, 3), st.integers(0, 10**9), st.booleans())
def test_a3_property(d, seed, spec):
    inst = random_a3_instance(F, random.Random(seed), d, specialize=spec)
    try:
        rep = check_lemma_A3(*inst, d)
    except LemmaHypothesisError:
        return
    assert rep.passed


def test_report_serialises():
    import json

    rep = check_lemma_A2(t, t - one, [2], [3, 4], 1)
    json.dumps(rep.to_dict())
