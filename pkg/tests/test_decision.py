import random

import pytest
from hypothesis import assume, given, settings

from helpers import formulas, kripke_truth, random_unimodal, unimodal
from vworkbench import cofin
from vworkbench.decision import (
    DecisionError,
    collapse,
    good_sat,
    good_sat_enumerative,
    in_ID,
    in_IDe,
    truncated_sat,
    valid_ide,
)
from vworkbench.formula import BOT, E_MODALITY, Box, Neg, Nominal, Var, exists, length, nsub, parse, substitute

VB_AXIOM = parse("[]<>top -> []([]([]p0 -> p0) -> p0)")
LEMMA = parse("[]<>top -> []bot")


def collapse_truth(m, val, phi):
    frame = collapse(m).frame
    rels = {0: frame.relations[0], E_MODALITY: frame.relations[E_MODALITY]}
    return frame.worlds, rels, kripke_truth(frame.worlds, rels, val, phi)


def assert_good_witness(phi, w):
    """The witness satisfies phi on the collapse and every nsub formula true at inf
    is also true at some natural."""
    ws, rels, truth = collapse_truth(w.m, w.valuation, phi)
    assert w.world in truth
    nats = {x for x in ws if x.startswith("n:")}
    for psi in nsub(phi):
        ext = kripke_truth(ws, rels, w.valuation, psi)
        if "inf" in ext:
            assert ext & nats, psi


def test_collapse_shape():
    c = collapse(2)
    assert c.size == 5
    c0 = collapse(0).frame
    assert set(c0.worlds) == {"inf+1", "inf", "n:0"}
    assert c0.relations[0] == {("inf", "n:0"), ("inf", "inf"), ("inf+1", "inf")}


@pytest.mark.parametrize("m", range(5))
def test_zero_is_a_dead_end(m):
    assert not any(x == "n:0" for x, _ in collapse(m).frame.relations[0])


def test_good_sat_examples():
    phi = parse("[]<>top & ~[]bot")
    w = good_sat(phi)
    assert w.world == "inf+1"
    assert w.m == length(phi)
    assert_good_witness(phi, w)
    assert good_sat(BOT) is None
    assert good_sat(Neg(VB_AXIOM)) is None


def test_membership_examples():
    assert in_ID(VB_AXIOM)
    assert not in_ID(LEMMA)
    assert in_IDe(parse("<e>([]<>top & <>top)"))


def test_fragment_errors():
    with pytest.raises(DecisionError):
        good_sat(Nominal(0))
    with pytest.raises(DecisionError):
        good_sat(parse("[1]p0"))
    with pytest.raises(DecisionError):
        good_sat(parse("p0 & p1 & p2 & p3"), max_vars=3)
    with pytest.raises(DecisionError):
        in_ID(exists(Var(0)))


@settings(max_examples=60, deadline=None)
@given(unimodal(depth=3, n_vars=1))
def test_dp_agrees_with_enumeration(phi):
    assume(length(phi) + 3 <= 20)
    w = good_sat(phi)
    brute = good_sat_enumerative(phi)
    assert (w is None) == (brute is None)
    if w is not None:
        assert_good_witness(phi, w)


@settings(max_examples=40, deadline=None)
@given(formulas(depth=3, n_vars=1, boxes=(0, E_MODALITY), nominals=False, converse=False, universal=False))
def test_dp_agrees_with_enumeration_bimodal(phi):
    assume(length(phi) + 3 <= 20)
    w = good_sat(phi)
    assert (w is None) == (good_sat_enumerative(phi) is None)
    if w is not None:
        assert_good_witness(phi, w)


@settings(max_examples=60, deadline=None)
@given(unimodal(depth=3, n_vars=2))
def test_witnesses_are_good(phi):
    w = good_sat(phi)
    if w is not None:
        assert_good_witness(phi, w)


@settings(max_examples=40, deadline=None)
@given(unimodal(depth=3, n_vars=2))
def test_truncated_valuations_satisfy(phi):
    theta = truncated_sat(phi, length(phi))
    if theta is not None:
        F = cofin.vbe()
        full = {v: theta.get(v, cofin.Finite()) for v in (0, 1)}
        assert not cofin.adm_is_bot(cofin.eval(F, full, phi))


@settings(max_examples=40, deadline=None)
@given(unimodal(depth=3, n_vars=2))
def test_validity_closed_under_necessitation(phi):
    if valid_ide(phi):
        assert valid_ide(Box(0, phi))


@settings(max_examples=40, deadline=None)
@given(unimodal(depth=3, n_vars=2), unimodal(depth=2, n_vars=2))
def test_validity_closed_under_substitution(phi, psi):
    if valid_ide(phi):
        assert valid_ide(substitute(phi, {0: psi}))


def test_stability_small_corpus():
    rng = random.Random(2024)
    for _ in range(10):
        phi = random_unimodal(rng, 3)
        l = length(phi)
        verdict = good_sat(phi) is not None
        for size in (l + 5, l + 8):
            assert (truncated_sat(phi, size - 3) is not None) == verdict, phi


def test_backends_agree_on_enumeration():
    phi = parse("<>p0 & [](p0 -> <>p0)")
    assert good_sat_enumerative(phi, m=3, use_numba=True) == good_sat_enumerative(phi, m=3, use_numba=False)
