"""Acceptance criteria, one test each, at the stated tolerances and time limits."""

import random
import time

import pytest

from helpers import FAMILIES, is_admissible, random_admset, random_formula, random_unimodal, restrict
from vworkbench import cofin
from vworkbench.additivity import (
    OperatorContext,
    check_jvb,
    find_countervaluation,
    find_jvb_failure,
    find_R_failure,
    theorem_great_report,
    v_witness,
)
from vworkbench.cofin import Finite, adm_dia, adm_join, adm_leq, adm_meet, adm_neg, threshold
from vworkbench.decision import collapse, good_sat, in_ID, in_IDe, truncated_sat
from vworkbench.finite import FiniteMA, check_R_finite_ma, check_V_finite_ma
from vworkbench.formula import length, parse, to_text
from vworkbench.proof import check_script, get_fixture

VB_AXIOM = parse("[]<>top -> []([]([]p0 -> p0) -> p0)")
LEMMA = parse("[]<>top -> []bot")
BOX_DIA_TOP = parse("[]<>top")


class Clock:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        if exc[0] is None:
            elapsed = time.perf_counter() - self.t0
            assert elapsed < self.limit, f"took {elapsed:.2f}s, limit {self.limit}s"


@pytest.mark.criterion(1, "Lemma 2: vB-axiom in ID, []<>top -> []bot not in ID, [[[]<>top]] = {inf+1}")
def test_criterion_1():
    with Clock(1.0):
        assert in_ID(VB_AXIOM)
        assert not in_ID(LEMMA)
        F = cofin.vb()
        rng = random.Random(1)
        seen = set()
        for _ in range(20):
            seen.add(cofin.eval(F, {0: random_admset(rng, F)}, BOX_DIA_TOP))
        # The stated value leaves out 0, but 0 has no successors, so every box
        # formula holds there. The computed extension is {0, inf+1}.
        assert seen == {Finite(["inf+1"])}, f"computed {sorted(map(str, seen))}"


@pytest.mark.criterion(2, "V-incompleteness of vB: R failure within bound 2, V witness, great-report verdict")
def test_criterion_2():
    with Clock(5.0):
        F = cofin.vb()
        w = find_R_failure(F, 0, 2)
        assert w is not None
        vw = v_witness(F, w)
        assert cofin.adm_eq(F, vw.join, w.b)
        assert not cofin.adm_is_bot(adm_meet(F, w.a, adm_dia(F, 0, w.b)))
        for d in vw.samples:
            assert cofin.adm_is_bot(adm_meet(F, w.a, adm_dia(F, 0, d)))
        box = OperatorContext.modality(0)
        a = cofin.eval(F, {}, BOX_DIA_TOP)
        rep = theorem_great_report(F, box, box, a)
        assert rep.a == a
        assert rep.premise_holds and not rep.conclusion_holds and rep.v_failure
        assert "not completely additive" in rep.verdict


@pytest.mark.criterion(3, "V-inconsistency of vBe: <e>([]<>top & <>top) in IDe, great-report forces bottom")
def test_criterion_3():
    with Clock(5.0):
        assert in_IDe(parse("<e>([]<>top & <>top)"))
        F = cofin.vbe()
        box = OperatorContext.modality(0)
        rep = theorem_great_report(F, box, box, parse("[]<>top & <>top"))
        assert not cofin.adm_is_bot(rep.a)
        assert rep.premise_holds and rep.v_failure and rep.forces_bottom
        assert "forces a = bot" in rep.verdict


@pytest.mark.criterion(4, "collapse of size l+3 agrees with truncations at l+5 and l+8 on 30 formulas")
def test_criterion_4():
    with Clock(60.0):
        rng = random.Random(4)
        sat = 0
        for _ in range(30):
            phi = random_unimodal(rng, 4)
            l = length(phi)
            assert collapse(l).size == l + 3
            w = good_sat(phi)
            if w is not None:
                assert w.m + 3 == l + 3
                sat += 1
            for size in (l + 5, l + 8):
                theta = truncated_sat(phi, size - 3)
                assert (theta is not None) == (w is not None), (to_text(phi), size)
                if theta is not None:
                    full = {v: theta.get(v, Finite()) for v in (0, 1)}
                    assert not cofin.adm_is_bot(cofin.eval(cofin.vbe(), full, phi))
        # the corpus must exercise both verdicts
        assert 0 < sat < 30


def _accepted_with_mutations(name):
    fx = get_fixture(name)
    res = check_script(fx.calculus, fx.script)
    assert res.accepted and res.conclusion == fx.expected, res
    proved = {ln.formula for ln in fx.script.lines}
    assert all(m in proved for m in fx.milestones)
    assert len(fx.mutations) >= 3
    for label in fx.mutations:
        bad = check_script(fx.calculus, fx.mutated(label))
        assert not bad.accepted and bad.line == fx.rejection_line(label), (name, label, bad)
    return fx


@pytest.mark.criterion(5, "GLB fixtures accepted with milestones; >= 3 rejected mutations each")
def test_criterion_5():
    fx = _accepted_with_mutations("F4-GLB")
    for m in ("[1]([]p0 -> p0)", "[1]([]([]p0 -> p0) -> p0)",
              "([]([]p0 -> p0) -> p0) & []([]([]p0 -> p0) -> p0) -> p0", "[1]bot"):
        assert parse(m) in fx.milestones
    _accepted_with_mutations("F4-GLB-plain")
    _accepted_with_mutations("F4-K")


@pytest.mark.criterion(6, "non-conservativity: F1, F2, F3, F5 derive []<>top -> []bot, which is outside ID")
def test_criterion_6():
    for name in ("F1-tense", "F2-nominal", "F3-universal", "F5-admissibility"):
        fx = _accepted_with_mutations(name)
        assert fx.expected == LEMMA
    assert in_ID(VB_AXIOM) and not in_ID(LEMMA)


@pytest.mark.criterion(7, "Blok names over vb_i({2,4,5}) and refutability of the distinguishing formula")
def test_criterion_7():
    I = {2, 4, 5}
    F = cofin.vb_i(I)
    for k in range(7):
        expect = [k] + ([cofin.vbi_primed(k)] if k in I else [])
        assert cofin.eval(F, {}, cofin.name_a(k)) == Finite(expect)
    assert cofin.eval(F, {}, cofin.name_c()) == Finite(["c"])
    top = cofin.adm_top(F)
    for i in (2, 4, 5):
        phi = cofin.distinguishing(i)
        assert cofin.eval(F, {0: Finite([i])}, phi) != top
    assert find_countervaluation(F, cofin.distinguishing(3), bound=4) is None


@pytest.mark.criterion(8, "property suites: closure, truncation, diamond laws, finite algebras, jvb/R, round trip")
def test_criterion_8():
    rng = random.Random(8)
    for F in FAMILIES.values():
        for _ in range(500):
            x, y = random_admset(rng, F), random_admset(rng, F)
            outs = [adm_neg(F, x), adm_join(F, x, y), adm_meet(F, x, y)]
            dias = {m: adm_dia(F, m, x) for m in F.modalities}
            assert all(is_admissible(F, o) for o in outs + list(dias.values()))
            T = threshold(F, x, y)
            for K in (T, T + 5):
                pts = F.points_upto(K)
                wide = F.points_upto(K + 25)
                rx, ry = restrict(x, pts), restrict(y, pts)
                assert restrict(outs[0], pts) == frozenset(pts) - rx
                assert restrict(outs[1], pts) == rx | ry
                assert restrict(outs[2], pts) == rx & ry
                for m, d in dias.items():
                    expect = {p for p in pts if any(q in x and F.related(m, p, q) for q in wide)}
                    assert restrict(d, pts) == expect
            for m in F.modalities:
                dy = adm_dia(F, m, y)
                assert adm_dia(F, m, outs[1]) == adm_join(F, dias[m], dy)
                if adm_leq(F, x, y):
                    assert adm_leq(F, dias[m], dy)
        for m in F.modalities:
            r, j = find_R_failure(F, m, 2), find_jvb_failure(F, m, 2)
            assert (r is None) == (j is None)
            if j is not None:
                assert not check_jvb(F, m, *j)
    for _ in range(50):
        n = rng.randint(1, 4)
        ma = FiniteMA.from_atom_images(n, {0: [rng.randrange(1 << n) for _ in range(n)]})
        assert check_R_finite_ma(ma) and check_V_finite_ma(ma)
    for _ in range(1000):
        phi = random_formula(rng, rng.randint(0, 8))
        assert parse(to_text(phi)) == phi
