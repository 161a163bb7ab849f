import random
from itertools import combinations

import pytest

from helpers import FAMILIES, random_admset
from vworkbench import cofin
from vworkbench.additivity import (
    OperatorContext,
    RFailureWitness,
    check_jvb,
    check_R_at,
    find_countervaluation,
    find_jvb_failure,
    find_R_failure,
    theorem_great_report,
    v_witness,
)
from vworkbench.cofin import (
    Cofinite,
    Finite,
    RFailureFamily,
    adm_dia,
    adm_is_bot,
    adm_meet,
    desc_member,
    threshold,
)
from vworkbench.formula import E_MODALITY, HOLE_FORMULA, parse

TOP = Cofinite()
INF1 = Finite(["inf+1"])


def meets(F, a, m, x):
    return not adm_is_bot(adm_meet(F, a, adm_dia(F, m, x)))


def direct_r(F, m, a, b, max_c=3):
    """If a meets <m>b, look for a finite nonzero c <= b all of whose nonzero
    subsets d still have a meeting <m>d."""
    if not meets(F, a, m, b):
        return True
    T = threshold(F, a, b) + 3
    pool = [p for p in F.points_upto(T) if p != F.limit and p in b]
    for size in range(1, max_c + 1):
        for c in combinations(pool, size):
            if all(meets(F, a, m, Finite(d)) for r in range(1, size + 1) for d in combinations(c, r)):
                return True
    return False


def test_r_examples():
    F = cofin.vb()
    assert not check_R_at(F, 0, INF1, TOP)
    assert check_R_at(F, 0, Finite([0]), TOP)
    assert check_R_at(F, 0, Finite([0]), Finite([4]))
    assert check_R_at(F, 0, Finite([5]), Finite([3]))


@pytest.mark.parametrize("name,F", list(FAMILIES.items()))
def test_atom_scan_matches_direct_search(name, F):
    rng = random.Random(sum(map(ord, name)))
    for _ in range(200):
        a, b = random_admset(rng, F), random_admset(rng, F)
        for m in F.modalities:
            assert check_R_at(F, m, a, b) == direct_r(F, m, a, b), (a, b, m)


@pytest.mark.parametrize("bound", [0, 1, 2])
def test_r_failure_found_on_vb(bound):
    w = find_R_failure(cofin.vb(), 0, bound)
    assert w is not None
    assert not check_R_at(cofin.vb(), 0, w.a, w.b)


def test_finite_algebra_has_no_r_failure():
    F = cofin.finite_family(["w0", "w1", "w2"], {0: [("w0", "w1"), ("w1", "w2"), ("w2", "w2")]})
    assert find_R_failure(F, 0, 2) is None
    assert find_jvb_failure(F, 0, 2) is None


def test_v_witness_from_canonical_failure():
    F = cofin.vb()
    vw = v_witness(F, RFailureWitness(F, 0, INF1, TOP))
    assert vw.join == TOP
    assert "inf+1" in adm_dia(F, 0, TOP)
    assert INF1 in vw.samples
    for d in vw.samples:
        assert "inf+1" not in adm_dia(F, 0, d)
    assert desc_member(F, RFailureFamily(INF1, TOP), INF1)
    assert not desc_member(F, RFailureFamily(INF1, TOP), TOP)


def test_v_witness_rejects_r_pair():
    F = cofin.vb()
    with pytest.raises(ValueError):
        v_witness(F, RFailureWitness(F, 0, Finite([5]), Finite([3])))


def test_jvb_examples():
    F = cofin.vb()
    assert not check_jvb(F, 0, TOP, Cofinite(["inf+1"]))
    assert check_jvb(F, 0, Finite(), Finite())
    rng = random.Random(1)
    for _ in range(30):
        assert check_jvb(F, 0, random_admset(rng, F), TOP)


@pytest.mark.parametrize("name,F", list(FAMILIES.items()))
def test_jvb_and_r_agree(name, F):
    for m in F.modalities:
        r = find_R_failure(F, m, 2)
        j = find_jvb_failure(F, m, 2)
        assert (r is None) == (j is None), (m, r, j)


def test_universal_modality_is_additive():
    F = cofin.vbe()
    assert find_R_failure(F, E_MODALITY, 2) is None


def test_great_report_vb():
    F = cofin.vb()
    box = OperatorContext.modality(0)
    a = cofin.eval(F, {}, parse("[]<>top"))
    rep = theorem_great_report(F, box, box, a)
    assert rep.premise_holds
    assert not rep.conclusion_holds
    assert rep.v_failure
    assert rep.r_failure is not None


def test_great_report_bottom_is_consistent():
    F = cofin.vb()
    box = OperatorContext.modality(0)
    rep = theorem_great_report(F, box, box, Finite())
    assert rep.conclusion_holds and not rep.v_failure


def test_great_report_vbe_forces_bottom():
    F = cofin.vbe()
    box = OperatorContext.modality(0)
    rep = theorem_great_report(F, box, box, parse("[]<>top & <>top"))
    assert rep.a == INF1
    assert rep.v_failure and rep.forces_bottom


def test_great_report_vbi():
    F = cofin.vb_i({2})
    box0 = OperatorContext(cofin.box_alpha1(HOLE_FORMULA))
    rep = theorem_great_report(F, box0, OperatorContext.modality(0), cofin.name_c())
    assert rep.a == Finite(["c"])
    assert rep.premise_holds and rep.v_failure


def test_operator_context_rejects_variables():
    with pytest.raises(ValueError):
        OperatorContext(parse("[]p0"))


def test_countervaluation_for_lemma_formula():
    F = cofin.vb()
    assert find_countervaluation(F, parse("[]<>top -> []bot")) == {}
    assert find_countervaluation(F, parse("[]<>top -> []([]([]p0 -> p0) -> p0)")) is None
