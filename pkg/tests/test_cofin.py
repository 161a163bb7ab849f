import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import FAMILIES, admsets, is_admissible, random_admset, restrict
from vworkbench import cofin
from vworkbench.cofin import (
    Cofinite,
    Explicit,
    Finite,
    FiniteSubsets,
    JvbFamily,
    RFailureFamily,
    adm_dia,
    adm_join,
    adm_leq,
    adm_meet,
    adm_neg,
    adm_top,
    eval,
    eval_names_vbi,
    lub_of_family,
    threshold,
)
from vworkbench.formula import E_MODALITY, And, Box, Imp, Neg, Or, Var, exists, parse

FAM = list(FAMILIES.items())
WINDOW = 25


def mods(F):
    return list(F.modalities)


# ---------------------------------------------------------------- construction


def test_vbe_relation():
    F = cofin.vbe()
    assert F.head == ("inf+1", "inf")
    assert F.related(0, "inf+1", "inf") and F.related(0, "inf", "inf")
    assert F.related(0, "inf", 7) and F.related(0, 5, 2)
    assert not F.related(0, 2, 5) and not F.related(0, "inf+1", 3)
    assert F.related(E_MODALITY, 0, "inf+1")


def test_vbi_doubles_indexed_layers():
    F = cofin.vb_i({2})
    assert "a2'" in F.head
    assert eval_names_vbi({2}, 2) == Finite([2, "a2'"])


@pytest.mark.parametrize("bad", [{0}, {1}, {1, 3}])
def test_vbi_rejects_small_indices(bad):
    with pytest.raises(ValueError):
        cofin.vb_i(bad)


def test_unknown_modality():
    with pytest.raises(ValueError):
        eval(cofin.vb(), {}, Box(1, Var(0)))


# ---------------------------------------------------------------- examples


def test_boolean_examples():
    F = cofin.vb()
    assert adm_neg(F, Finite()) == Cofinite() == adm_top(F)
    assert adm_join(F, Finite([1]), Cofinite([1, 2])) == Cofinite([2])
    assert adm_leq(F, Finite(["inf+1"]), Cofinite())


def test_join_example_pointwise():
    F = cofin.vb()
    x, y = Finite([1]), Cofinite([1, 2])
    pts = F.points_upto(10)
    assert restrict(adm_join(F, x, y), pts) == restrict(x, pts) | restrict(y, pts)


def test_dia_examples():
    F = cofin.vb()
    assert adm_dia(F, 0, Finite([3])) == Cofinite([0, 1, 2, 3, "inf+1"])
    assert adm_dia(F, 0, adm_top(F)) == Cofinite([0])
    assert adm_dia(F, 0, Finite()) == Finite()


def test_box_dia_top_over_vb():
    # the limit point sees everything, 0 sees nothing: the extension is {0, inf+1}
    F = cofin.vb()
    rng = random.Random(3)
    for _ in range(20):
        theta = {0: random_admset(rng, F)}
        assert eval(F, theta, parse("[]<>top")) == Finite([0, "inf+1"])


def test_box_of_cofinite():
    F = cofin.vb()
    got = eval(F, {0: Cofinite([5])}, parse("[]p0"))
    assert got == Finite([0, 1, 2, 3, 4, 5, "inf+1"])
    pts = F.points_upto(12)
    expected = {p for p in pts if all(q != 5 for q in pts if F.related(0, p, q))}
    assert restrict(got, pts) == expected


def test_universal_makes_vbe_formula_valid():
    F = cofin.vbe()
    rng = random.Random(5)
    for phi in (parse("<e>([]<>top & <>top)"), exists(parse("[]<>top & <>top"))):
        for _ in range(10):
            assert eval(F, {0: random_admset(rng, F)}, phi) == Cofinite()


def test_names():
    assert eval_names_vbi(set(), 3) == Finite([3])
    assert eval(cofin.vb_i({2}), {}, cofin.name_c()) == Finite(["c"])
    for k in range(2, 7):
        expect = [k] + ([cofin.vbi_primed(k)] if k in (2, 4, 5) else [])
        assert eval_names_vbi({2, 4, 5}, k) == Finite(expect)


def test_lub_examples():
    F = cofin.vb()
    assert lub_of_family(F, FiniteSubsets(Cofinite(["inf+1"]))) == Cofinite(["inf+1"])
    assert lub_of_family(F, RFailureFamily(Finite(["inf+1"]), Cofinite())) == Cofinite()
    assert lub_of_family(F, Explicit((Finite([1]), Finite([2])))) == Finite([1, 2])


def test_lub_of_jvb_family():
    F = cofin.vb()
    # every admissible x avoiding the limit has a diamond inside W \ {inf+1}
    assert lub_of_family(F, JvbFamily(Cofinite(), Cofinite(["inf+1"]))) == Cofinite()


# ---------------------------------------------------------------- closure


@pytest.mark.parametrize("name,F", FAM)
def test_closure(name, F):
    rng = random.Random(sum(map(ord, name)))
    for _ in range(500):
        x, y = random_admset(rng, F), random_admset(rng, F)
        outs = [adm_neg(F, x), adm_join(F, x, y), adm_meet(F, x, y)]
        outs += [adm_dia(F, m, x) for m in mods(F)]
        for out in outs:
            assert is_admissible(F, out), (x, y, out)


# ---------------------------------------------------------------- truncation oracle


def oracle_dia(F, m, x, pts):
    window = F.points_upto(pts[-1] + WINDOW) if isinstance(pts[-1], int) else pts
    inside = [q for q in window if q in x]
    return frozenset(p for p in pts if any(F.related(m, p, q) for q in inside))


@pytest.mark.parametrize("name,F", FAM)
def test_truncation_oracle(name, F):
    rng = random.Random(17 + len(name))
    for _ in range(500):
        x, y = random_admset(rng, F), random_admset(rng, F)
        T = threshold(F, x, y)
        for K in (T, T + 5):
            pts = F.points_upto(K)
            full = frozenset(pts)
            rx, ry = restrict(x, pts), restrict(y, pts)
            assert restrict(adm_neg(F, x), pts) == full - rx
            assert restrict(adm_join(F, x, y), pts) == rx | ry
            assert restrict(adm_meet(F, x, y), pts) == rx & ry
            assert adm_leq(F, x, y) == (rx <= ry)
            for m in mods(F):
                assert restrict(adm_dia(F, m, x), pts) == oracle_dia(F, m, x, pts)


# ---------------------------------------------------------------- diamond laws


@pytest.mark.parametrize("name,F", FAM)
def test_dia_monotone_and_additive(name, F):
    @settings(max_examples=150, deadline=None)
    @given(admsets(F), admsets(F))
    def check(x, y):
        for m in mods(F):
            dx, dy = adm_dia(F, m, x), adm_dia(F, m, y)
            assert adm_dia(F, m, adm_join(F, x, y)) == adm_join(F, dx, dy)
            if adm_leq(F, x, y):
                assert adm_leq(F, dx, dy)
            m_xy = adm_dia(F, m, adm_meet(F, x, y))
            assert adm_leq(F, m_xy, dx) and adm_leq(F, m_xy, dy)

    check()


@pytest.mark.parametrize("name,F", FAM)
def test_boolean_laws(name, F):
    @settings(max_examples=150, deadline=None)
    @given(admsets(F), admsets(F))
    def check(x, y):
        assert adm_neg(F, adm_neg(F, x)) == x
        assert adm_meet(F, x, y) == adm_meet(F, y, x)
        assert adm_leq(F, adm_meet(F, x, y), adm_join(F, x, y))

    check()


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_eval_box_matches_oracle(data):
    F = cofin.vb()
    theta = {0: data.draw(admsets(F)), 1: data.draw(admsets(F))}
    phi = parse(data.draw(st.sampled_from(["[]p0", "<>(p0 & ~p1)", "[](p0 -> <>p1)", "[][]p0 | <>p1"])))
    out = eval(F, theta, phi)
    T = threshold(F, *theta.values()) + 4
    pts = F.points_upto(T)

    def ev(f):
        if isinstance(f, Var):
            return restrict(theta[f.index], F.points_upto(T + WINDOW))
        if isinstance(f, Neg):
            return frozenset(F.points_upto(T + WINDOW)) - ev(f.arg)
        if isinstance(f, And):
            return ev(f.left) & ev(f.right)
        if isinstance(f, Or):
            return ev(f.left) | ev(f.right)
        if isinstance(f, Imp):
            return (frozenset(F.points_upto(T + WINDOW)) - ev(f.left)) | ev(f.right)
        if isinstance(f, Box):
            s = ev(f.arg)
            win = F.points_upto(T + WINDOW)
            return frozenset(p for p in win if all(q in s for q in win if F.related(0, p, q)))
        raise TypeError(f)

    # nested boxes only lose accuracy near the window edge, far above T
    assert restrict(out, pts) == ev(phi) & frozenset(pts)


def test_json_round_trip():
    x = Cofinite([0, "inf+1"])
    assert cofin.admset_from_json(cofin.admset_to_json(x)) == x
