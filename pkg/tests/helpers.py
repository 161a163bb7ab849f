"""Shared strategies and independent oracles for the test suite."""

from __future__ import annotations

import random
from itertools import chain

from hypothesis import strategies as st

from vworkbench import cofin
from vworkbench.formula import (
    BOT,
    TOP,
    And,
    Box,
    ConvBox,
    Iff,
    Imp,
    Neg,
    Nominal,
    Or,
    UBox,
    Var,
)

# ---------------------------------------------------------------- formulas


def formulas(depth: int = 8, n_vars: int = 3, boxes=(0, 1, 2, -1), nominals: bool = True,
             converse: bool = True, universal: bool = True):
    """Formulas of tree depth at most ``depth``."""
    leaves = [st.just(BOT), st.just(TOP), st.builds(Var, st.integers(0, n_vars - 1))]
    if nominals:
        leaves.append(st.builds(Nominal, st.integers(0, 2)))
    level = st.one_of(*leaves)
    leaf = level
    idx = st.sampled_from(boxes)
    for _ in range(depth):
        sub = level
        options = [
            leaf,
            st.builds(Neg, sub),
            st.builds(And, sub, sub),
            st.builds(Or, sub, sub),
            st.builds(Imp, sub, sub),
            st.builds(Iff, sub, sub),
            st.builds(Box, idx, sub),
        ]
        if converse:
            options.append(st.builds(ConvBox, st.sampled_from([b for b in boxes if b >= 0]), sub))
        if universal:
            options.append(st.builds(UBox, sub))
        level = st.one_of(*options)
    return level


def unimodal(depth: int = 4, n_vars: int = 2):
    return formulas(depth, n_vars, boxes=(0,), nominals=False, converse=False, universal=False)


def random_unimodal(rng: random.Random, depth: int, n_vars: int = 2):
    """Seeded generator used for fixed corpora (the stability oracle)."""
    if depth == 0 or rng.random() < 0.2:
        r = rng.random()
        if r < 0.1:
            return BOT
        if r < 0.2:
            return TOP
        return Var(rng.randrange(n_vars))
    k = rng.randrange(6)
    sub = lambda: random_unimodal(rng, depth - 1, n_vars)  # noqa: E731
    if k == 0:
        return Neg(sub())
    if k == 1:
        return And(sub(), sub())
    if k == 2:
        return Or(sub(), sub())
    if k == 3:
        return Imp(sub(), sub())
    return Box(0, sub())


def random_formula(rng: random.Random, depth: int, n_vars: int = 3):
    """Seeded generator over the whole syntax, tree depth at most ``depth``."""
    if depth == 0 or rng.random() < 0.15:
        return rng.choice([BOT, TOP, Var(rng.randrange(n_vars)), Nominal(rng.randrange(3))])
    sub = lambda: random_formula(rng, depth - 1, n_vars)  # noqa: E731
    k = rng.randrange(9)
    if k < 5:
        cls = (Neg, And, Or, Imp, Iff)[k]
        return cls(sub()) if cls is Neg else cls(sub(), sub())
    if k == 5:
        return Box(rng.choice([0, 1, 2, -1]), sub())
    if k == 6:
        return ConvBox(rng.choice([0, 1]), sub())
    if k == 7:
        return UBox(sub())
    return Neg(Box(rng.choice([0, 1]), Neg(sub())))


# ---------------------------------------------------------------- admissible sets

FAMILIES = {
    "vb": cofin.vb(),
    "vbe": cofin.vbe(),
    "vbi245": cofin.vb_i({2, 4, 5}),
    "vbi3": cofin.vb_i({3}),
}


def admsets(F: cofin.FrameFamily, bound: int = 6):
    pool = list(F.nonlimit_head) + list(range(bound + 1))
    return st.builds(
        lambda mode, sup: F.check(cofin.AdmSet(mode, frozenset(sup))),
        st.sampled_from(["finite", "cofinite"]),
        st.sets(st.sampled_from(pool), max_size=5),
    )


def random_admset(rng: random.Random, F: cofin.FrameFamily, bound: int = 6) -> cofin.AdmSet:
    pool = list(F.nonlimit_head) + list(range(bound + 1))
    sup = {p for p in pool if rng.random() < 0.3}
    return F.check(cofin.AdmSet(rng.choice(["finite", "cofinite"]), frozenset(sup)))


def is_admissible(F: cofin.FrameFamily, x: cofin.AdmSet) -> bool:
    if not F.valid(x):
        return False
    return F.limit is None or (F.limit in x) == x.cofinite


# ---------------------------------------------------------------- truncation oracle


def truncation(F: cofin.FrameFamily, k: int) -> list:
    return F.points_upto(k)


def restrict(x: cofin.AdmSet, pts) -> frozenset:
    return frozenset(p for p in pts if p in x)


def trunc_dia(F: cofin.FrameFamily, m: int, xs: frozenset, pts) -> frozenset:
    """R_m^{-1}[xs] computed on the finite truncation by plain set iteration."""
    return frozenset(p for p in pts if any(F.related(m, p, q) for q in xs))


def trunc_eval(F: cofin.FrameFamily, theta, phi, pts) -> frozenset:
    """Formula evaluation on a truncation. Exact only for formulas whose answers
    at the kept points do not depend on the dropped tail."""
    full = frozenset(pts)

    def ev(f):
        if f == BOT:
            return frozenset()
        if f == TOP:
            return full
        if isinstance(f, Var):
            return restrict(theta.get(f.index, cofin.Finite()), pts)
        if isinstance(f, Neg):
            return full - ev(f.arg)
        if isinstance(f, And):
            return ev(f.left) & ev(f.right)
        if isinstance(f, Or):
            return ev(f.left) | ev(f.right)
        if isinstance(f, Imp):
            return (full - ev(f.left)) | ev(f.right)
        if isinstance(f, Iff):
            a, b = ev(f.left), ev(f.right)
            return (a & b) | ((full - a) & (full - b))
        if isinstance(f, Box):
            return full - trunc_dia(F, f.index, full - ev(f.arg), pts)
        raise TypeError(f)

    return ev(phi)


def all_points(*sets) -> set:
    return set(chain.from_iterable(s.support for s in sets))


# ---------------------------------------------------------------- Kripke oracle


def kripke_truth(worlds, rel, val, phi) -> frozenset:
    """Plain set-based satisfaction; ``rel`` maps a box index to a set of pairs."""
    W = frozenset(worlds)

    def ev(f):
        if f == BOT:
            return frozenset()
        if f == TOP:
            return W
        if isinstance(f, Var):
            return frozenset(val.get(f.index, ()))
        if isinstance(f, Neg):
            return W - ev(f.arg)
        if isinstance(f, And):
            return ev(f.left) & ev(f.right)
        if isinstance(f, Or):
            return ev(f.left) | ev(f.right)
        if isinstance(f, Imp):
            return (W - ev(f.left)) | ev(f.right)
        if isinstance(f, Iff):
            a, b = ev(f.left), ev(f.right)
            return (a & b) | ((W - a) & (W - b))
        if isinstance(f, Box):
            s = ev(f.arg)
            return frozenset(w for w in W if all(v in s for (u, v) in rel[f.index] if u == w))
        if isinstance(f, ConvBox):
            s = ev(f.arg)
            return frozenset(w for w in W if all(u in s for (u, v) in rel[f.index] if v == w))
        if isinstance(f, UBox):
            return W if ev(f.arg) == W else frozenset()
        raise TypeError(f)

    return ev(phi)
