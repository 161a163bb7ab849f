"""Condition R, complete additivity and their witnesses on fin/cofin algebras."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .cofin import (
    AdmSet,
    FrameFamily,
    Finite,
    JvbFamily,
    RFailureFamily,
    adm_dia,
    adm_eq,
    adm_is_bot,
    adm_leq,
    adm_meet,
    adm_top,
    admset_to_json,
    eval as adm_eval,
    family_to_json,
    lub_of_family,
    sort_points,
    threshold,
)
from .formula import (
    BOT,
    HOLE_FORMULA,
    TOP,
    Box,
    Formula,
    Imp,
    Neg,
    Var,
    parse_with_hole,
    substitute,
    to_text,
    variables,
)


def _meets(F: FrameFamily, a: AdmSet, m: int, x: AdmSet) -> bool:
    return not adm_is_bot(adm_meet(F, a, adm_dia(F, m, x)))


def atoms_below(F: FrameFamily, b: AdmSet, T: int) -> list:
    """Non-limit points of b: all of them when b is finite, otherwise those up to T + 2."""
    if not b.cofinite:
        return sort_points(b.support)
    return [p for p in F.points_upto(T + 2) if p != F.limit and p in b]


def check_R_at(F: FrameFamily, m: int, a: AdmSet, b: AdmSet) -> bool:
    """Condition R at (a, b).

    Admissible atoms are exactly the non-limit singletons and every nonzero set has
    one below it, so R at (a, b) reduces to finding an atom {x} <= b with a & <m>{x} != 0.
    For cofinite b the answer for naturals is constant beyond the threshold.
    """
    a, b = F.check(a), F.check(b)
    if not _meets(F, a, m, b):
        return True
    T = threshold(F, a, b)
    if b.cofinite:
        tail = {_meets(F, a, m, Finite([T + k])) for k in (1, 2)}
        if len(tail) != 1:
            raise RuntimeError("atom scan not constant beyond threshold")
    return any(_meets(F, a, m, Finite([p])) for p in atoms_below(F, b, T))


@dataclass(frozen=True)
class RFailureWitness:
    family: FrameFamily
    modality: int
    a: AdmSet
    b: AdmSet

    def to_json(self) -> dict:
        return {
            "family": family_to_json(self.family),
            "modality": _mod_name(self.modality),
            "a": admset_to_json(self.a),
            "b": admset_to_json(self.b),
        }


def _mod_name(m: int):
    return "e" if m == -1 else m


def candidate_sets(F: FrameFamily, bound: int) -> list[AdmSet]:
    """Admissible sets whose support lies in the non-limit head and naturals 0..bound, in canonical order."""
    elems = list(F.nonlimit_head) + (list(range(bound + 1)) if F.has_naturals else [])
    modes = ("finite", "cofinite") if F.has_naturals else ("finite",)
    out = []
    for r in range(len(elems) + 1):
        for sup in combinations(elems, r):
            for mode in modes:
                out.append(AdmSet(mode, frozenset(sup)))
    out.sort(key=_rank)
    return out


def _rank(x: AdmSet):
    top = max((p if isinstance(p, int) else 0 for p in x.support), default=0)
    return (top, 0 if x.mode == "finite" else 1, len(x.support),
            tuple((0, p) if isinstance(p, str) else (1, str(p).zfill(6)) for p in sort_points(x.support)))


def _pairs(cands: list[AdmSet]):
    ranks = [_rank(c) for c in cands]
    order = sorted(
        ((i, j) for i in range(len(cands)) for j in range(len(cands))),
        key=lambda ij: (max(ranks[ij[0]][0], ranks[ij[1]][0]), ij[0], ij[1]),
    )
    for i, j in order:
        yield cands[i], cands[j]


def find_R_failure(F: FrameFamily, m: int, bound: int) -> RFailureWitness | None:
    """First pair in canonical order at which R fails, with supports within the bound."""
    cands = candidate_sets(F, bound)
    dia_cache = {}
    for a, b in _pairs(cands):
        if adm_is_bot(a) or adm_is_bot(b):
            continue
        if b not in dia_cache:
            dia_cache[b] = adm_dia(F, m, b)
        if adm_is_bot(adm_meet(F, a, dia_cache[b])):
            continue
        if not check_R_at(F, m, a, b):
            return RFailureWitness(F, m, a, b)
    return None


@dataclass(frozen=True)
class VWitness:
    r_failure: RFailureWitness
    join: AdmSet
    separation: AdmSet
    samples: tuple[AdmSet, ...] = field(default=())

    def to_json(self) -> dict:
        w = self.r_failure
        return {
            **w.to_json(),
            "descriptor": {"kind": "r-failure", "a": admset_to_json(w.a), "b": admset_to_json(w.b),
                           "modality": _mod_name(w.modality)},
            "join": admset_to_json(self.join),
            "join_equals_b": True,
            "separation": admset_to_json(self.separation),
            "samples": [admset_to_json(s) for s in self.samples],
        }


def v_witness(F: FrameFamily, w: RFailureWitness, sample_bound: int = 3) -> VWitness:
    """Turn an R failure into a family B whose join b is not preserved by the diamond.

    B = {d <= b : d nonzero, a & <m>d = 0}. Then join B = b, while a meets <m>b and
    misses every <m>d for d in B.
    """
    m, a, b = w.modality, F.check(w.a), F.check(w.b)
    if check_R_at(F, m, a, b):
        raise ValueError("R holds at the given pair")
    sep = adm_meet(F, a, adm_dia(F, m, b))
    if adm_is_bot(sep):
        raise ValueError("a does not meet <m>b")
    join = lub_of_family(F, RFailureFamily(a, b, m))
    if join is None or not adm_eq(F, join, b):
        raise RuntimeError(f"join of the failure family is {join}, not b")
    samples = []
    for p in F.points_upto(sample_bound):
        if p == F.limit or p not in b:
            continue
        d = Finite([p])
        if not _meets(F, a, m, d):
            samples.append(d)
    for d in samples:
        if _meets(F, a, m, d) or not adm_leq(F, d, b):
            raise RuntimeError(f"sample {d} is not in the failure family")
    return VWitness(w, join, sep, tuple(samples))


def check_jvb(F: FrameFamily, m: int, y: AdmSet, z: AdmSet) -> bool:
    """If X = {x <= y : x nonzero, <m>x <= z} has join y, then <m>y <= z."""
    y, z = F.check(y), F.check(z)
    join = lub_of_family(F, JvbFamily(y, z, m))
    if join is None or not adm_eq(F, join, y):
        return True
    return adm_leq(F, adm_dia(F, m, y), z)


def find_jvb_failure(F: FrameFamily, m: int, bound: int) -> tuple[AdmSet, AdmSet] | None:
    for y, z in _pairs(candidate_sets(F, bound)):
        if not check_jvb(F, m, y, z):
            return y, z
    return None


# ---------------------------------------------------------------- the two-box criterion


@dataclass(frozen=True)
class OperatorContext:
    """A unary operator written as a formula with one hole ``$``."""

    formula: Formula

    def __post_init__(self):
        if variables(self.formula) - {HOLE_FORMULA.index}:
            raise ValueError("operator contexts may only contain the hole variable")

    @classmethod
    def modality(cls, index: int) -> "OperatorContext":
        return cls(Box(index, HOLE_FORMULA))

    @classmethod
    def parse(cls, text: str) -> "OperatorContext":
        return cls(parse_with_hole(text))

    def __call__(self, phi: Formula) -> Formula:
        return substitute(self.formula, {HOLE_FORMULA.index: phi})

    def plain_index(self) -> int | None:
        f = self.formula
        return f.index if isinstance(f, Box) and f.arg == HOLE_FORMULA else None

    def __str__(self) -> str:
        return to_text(self.formula)


def premise_formula(box0: OperatorContext, box1: OperatorContext, x: Formula) -> Formula:
    """box1(box0(box0 x -> x) -> x)."""
    return box1(Imp(box0(Imp(box0(x), x)), x))


def default_samples(F: FrameFamily, bound: int = 3) -> list[AdmSet]:
    return candidate_sets(F, bound)


@dataclass(frozen=True)
class GreatReport:
    family: FrameFamily
    box0: OperatorContext
    box1: OperatorContext
    a: AdmSet
    samples_checked: int
    premise_failures: tuple[AdmSet, ...]
    conclusion_holds: bool
    forces_bottom: bool
    r_failure: RFailureWitness | None

    @property
    def premise_holds(self) -> bool:
        return not self.premise_failures

    @property
    def v_failure(self) -> bool:
        return self.premise_holds and not self.conclusion_holds

    @property
    def verdict(self) -> str:
        if not self.premise_holds:
            return "premise fails on a sample; no conclusion"
        if self.conclusion_holds:
            return "premise and conclusion both hold; no additivity failure detected"
        text = "premise holds on all samples but a is not below box1(bot): the box1 diamond is not completely additive"
        if self.forces_bottom:
            text += "; since a <= box1-diamond(top), every completely additive algebra satisfying the premise forces a = bot"
        return text

    def to_json(self) -> dict:
        return {
            "family": family_to_json(self.family),
            "box0": str(self.box0),
            "box1": str(self.box1),
            "a": admset_to_json(self.a),
            "samples_checked": self.samples_checked,
            "premise_holds": self.premise_holds,
            "premise_failures": [admset_to_json(x) for x in self.premise_failures],
            "conclusion_holds": self.conclusion_holds,
            "forces_bottom": self.forces_bottom,
            "v_failure": self.v_failure,
            "verdict": self.verdict,
            "r_failure": None if self.r_failure is None else self.r_failure.to_json(),
        }


def theorem_great_report(F: FrameFamily, box0: OperatorContext, box1: OperatorContext,
                         a: AdmSet | Formula, samples: list[AdmSet] | None = None,
                         r_bound: int = 2) -> GreatReport:
    """Check a <= box1(box0(box0 x -> x) -> x) on samples and compare with a <= box1(bot).

    If ◇₁ were completely additive the premise for all x would force a <= box1(bot), so
    premise-on-samples together with a failed conclusion exhibits the additivity gap.
    """
    if isinstance(a, Formula):
        a = adm_eval(F, {}, a)
    a = F.check(a)
    if samples is None:
        samples = default_samples(F)
    x = Var(0)
    body = premise_formula(box0, box1, x)
    failures = []
    for s in samples:
        if not adm_leq(F, a, adm_eval(F, {0: s}, body)):
            failures.append(s)
    concl = adm_leq(F, a, adm_eval(F, {}, box1(BOT)))
    dia_top = adm_eval(F, {}, Neg(box1(Neg(TOP))))
    forces = not adm_is_bot(a) and adm_leq(F, a, dia_top)
    rf = None
    idx = box1.plain_index()
    if idx is not None:
        rf = find_R_failure(F, idx, r_bound)
    return GreatReport(F, box0, box1, a, len(samples), tuple(failures), concl, forces, rf)


def find_countervaluation(F: FrameFamily, phi: Formula, bound: int = 3) -> dict[int, AdmSet] | None:
    """Search valuations drawn from candidate_sets(F, bound) for one where phi is not top."""
    vs = sorted(variables(phi))
    cands = candidate_sets(F, bound)
    top = adm_top(F)

    def search(i: int, theta: dict[int, AdmSet]):
        if i == len(vs):
            return dict(theta) if not adm_eq(F, adm_eval(F, theta, phi), top) else None
        for s in cands:
            theta[vs[i]] = s
            found = search(i + 1, theta)
            if found is not None:
                return found
        del theta[vs[i]]
        return None

    return search(0, {})
