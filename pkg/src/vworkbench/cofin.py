"""Symbolic algebra of finite/cofinite admissible sets over countable general frames.

A family has finitely many named head points (one of them possibly the limit
point) plus a copy of the naturals. Points are ``int`` for naturals and ``str``
for named points. Every admissible set is finite and avoids the limit, or is
cofinite and contains it. Relations only compare naturals with each other and
with a finite set of constants. That keeps every computation eventually
uniform beyond a threshold, so finitely many probes decide each operation.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .formula import (
    And,
    Bot,
    Box,
    E_MODALITY,
    Formula,
    Iff,
    Imp,
    Neg,
    Or,
    Top,
    UBox,
    Var,
    dia,
    diadot,
    subformulas,
    variables,
)

Point = int | str
TEMPLATE_BOUND = 8


class ClosureError(RuntimeError):
    """An operation produced a set outside the admissible family."""


@dataclass(frozen=True)
class AdmSet:
    mode: str  # "finite" or "cofinite"
    support: frozenset

    def __post_init__(self):
        if self.mode not in ("finite", "cofinite"):
            raise ValueError(f"bad mode {self.mode!r}")
        object.__setattr__(self, "support", frozenset(self.support))

    def __contains__(self, x: Point) -> bool:
        return (x in self.support) == (self.mode == "finite")

    @property
    def cofinite(self) -> bool:
        return self.mode == "cofinite"

    def naturals(self) -> list[int]:
        return sorted(x for x in self.support if isinstance(x, int))

    def max_index(self) -> int:
        return max((x for x in self.support if isinstance(x, int)), default=-1)

    def __str__(self) -> str:
        body = ", ".join(point_name(x) for x in sort_points(self.support))
        return ("{" + body + "}") if self.mode == "finite" else ("W \\ {" + body + "}")


def Finite(points: Iterable[Point] = ()) -> AdmSet:
    return AdmSet("finite", frozenset(points))


def Cofinite(points: Iterable[Point] = ()) -> AdmSet:
    return AdmSet("cofinite", frozenset(points))


def _pkey(x: Point):
    return (1, x, "") if isinstance(x, int) else (0, 0, x)


def sort_points(xs: Iterable[Point]) -> list[Point]:
    return sorted(xs, key=_pkey)


def point_name(x: Point) -> str:
    return f"n:{x}" if isinstance(x, int) else x


def parse_point(s: str) -> Point:
    if s.startswith("n:"):
        return int(s[2:])
    return s


def _idx(x: Point) -> int:
    return x if isinstance(x, int) else 0


@dataclass(frozen=True)
class FrameFamily:
    name: str
    head: tuple[str, ...]
    limit: str | None
    modalities: tuple[int, ...]
    max_const: int
    has_naturals: bool
    rule: Callable[[int, Point, Point], bool] = field(compare=False, repr=False)
    params: tuple = ()
    cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __hash__(self):
        return hash((self.name, self.head, self.limit, self.modalities, self.params))

    def related(self, m: int, x: Point, y: Point) -> bool:
        if m not in self.modalities:
            raise ValueError(f"family {self.name} has no modality {m}")
        return self.rule(m, x, y)

    @property
    def nonlimit_head(self) -> tuple[str, ...]:
        return tuple(h for h in self.head if h != self.limit)

    def valid(self, x: AdmSet) -> bool:
        pts = set(self.head)
        for p in x.support:
            if isinstance(p, int):
                if not self.has_naturals or p < 0:
                    return False
            elif p not in pts:
                return False
        if self.limit is not None and self.limit in x.support:
            return False
        if not self.has_naturals and x.cofinite:
            return False
        return True

    def normalize(self, x: AdmSet) -> AdmSet:
        if not self.has_naturals and x.cofinite:
            return Finite(h for h in self.head if h not in x.support)
        return x

    def check(self, x: AdmSet) -> AdmSet:
        x = self.normalize(x)
        if not self.valid(x):
            raise ValueError(f"{x} is not an admissible set of {self.name}")
        return x

    def points_upto(self, n: int) -> list[Point]:
        return list(self.head) + (list(range(n + 1)) if self.has_naturals else [])


def vb() -> FrameFamily:
    """The countable frame with limit point inf and its successor inf+1."""

    def rule(m, x, y):
        if isinstance(x, int):
            return isinstance(y, int) and x > y
        if x == "inf+1":
            return y == "inf"
        return y == "inf" or isinstance(y, int)

    return FrameFamily("vb", ("inf+1", "inf"), "inf", (0,), 0, True, rule)


def vbe() -> FrameFamily:
    """vb plus the universal relation under the reserved index E_MODALITY."""
    base = vb().rule

    def rule(m, x, y):
        return True if m == E_MODALITY else base(m, x, y)

    return FrameFamily("vbe", ("inf+1", "inf"), "inf", (0, E_MODALITY), 0, True, rule)


def vbi_primed(i: int) -> str:
    return f"a{i}'"


def vb_i(index_set: Iterable[int]) -> FrameFamily:
    """Frame encoding a set I of indices >= 2 through doubled points a_i, a_i'.

    Naturals are the points a_k. Named points: the limit b, the point c, and a_i' for i in I.
    """
    I = tuple(sorted(set(int(i) for i in index_set)))
    if any(i < 2 for i in I):
        raise ValueError("indices must be >= 2")

    def level(x: Point) -> int | None:
        if isinstance(x, int):
            return x
        if x.startswith("a") and x.endswith("'"):
            return int(x[1:-1])
        return None

    def rule(m, x, y):
        if x == "c":
            return y == "b"
        if x == "b":
            ly = level(y)
            return ly is not None and ly >= 1
        lx, ly = level(x), level(y)
        if lx == 1 and y in (0, "c"):
            return True
        return ly is not None and lx > ly >= 1

    head = ("b", "c") + tuple(vbi_primed(i) for i in I)
    return FrameFamily("vbi", head, "b", (0,), max(I + (1,)), True, rule, params=I)


def finite_family(worlds: Iterable[str], relations: Mapping[int, Iterable[tuple[str, str]]]) -> FrameFamily:
    """A finite Kripke frame with the full powerset as admissible family."""
    worlds = tuple(worlds)
    rels = {int(k) if k not in ("e",) else E_MODALITY: frozenset(map(tuple, v)) for k, v in relations.items()}

    def rule(m, x, y):
        return (x, y) in rels[m]

    return FrameFamily("finite", worlds, None, tuple(sorted(rels)), 0, False, rule,
                       params=tuple(sorted((k, tuple(sorted(v))) for k, v in rels.items())))


def family_from_selector(sel: Mapping | str) -> FrameFamily:
    if isinstance(sel, str):
        sel = json.loads(sel) if sel.strip().startswith("{") else {"family": sel}
    name = sel["family"]
    if name == "vb":
        return vb()
    if name == "vbe":
        return vbe()
    if name == "vbi":
        return vb_i(sel.get("I", []))
    if name == "finite":
        return finite_family(sel["worlds"], sel.get("relations", {}))
    raise ValueError(f"unknown family {name!r}")


# ---------------------------------------------------------------- Boolean operations


def adm_top(F: FrameFamily) -> AdmSet:
    return F.normalize(Cofinite())


def adm_bot(F: FrameFamily) -> AdmSet:
    return Finite()


def adm_neg(F: FrameFamily, x: AdmSet) -> AdmSet:
    return F.normalize(AdmSet("cofinite" if x.mode == "finite" else "finite", x.support))


def adm_join(F: FrameFamily, x: AdmSet, y: AdmSet) -> AdmSet:
    if not x.cofinite and not y.cofinite:
        return Finite(x.support | y.support)
    if x.cofinite and y.cofinite:
        return F.normalize(Cofinite(x.support & y.support))
    fin, cof = (x, y) if y.cofinite else (y, x)
    return F.normalize(Cofinite(cof.support - fin.support))


def adm_meet(F: FrameFamily, x: AdmSet, y: AdmSet) -> AdmSet:
    return adm_neg(F, adm_join(F, adm_neg(F, x), adm_neg(F, y)))


def adm_is_bot(x: AdmSet) -> bool:
    return not x.cofinite and not x.support


def adm_leq(F: FrameFamily, x: AdmSet, y: AdmSet) -> bool:
    return adm_is_bot(adm_meet(F, x, adm_neg(F, y)))


def adm_eq(F: FrameFamily, x: AdmSet, y: AdmSet) -> bool:
    return F.normalize(x) == F.normalize(y)


def threshold(F: FrameFamily, *sets: AdmSet) -> int:
    return max((s.max_index() for s in sets), default=-1) + F.max_const + 1


def _exists_succ(F: FrameFamily, m: int, x: AdmSet, p: Point, bound_hint: int) -> bool:
    for h in F.head:
        if h in x and F.related(m, p, h):
            return True
    if not F.has_naturals:
        return False
    if not x.cofinite:
        return any(F.related(m, p, n) for n in x.support if isinstance(n, int))
    # beyond this bound p's relation to a natural no longer changes and every natural is in x
    bound = max(bound_hint, F.max_const, _idx(p)) + 1
    return any(n not in x.support and F.related(m, p, n) for n in range(bound + 1))


def _assemble(F: FrameFamily, member: Callable[[Point], bool], T: int, what: str) -> AdmSet:
    """Build an admissible set from a pointwise predicate constant beyond T."""
    if not F.has_naturals:
        return Finite(h for h in F.head if member(h))
    inside = [p for p in F.points_upto(T) if member(p)]
    tail = [member(T + k) for k in (1, 2, 3)]
    if len(set(tail)) != 1:
        raise ClosureError(f"{what}: membership not eventually constant beyond {T}")
    if tail[0]:
        inside_set = set(inside)
        out = Cofinite(p for p in F.points_upto(T) if p not in inside_set)
    else:
        out = Finite(inside)
    if F.limit is not None and (F.limit in out) != out.cofinite:
        raise ClosureError(f"{what}: result {out} is not admissible")
    return out


def adm_dia(F: FrameFamily, m: int, x: AdmSet) -> AdmSet:
    """R_m^{-1}[x]."""
    if m not in F.modalities:
        raise ValueError(f"family {F.name} has no modality {m}")
    x = F.normalize(x)
    if adm_is_bot(x):
        return Finite()
    M = x.max_index()
    T = threshold(F, x)
    return _assemble(F, lambda p: _exists_succ(F, m, x, p, M), T, f"dia_{m}")


def adm_box(F: FrameFamily, m: int, x: AdmSet) -> AdmSet:
    return adm_neg(F, adm_dia(F, m, adm_neg(F, x)))


def member_of_dia(F: FrameFamily, m: int, x: AdmSet, p: Point) -> bool:
    return _exists_succ(F, m, x, p, x.max_index())


# ---------------------------------------------------------------- evaluation


def eval(F: FrameFamily, theta: Mapping[int, AdmSet], phi: Formula) -> AdmSet:  # noqa: A001
    """Truth set of phi under an admissible valuation."""
    theta = {int(k): F.check(v) for k, v in theta.items()}
    missing = variables(phi) - set(theta)
    if missing:
        raise ValueError(f"valuation misses variables {sorted(missing)}")
    memo: dict[Formula, AdmSet] = {}
    closed = F.cache.setdefault("closed", {})
    has_var: dict[Formula, bool] = {}
    for f in subformulas(phi):
        if isinstance(f, Var):
            has_var[f] = True
            memo[f] = theta[f.index]
            continue
        kids = [k for k in (getattr(f, "left", None), getattr(f, "right", None), getattr(f, "arg", None)) if k is not None]
        hv = any(has_var[k] for k in kids)
        has_var[f] = hv
        if not hv and f in closed:
            memo[f] = closed[f]
            continue
        memo[f] = _step(F, f, memo)
        if not hv:
            closed[f] = memo[f]
    return memo[phi]


def _step(F: FrameFamily, f: Formula, memo: dict) -> AdmSet:
    if isinstance(f, Top):
        return adm_top(F)
    if isinstance(f, Bot):
        return Finite()
    if isinstance(f, Neg):
        return adm_neg(F, memo[f.arg])
    if isinstance(f, And):
        return adm_meet(F, memo[f.left], memo[f.right])
    if isinstance(f, Or):
        return adm_join(F, memo[f.left], memo[f.right])
    if isinstance(f, Imp):
        return adm_join(F, adm_neg(F, memo[f.left]), memo[f.right])
    if isinstance(f, Iff):
        a, b = memo[f.left], memo[f.right]
        return adm_meet(F, adm_join(F, adm_neg(F, a), b), adm_join(F, adm_neg(F, b), a))
    if isinstance(f, Box):
        return adm_box(F, f.index, memo[f.arg])
    if isinstance(f, UBox):
        return adm_top(F) if adm_eq(F, memo[f.arg], adm_top(F)) else Finite()
    raise ValueError(f"{type(f).__name__} is not interpreted over admissible-set families")


# ---------------------------------------------------------------- naming formulas for vb_i


def alpha(k: int, p: Formula) -> Formula:
    """alpha_k(p): alpha_0 = p, alpha_1 = <>p & [][]~p, alpha_{k+2} adds <>alpha_1."""
    a0 = p
    if k == 0:
        return a0
    a1 = And(dia(0, a0), Box(0, Box(0, Neg(a0))))
    prev = a1
    for _ in range(2, k + 1):
        prev = And(And(dia(0, prev), Box(0, Box(0, Neg(prev)))), dia(0, a1))
    return prev


def gamma(p: Formula) -> Formula:
    a1 = alpha(1, p)
    return And(dia(0, dia(0, a1)), Neg(dia(0, a1)))


def name_a(k: int) -> Formula:
    return alpha(k, Box(0, Bot()))


def name_c() -> Formula:
    return gamma(Box(0, Bot()))


def box_alpha1(phi: Formula) -> Formula:
    """[](<.>a_1 -> phi): the box relativised to points that are or see a_1."""
    return Box(0, Imp(diadot(0, name_a(1)), phi))


def distinguishing(i: int, p: Formula = Var(0)) -> Formula:
    a = name_a(i)
    return Or(Box(0, Imp(a, p)), Box(0, Imp(a, Neg(p))))


def eval_names_vbi(index_set: Iterable[int], i: int) -> AdmSet:
    """Truth set of the name formula for level i; ``i == -1`` names the point c."""
    F = vb_i(index_set)
    return eval(F, {}, name_c() if i == -1 else name_a(i))


# ---------------------------------------------------------------- families of admissibles


@dataclass(frozen=True)
class Explicit:
    members: tuple[AdmSet, ...]


@dataclass(frozen=True)
class RFailureFamily:
    """{d <= b : d nonzero and a & <m>d = 0}."""

    a: AdmSet
    b: AdmSet
    modality: int = 0


@dataclass(frozen=True)
class JvbFamily:
    """{x <= y : x nonzero and <m>x <= z}."""

    y: AdmSet
    z: AdmSet
    modality: int = 0


@dataclass(frozen=True)
class FiniteSubsets:
    """Finite admissible subsets of a given set."""

    of: AdmSet


Descriptor = Explicit | RFailureFamily | JvbFamily | FiniteSubsets


def _desc_sets(d: Descriptor) -> list[AdmSet]:
    if isinstance(d, RFailureFamily):
        return [d.a, d.b]
    if isinstance(d, JvbFamily):
        return [d.y, d.z]
    if isinstance(d, FiniteSubsets):
        return [d.of]
    return list(d.members)


def desc_member(F: FrameFamily, d: Descriptor, s: AdmSet) -> bool:
    """Membership of a nonzero admissible set in the described family."""
    s = F.check(s)
    if adm_is_bot(s):
        return False
    if isinstance(d, Explicit):
        return any(adm_eq(F, s, m) for m in d.members)
    if isinstance(d, RFailureFamily):
        return adm_leq(F, s, d.b) and adm_is_bot(adm_meet(F, d.a, adm_dia(F, d.modality, s)))
    if isinstance(d, JvbFamily):
        return adm_leq(F, s, d.y) and adm_leq(F, adm_dia(F, d.modality, s), d.z)
    return not s.cofinite and adm_leq(F, s, d.of)


def _singleton_in(F: FrameFamily, d: Descriptor, p: Point) -> bool:
    if isinstance(d, RFailureFamily):
        return p in d.b and adm_is_bot(adm_meet(F, d.a, adm_dia(F, d.modality, Finite([p]))))
    if isinstance(d, JvbFamily):
        return p in d.y and adm_leq(F, adm_dia(F, d.modality, Finite([p])), d.z)
    if isinstance(d, FiniteSubsets):
        return p in d.of
    raise TypeError(d)


def union_of_family(F: FrameFamily, d: Descriptor) -> tuple[AdmSet, bool]:
    """Union of the family's non-limit points, and whether some member contains the limit.

    The first component includes the limit only when the second is true.
    """
    if isinstance(d, Explicit):
        out = Finite()
        for m in d.members:
            out = adm_join(F, out, F.check(m))
        return out, F.limit is not None and F.limit in out
    if F.limit is None and not F.has_naturals:
        return Finite(h for h in F.head if _singleton_in(F, d, h)), False
    T = threshold(F, *_desc_sets(d)) + 1
    points = [p for p in F.points_upto(T) if p != F.limit]
    inside = {p for p in points if _singleton_in(F, d, p)}
    tail = {_singleton_in(F, d, T + k) for k in (1, 2, 3)}
    if len(tail) != 1:
        raise ClosureError("family membership not eventually constant")
    if not tail.pop():
        # downward closed: a cofinite member would put cofinitely many singletons in the family
        return Finite(inside), False
    excl = [p for p in points if p not in inside]
    limit_in = _cofinite_member_exists(F, d, excl, sorted(inside, key=_pkey), T)
    return Cofinite(excl), limit_in


def _cofinite_member_exists(F: FrameFamily, d: Descriptor, excl: list, inside: list, T: int) -> bool:
    if isinstance(d, FiniteSubsets):
        return False
    candidates = [p for p in inside if not isinstance(p, int) or p <= T + 1]
    for size in range(0, TEMPLATE_BOUND + 1):
        for drop in itertools.combinations(candidates, size):
            if desc_member(F, d, Cofinite(list(excl) + list(drop))):
                return True
    return False


def lub_of_family(F: FrameFamily, d: Descriptor) -> AdmSet | None:
    """Least admissible upper bound of a described family.

    The union itself when admissible; otherwise the union plus the limit when that
    is cofinite; None when neither applies.
    """
    union, limit_in = union_of_family(F, d)
    if F.limit is None or not union.cofinite:
        return union
    # a cofinite union is admissible once the limit is added, whether or not a member contains it
    return union if limit_in else Cofinite(union.support)


# ---------------------------------------------------------------- JSON


def admset_to_json(x: AdmSet) -> dict:
    return {"mode": x.mode, "support": [point_name(p) for p in sort_points(x.support)]}


def admset_from_json(data: Mapping | str) -> AdmSet:
    if isinstance(data, str):
        data = json.loads(data)
    return AdmSet(data["mode"], frozenset(parse_point(s) for s in data["support"]))


def valuation_from_json(data: Mapping | str) -> dict[int, AdmSet]:
    if isinstance(data, str):
        data = json.loads(data)
    out = {}
    for k, v in data.items():
        k = k[1:] if isinstance(k, str) and k.startswith("p") else k
        out[int(k)] = admset_from_json(v)
    return out


def family_to_json(F: FrameFamily) -> dict:
    if F.name == "vbi":
        return {"family": "vbi", "I": list(F.params)}
    if F.name == "finite":
        return {"family": "finite", "worlds": list(F.head),
                "relations": {("e" if k == E_MODALITY else str(k)): [list(p) for p in v] for k, v in F.params}}
    return {"family": F.name}

