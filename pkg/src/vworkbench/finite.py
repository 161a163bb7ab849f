"""Finite Kripke models, finite general frames and finite modal algebras."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from . import _kernels
from .formula import (
    And,
    Bot,
    Box,
    ConvBox,
    E_MODALITY,
    Formula,
    Iff,
    Imp,
    Neg,
    Nominal,
    Or,
    Top,
    UBox,
    Var,
    subformulas,
    variables,
)

MAX_VALUATION_ROWS = 1 << 22
_CHUNK = 1 << 15


def _rel_key(key) -> int:
    if key in ("e", E_MODALITY):
        return E_MODALITY
    return int(key)


def _rel_name(key: int) -> str:
    return "e" if key == E_MODALITY else str(key)


@dataclass(frozen=True)
class FiniteGeneralFrame:
    """Finite frame with an explicit admissible family; ``admissibles=None`` means the full powerset."""

    worlds: tuple[str, ...]
    relations: Mapping[int, frozenset[tuple[str, str]]]
    admissibles: tuple[frozenset[str], ...] | None = None
    check_closure: bool = field(default=True, compare=False)

    def __post_init__(self):
        if len(set(self.worlds)) != len(self.worlds):
            raise ValueError("duplicate world ids")
        ws = set(self.worlds)
        rels = {}
        for k, pairs in self.relations.items():
            pairs = frozenset((str(x), str(y)) for x, y in pairs)
            for x, y in pairs:
                if x not in ws or y not in ws:
                    raise ValueError(f"relation {k} mentions unknown world")
            rels[_rel_key(k)] = pairs
        object.__setattr__(self, "relations", rels)
        if self.admissibles is not None:
            adm = tuple(sorted({frozenset(a) for a in self.admissibles}, key=lambda a: sorted(a)))
            for a in adm:
                if not a <= ws:
                    raise ValueError("admissible set mentions unknown world")
            object.__setattr__(self, "admissibles", adm)
            if self.check_closure:
                problem = closure_violation(self)
                if problem:
                    raise ValueError(f"admissible family not closed: {problem}")

    @cached_property
    def index(self) -> dict[str, int]:
        return {w: i for i, w in enumerate(self.worlds)}

    def modalities(self) -> list[int]:
        return sorted(self.relations)

    def mask(self, subset: Iterable[str]) -> int:
        idx = self.index
        m = 0
        for w in subset:
            m |= 1 << idx[w]
        return m

    def unmask(self, m: int) -> frozenset[str]:
        return frozenset(w for i, w in enumerate(self.worlds) if m >> i & 1)

    def succ_masks(self, key: int) -> list[int]:
        idx = self.index
        out = [0] * len(self.worlds)
        for x, y in self.relations.get(key, ()):
            out[idx[x]] |= 1 << idx[y]
        return out

    def pred_masks(self, key: int) -> list[int]:
        idx = self.index
        out = [0] * len(self.worlds)
        for x, y in self.relations.get(key, ()):
            out[idx[y]] |= 1 << idx[x]
        return out

    def admissible_masks(self) -> list[int]:
        if self.admissibles is None:
            return list(range(1 << len(self.worlds)))
        return [self.mask(a) for a in self.admissibles]

    def dia_mask(self, key: int, x: int) -> int:
        """R^{-1}[x] as a mask."""
        out = 0
        for i, s in enumerate(self.succ_masks(key)):
            if s & x:
                out |= 1 << i
        return out


def closure_violation(frame: FiniteGeneralFrame) -> str | None:
    adm = set(frame.admissible_masks())
    full = (1 << len(frame.worlds)) - 1
    if not adm:
        return "empty family"
    for a in adm:
        if full & ~a not in adm:
            return f"complement of {sorted(frame.unmask(a))}"
        for k in frame.relations:
            if frame.dia_mask(k, a) not in adm:
                return f"R{_rel_name(k)}^-1 of {sorted(frame.unmask(a))}"
    items = sorted(adm)
    for i, a in enumerate(items):
        for b in items[i + 1 :]:
            if a | b not in adm:
                return f"union of {sorted(frame.unmask(a))} and {sorted(frame.unmask(b))}"
    return None


@dataclass(frozen=True)
class FiniteModel:
    frame: FiniteGeneralFrame
    valuation: Mapping[int, frozenset[str]]

    def __post_init__(self):
        object.__setattr__(self, "valuation", {int(k): frozenset(v) for k, v in self.valuation.items()})


def kripke_frame(worlds: Iterable[str], relations: Mapping) -> FiniteGeneralFrame:
    return FiniteGeneralFrame(tuple(worlds), relations, None)


def _truth_masks(frame: FiniteGeneralFrame, val: Mapping[int, int], phi: Formula) -> dict[Formula, int]:
    n = len(frame.worlds)
    full = (1 << n) - 1
    succ: dict[int, list[int]] = {}
    pred: dict[int, list[int]] = {}
    out: dict[Formula, int] = {}
    for f in subformulas(phi):
        if isinstance(f, Var):
            r = val.get(f.index, 0)
        elif isinstance(f, Top):
            r = full
        elif isinstance(f, Bot):
            r = 0
        elif isinstance(f, Neg):
            r = full & ~out[f.arg]
        elif isinstance(f, And):
            r = out[f.left] & out[f.right]
        elif isinstance(f, Or):
            r = out[f.left] | out[f.right]
        elif isinstance(f, Imp):
            r = (full & ~out[f.left]) | out[f.right]
        elif isinstance(f, Iff):
            r = full & ~(out[f.left] ^ out[f.right])
        elif isinstance(f, (Box, ConvBox)):
            if f.index not in frame.relations:
                raise ValueError(f"frame has no relation for modality {_rel_name(f.index)}")
            table = succ if isinstance(f, Box) else pred
            if f.index not in table:
                table[f.index] = (frame.succ_masks if isinstance(f, Box) else frame.pred_masks)(f.index)
            x = out[f.arg]
            r = 0
            for i, s in enumerate(table[f.index]):
                if s & ~x == 0:
                    r |= 1 << i
        elif isinstance(f, UBox):
            r = full if out[f.arg] == full else 0
        elif isinstance(f, Nominal):
            raise ValueError("finite model checking is nominal-free")
        else:
            raise TypeError(f)
        out[f] = r
    return out


def truth_set(model: FiniteModel, phi: Formula) -> frozenset[str]:
    val = {k: model.frame.mask(v) for k, v in model.valuation.items()}
    return model.frame.unmask(_truth_masks(model.frame, val, phi)[phi])


def mc(model: FiniteModel, world: str, phi: Formula) -> bool:
    """Kripke satisfaction of phi at a world."""
    if world not in model.frame.index:
        raise ValueError(f"unknown world {world!r}")
    return world in truth_set(model, phi)


def _arrays(frame: FiniteGeneralFrame, phi: Formula):
    keys = sorted({f.index for f in subformulas(phi) if isinstance(f, (Box, ConvBox))})
    for k in keys:
        if k not in frame.relations:
            raise ValueError(f"frame has no relation for modality {_rel_name(k)}")
    rel_slots = {k: i for i, k in enumerate(keys)}
    n = len(frame.worlds)
    succ = np.zeros((max(1, len(keys)), n), np.uint64)
    pred = np.zeros((max(1, len(keys)), n), np.uint64)
    for k, i in rel_slots.items():
        succ[i] = frame.succ_masks(k)
        pred[i] = frame.pred_masks(k)
    return rel_slots, succ, pred


def find_refutation(frame: FiniteGeneralFrame, phi: Formula, max_vars: int = 3,
                    use_numba: bool | None = None) -> tuple[dict[int, frozenset[str]], str] | None:
    """Admissible valuation and world falsifying phi, or None if phi is valid on the frame."""
    if any(isinstance(f, Nominal) for f in subformulas(phi)):
        raise ValueError("general-frame validity is nominal-free")
    vs = sorted(variables(phi))
    if len(vs) > max_vars:
        raise ValueError(f"{len(vs)} variables exceed the cap of {max_vars}")
    n = len(frame.worlds)
    adm = np.array(frame.admissible_masks(), dtype=np.uint64)
    rows = len(adm) ** len(vs)
    if rows > MAX_VALUATION_ROWS:
        raise ValueError(f"{rows} admissible valuations exceed the enumeration cap")
    rel_slots, succ, pred = _arrays(frame, phi)
    prog = _kernels.Program(phi, {v: i for i, v in enumerate(vs)}, rel_slots)
    full = int(_kernels.full_mask(n))
    combos = itertools.product(range(len(adm)), repeat=len(vs))
    while True:
        chunk = list(itertools.islice(combos, _CHUNK))
        if not chunk:
            return None
        idx = np.array(chunk, dtype=np.int64).reshape(len(chunk), len(vs))
        vals = adm[idx] if vs else np.zeros((len(chunk), 0), np.uint64)
        roots = _kernels.eval_batch(prog, succ, pred, n, vals, use_numba)[:, -1]
        bad = np.nonzero(roots != np.uint64(full))[0]
        if bad.size:
            t = int(bad[0])
            val = {v: frame.unmask(int(vals[t, j])) for j, v in enumerate(vs)}
            miss = full & ~int(roots[t])
            world = frame.worlds[(miss & -miss).bit_length() - 1]
            return val, world


def valid_on_general_frame(frame: FiniteGeneralFrame, phi: Formula, max_vars: int = 3,
                           use_numba: bool | None = None) -> bool:
    return find_refutation(frame, phi, max_vars, use_numba) is None


# ---------------------------------------------------------------- finite modal algebras


@dataclass(frozen=True)
class FiniteMA:
    """Powerset algebra over ``n_atoms`` atoms with diamond tables indexed by element bitmask."""

    n_atoms: int
    ops: Mapping[int, tuple[int, ...]]

    def __post_init__(self):
        size = 1 << self.n_atoms
        ops = {}
        for k, table in self.ops.items():
            table = tuple(int(x) for x in table)
            if len(table) != size or any(not 0 <= x < size for x in table):
                raise ValueError(f"operator {k} table must map all {size} elements into the carrier")
            ops[_rel_key(k)] = table
        object.__setattr__(self, "ops", ops)

    @property
    def size(self) -> int:
        return 1 << self.n_atoms

    @classmethod
    def from_atom_images(cls, n_atoms: int, images: Mapping[int, list[int]]) -> "FiniteMA":
        """Additive operators determined by their values on atoms."""
        ops = {}
        for k, img in images.items():
            table = []
            for x in range(1 << n_atoms):
                v = 0
                for j in range(n_atoms):
                    if x >> j & 1:
                        v |= img[j]
                table.append(v)
            ops[k] = tuple(table)
        return cls(n_atoms, ops)

    @classmethod
    def from_frame(cls, frame: FiniteGeneralFrame) -> "FiniteMA":
        """Complex algebra of a Kripke frame (atoms are worlds)."""
        n = len(frame.worlds)
        if n > 4:
            raise ValueError("finite algebras are capped at 4 atoms")
        return cls(n, {k: tuple(frame.dia_mask(k, x) for x in range(1 << n)) for k in frame.relations})

    def to_frame(self) -> FiniteGeneralFrame:
        """Atom structure: world i sees j iff atom i is below dia of atom j."""
        worlds = tuple(f"w{i}" for i in range(self.n_atoms))
        rels = {}
        for k, table in self.ops.items():
            rels[k] = frozenset(
                (worlds[i], worlds[j])
                for i in range(self.n_atoms)
                for j in range(self.n_atoms)
                if table[1 << j] >> i & 1
            )
        return FiniteGeneralFrame(worlds, rels, None)


def _ma_table(algebra: FiniteMA, modality: int) -> np.ndarray:
    if algebra.n_atoms > 4:
        raise ValueError("finite algebras are capped at 4 atoms")
    return np.array(algebra.ops[_rel_key(modality)], dtype=np.int64)


def r_failure_finite_ma(algebra: FiniteMA, modality: int = 0,
                        use_numba: bool | None = None) -> tuple[int, int] | None:
    a, b = _kernels.first_r_failure(_ma_table(algebra, modality), use_numba)
    return None if a < 0 else (a, b)


def check_R_finite_ma(algebra: FiniteMA, modality: int = 0, use_numba: bool | None = None) -> bool:
    return r_failure_finite_ma(algebra, modality, use_numba) is None


def v_failure_finite_ma(algebra: FiniteMA, modality: int = 0,
                        use_numba: bool | None = None) -> frozenset[int] | None:
    """A family of carrier elements whose join is not preserved, or None."""
    s = _kernels.first_v_failure(_ma_table(algebra, modality), use_numba)
    if s < 0:
        return None
    return frozenset(e for e in range(algebra.size) if s >> e & 1)


def check_V_finite_ma(algebra: FiniteMA, modality: int = 0, use_numba: bool | None = None) -> bool:
    return v_failure_finite_ma(algebra, modality, use_numba) is None


# ---------------------------------------------------------------- JSON


def frame_to_json(frame: FiniteGeneralFrame, valuation: Mapping[int, frozenset[str]] | None = None) -> dict:
    out = {
        "worlds": list(frame.worlds),
        "relations": {_rel_name(k): sorted([x, y] for x, y in v) for k, v in sorted(frame.relations.items())},
        "admissibles": None if frame.admissibles is None else [sorted(a) for a in frame.admissibles],
    }
    if valuation is not None:
        out["valuation"] = {str(k): sorted(v) for k, v in sorted(valuation.items())}
    return out


def frame_from_json(data: dict | str) -> FiniteGeneralFrame:
    if isinstance(data, str):
        data = json.loads(data)
    adm = data.get("admissibles")
    return FiniteGeneralFrame(
        tuple(data["worlds"]),
        {k: frozenset(tuple(p) for p in v) for k, v in data.get("relations", {}).items()},
        None if adm is None else tuple(frozenset(a) for a in adm),
    )


def model_from_json(data: dict | str) -> FiniteModel:
    if isinstance(data, str):
        data = json.loads(data)
    frame = frame_from_json(data)
    return FiniteModel(frame, {int(k): frozenset(v) for k, v in data.get("valuation", {}).items()})
