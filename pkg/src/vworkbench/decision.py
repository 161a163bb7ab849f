"""Satisfiability over the extended van Benthem frame via its finite collapses.

The m-collapse keeps inf+1, inf and the naturals m..0. A formula is satisfiable
over the infinite frame iff it is satisfiable in its l(phi)-collapse under a
phi-good valuation: every member of nsub(phi) true at inf is also true at some
natural of the collapse.

``good_sat`` scans the naturals 0..m in order. Truth at a natural only depends
on the atoms there and on which box bodies held at every smaller natural, so
valuations sharing that summary are merged. The verdict equals that of
enumerating every valuation; ``good_sat_enumerative`` does the literal
enumeration for small inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping

import numpy as np

from . import _kernels
from .cofin import AdmSet, Cofinite, Finite
from .finite import FiniteGeneralFrame, FiniteModel, _arrays, truth_set
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
    length,
    nsub,
    subformulas,
    to_text,
    variables,
)

DEFAULT_MAX_VARS = 3


class DecisionError(ValueError):
    pass


@dataclass(frozen=True)
class Collapse:
    m: int
    frame: FiniteGeneralFrame

    @property
    def size(self) -> int:
        return len(self.frame.worlds)


def nat(k: int) -> str:
    return f"n:{k}"


def collapse(m: int, with_e: bool = True) -> Collapse:
    worlds = ("inf+1", "inf") + tuple(nat(k) for k in range(m, -1, -1))
    r0 = {("inf+1", "inf"), ("inf", "inf")}
    r0 |= {("inf", nat(k)) for k in range(m + 1)}
    r0 |= {(nat(a), nat(b)) for a in range(m + 1) for b in range(a)}
    rels = {0: frozenset(r0)}
    if with_e:
        rels[E_MODALITY] = frozenset((x, y) for x in worlds for y in worlds)
    return Collapse(m, FiniteGeneralFrame(worlds, rels, None))


@dataclass(frozen=True)
class SatWitness:
    formula: Formula
    m: int
    valuation: Mapping[int, frozenset[str]]
    world: str

    def to_json(self) -> dict:
        return {
            "formula": to_text(self.formula),
            "collapse": self.m,
            "size": self.m + 3,
            "valuation": {f"p{k}": sorted(v) for k, v in sorted(self.valuation.items())},
            "world": self.world,
        }


def _check_fragment(phi: Formula, max_vars: int) -> list[int]:
    for f in subformulas(phi):
        if isinstance(f, (Nominal, ConvBox, UBox)):
            raise DecisionError(f"{type(f).__name__} is outside the decided fragment")
        if isinstance(f, Box) and f.index not in (0, E_MODALITY):
            raise DecisionError(f"modality {f.index} is outside the decided fragment")
    vs = sorted(variables(phi))
    if len(vs) > max_vars:
        raise DecisionError(f"{len(vs)} variables exceed the cap of {max_vars}")
    return vs


class _Scan:
    """Point-by-point evaluation of nsub(phi) along the chain of naturals."""

    def __init__(self, phi: Formula, vs: list[int]):
        self.phi = phi
        self.nodes = nsub(phi)
        self.pos = {f: i for i, f in enumerate(self.nodes)}
        self.var_bit = {v: j for j, v in enumerate(vs)}
        self.nvars = len(vs)
        self.box0 = [i for i, f in enumerate(self.nodes) if isinstance(f, Box) and f.index == 0]
        self.boxe = [i for i, f in enumerate(self.nodes) if isinstance(f, Box) and f.index == E_MODALITY]
        self.body = {i: self.pos[self.nodes[i].arg] for i in self.box0 + self.boxe}
        self.all_mask = (1 << len(self.nodes)) - 1
        self.box0_mask = sum(1 << i for i in self.box0)
        self.boxe_mask = sum(1 << i for i in self.boxe)
        self.root = self.pos[phi]

    def vector(self, atoms: int, box_true, guess: int) -> int:
        """Truth bits of every node at one point; ``box_true(i, vec)`` decides [0] nodes."""
        vec = 0
        for i, f in enumerate(self.nodes):
            if isinstance(f, Var):
                t = atoms >> self.var_bit[f.index] & 1
            elif isinstance(f, Top):
                t = 1
            elif isinstance(f, Bot):
                t = 0
            elif isinstance(f, Neg):
                t = 1 - (vec >> self.pos[f.arg] & 1)
            elif isinstance(f, (And, Or, Imp, Iff)):
                a = vec >> self.pos[f.left] & 1
                b = vec >> self.pos[f.right] & 1
                if isinstance(f, And):
                    t = a & b
                elif isinstance(f, Or):
                    t = a | b
                elif isinstance(f, Imp):
                    t = (1 - a) | b
                else:
                    t = 1 - (a ^ b)
            elif f.index == 0:
                t = 1 if box_true(i, vec) else 0
            else:
                t = guess >> i & 1
            vec |= t << i
        return vec

    def bodies(self, vec: int, boxes: list[int]) -> int:
        out = 0
        for i in boxes:
            if vec >> self.body[i] & 1:
                out |= 1 << i
        return out

    def step(self, state: tuple[int, int, int], atoms: int, guess: int) -> tuple[tuple[int, int, int], int]:
        allbox, realized, eall = state
        vec = self.vector(atoms, lambda i, v: allbox >> i & 1, guess)
        new = (allbox & self.bodies(vec, self.box0), realized | vec, eall & self.bodies(vec, self.boxe))
        return new, vec

    def start(self) -> tuple[int, int, int]:
        return (self.box0_mask, 0, self.boxe_mask)

    def limits(self, state, a_inf: int, a_inf1: int, guess: int):
        allbox, realized, eall = state
        v_inf = self.vector(a_inf, lambda i, v: (allbox >> i & 1) and (v >> self.body[i] & 1), guess)
        v_inf1 = self.vector(a_inf1, lambda i, v: v_inf >> self.body[i] & 1, guess)
        ok = True
        for i in self.boxe:
            b = self.body[i]
            holds = (eall >> i & 1) and (v_inf >> b & 1) and (v_inf1 >> b & 1)
            if bool(guess >> i & 1) != bool(holds):
                ok = False
                break
        return ok, v_inf, v_inf1

    def guesses(self):
        for bits in product((0, 1), repeat=len(self.boxe)):
            g = 0
            for i, b in zip(self.boxe, bits):
                g |= b << i
            yield g


def good_sat(phi: Formula, max_vars: int = DEFAULT_MAX_VARS, m: int | None = None) -> SatWitness | None:
    """A phi-good valuation on the l(phi)-collapse satisfying phi, or None."""
    vs = _check_fragment(phi, max_vars)
    if m is None:
        m = length(phi)
    scan = _Scan(phi, vs)
    n_atoms = 1 << scan.nvars
    for guess in scan.guesses():
        layers: list[dict] = []
        states = {scan.start(): None}
        for _ in range(m + 1):
            nxt: dict = {}
            for st in states:
                for atoms in range(n_atoms):
                    new, _vec = scan.step(st, atoms, guess)
                    if new not in nxt:
                        nxt[new] = (st, atoms)
            layers.append(nxt)
            states = nxt
        for st in states:
            realized = st[1]
            for a_inf in range(n_atoms):
                for a_inf1 in range(n_atoms):
                    ok, v_inf, v_inf1 = scan.limits(st, a_inf, a_inf1, guess)
                    if not ok or v_inf & ~realized & scan.all_mask:
                        continue
                    if not ((v_inf1 | v_inf | realized) >> scan.root & 1):
                        continue
                    chain = []
                    cur = st
                    for layer in reversed(layers):
                        prev, atoms = layer[cur]
                        chain.append(atoms)
                        cur = prev
                    chain.reverse()  # chain[k] = atoms at natural k
                    return _witness(phi, vs, m, chain, a_inf, a_inf1)
    return None


def _witness(phi: Formula, vs: list[int], m: int, chain: list[int], a_inf: int, a_inf1: int) -> SatWitness:
    col = collapse(m)
    val = {}
    for j, v in enumerate(vs):
        pts = {nat(k) for k, a in enumerate(chain) if a >> j & 1}
        if a_inf >> j & 1:
            pts.add("inf")
        if a_inf1 >> j & 1:
            pts.add("inf+1")
        val[v] = frozenset(pts)
    model = FiniteModel(col.frame, val)
    sat = truth_set(model, phi)
    if not sat:
        raise AssertionError(f"collapse witness does not satisfy {to_text(phi)}")
    naturals = {nat(k) for k in range(m + 1)}
    for chi in nsub(phi):
        ts = truth_set(model, chi)
        if "inf" in ts and not ts & naturals:
            raise AssertionError(f"collapse witness is not good for {to_text(chi)}")
    world = next(w for w in col.frame.worlds if w in sat)
    return SatWitness(phi, m, val, world)


def valid_ide(phi: Formula, max_vars: int = DEFAULT_MAX_VARS) -> bool:
    return good_sat(Neg(phi), max_vars) is None


def in_IDe(phi: Formula, max_vars: int = DEFAULT_MAX_VARS) -> bool:
    return valid_ide(phi, max_vars)


def in_ID(phi: Formula, max_vars: int = DEFAULT_MAX_VARS) -> bool:
    if any(isinstance(f, Box) and f.index != 0 for f in subformulas(phi)):
        raise DecisionError("in_ID needs a unimodal formula")
    return valid_ide(phi, max_vars)


# ---------------------------------------------------------------- reference searches


def good_sat_enumerative(phi: Formula, m: int | None = None, max_rows: int = 1 << 20,
                         use_numba: bool | None = None) -> tuple[dict[int, frozenset[str]], str] | None:
    """Literal enumeration of every valuation on the collapse, batched through the kernel."""
    vs = _check_fragment(phi, DEFAULT_MAX_VARS)
    if m is None:
        m = length(phi)
    col = collapse(m)
    frame = col.frame
    w = len(frame.worlds)
    rows = 1 << (w * len(vs))
    if rows > max_rows:
        raise DecisionError(f"{rows} valuations exceed the enumeration cap")
    rel_slots, succ, pred = _arrays(frame, phi)
    nodes = subformulas(phi)
    prog = _kernels.Program(phi, {v: j for j, v in enumerate(vs)}, rel_slots)
    full = (1 << w) - 1
    inf_bit = 1 << frame.index["inf"]
    nat_mask = sum(1 << frame.index[nat(k)] for k in range(m + 1))
    word = np.uint64(full)
    chunk = 1 << 16
    for start in range(0, rows, chunk):
        code = np.arange(start, min(rows, start + chunk), dtype=np.uint64)
        vals = np.stack([(code >> np.uint64(w * j)) & word for j in range(len(vs))], axis=1) if vs else \
            np.zeros((len(code), 0), np.uint64)
        masks = _kernels.eval_batch(prog, succ, pred, w, vals, use_numba)
        ok = masks[:, -1] != 0
        for k in range(len(nodes)):
            col_k = masks[:, k]
            pos_bad = ((col_k & np.uint64(inf_bit)) != 0) & ((col_k & np.uint64(nat_mask)) == 0)
            neg = np.uint64(full) & ~col_k
            neg_bad = ((neg & np.uint64(inf_bit)) != 0) & ((neg & np.uint64(nat_mask)) == 0)
            ok &= ~pos_bad & ~neg_bad
        hit = np.nonzero(ok)[0]
        if hit.size:
            t = int(hit[0])
            val = {v: frame.unmask(int(vals[t, j])) for j, v in enumerate(vs)}
            root = int(masks[t, -1])
            world = frame.worlds[(root & -root).bit_length() - 1]
            return val, world
    return None


def truncated_sat(phi: Formula, k: int, max_vars: int = DEFAULT_MAX_VARS) -> dict[int, AdmSet] | None:
    """Exact satisfiability over the infinite frame restricted to fin/cofin valuations
    whose naturals beyond k copy the value at inf. No goodness condition is imposed.

    The tail of identical points is handled by iterating the scan until its summary
    stops changing. Returns a satisfying valuation as admissible sets, or None.
    """
    vs = _check_fragment(phi, max_vars)
    scan = _Scan(phi, vs)
    n_atoms = 1 << scan.nvars
    for guess in scan.guesses():
        layers: list[dict] = []
        states = {scan.start(): None}
        for _ in range(k + 1):
            nxt: dict = {}
            for st in states:
                for atoms in range(n_atoms):
                    new, _vec = scan.step(st, atoms, guess)
                    if new not in nxt:
                        nxt[new] = (st, atoms)
            layers.append(nxt)
            states = nxt
        for st in states:
            for a_inf in range(n_atoms):
                tail = st
                while True:
                    nxt_state, _ = scan.step(tail, a_inf, guess)
                    if nxt_state == tail:
                        break
                    tail = nxt_state
                realized = tail[1]
                for a_inf1 in range(n_atoms):
                    ok, v_inf, v_inf1 = scan.limits(tail, a_inf, a_inf1, guess)
                    if not ok or not ((v_inf1 | v_inf | realized) >> scan.root & 1):
                        continue
                    chain = []
                    cur = st
                    for layer in reversed(layers):
                        prev, atoms = layer[cur]
                        chain.append(atoms)
                        cur = prev
                    chain.reverse()
                    return _admissible_valuation(vs, chain, a_inf, a_inf1)
    return None


def _admissible_valuation(vs: list[int], chain: list[int], a_inf: int, a_inf1: int) -> dict[int, AdmSet]:
    out = {}
    for j, v in enumerate(vs):
        at = [n for n, a in enumerate(chain) if a >> j & 1]
        if a_inf >> j & 1:
            excl = [n for n in range(len(chain)) if n not in at]
            if not a_inf1 >> j & 1:
                excl.append("inf+1")
            out[v] = Cofinite(excl)
        else:
            out[v] = Finite(at + (["inf+1"] if a_inf1 >> j & 1 else []))
    return out
