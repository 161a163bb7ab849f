"""Bitmask kernels for finite structures.

Worlds are bits of a uint64, so frames passed here have at most 64 worlds.
Each kernel has a numba implementation and a pure-numpy one. Setting
``VWORKBENCH_NO_NUMBA=1`` (or not having numba installed) selects numpy.
"""

from __future__ import annotations

import os

import numpy as np

from .formula import (
    And,
    Bot,
    Box,
    ConvBox,
    Formula,
    Iff,
    Imp,
    Neg,
    Or,
    Top,
    UBox,
    Var,
    subformulas,
)

OP_VAR, OP_TOP, OP_BOT, OP_NEG, OP_AND, OP_OR, OP_IMP, OP_IFF, OP_BOX, OP_CBOX, OP_UBOX = range(11)

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

USE_NUMBA = _HAVE_NUMBA and os.environ.get("VWORKBENCH_NO_NUMBA", "") not in ("1", "true", "yes")


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


def full_mask(n: int) -> np.uint64:
    if n > 64:
        raise ValueError("bitmask kernels support at most 64 worlds")
    return np.uint64((1 << n) - 1)


class Program:
    """A formula compiled to post-order opcodes.

    ``var_slots`` maps variable indices to valuation columns and ``rel_slots`` maps
    modality indices to relation rows.
    """

    def __init__(self, phi: Formula, var_slots: dict[int, int], rel_slots: dict[int, int]):
        nodes = subformulas(phi)
        pos = {f: k for k, f in enumerate(nodes)}
        n = len(nodes)
        self.ops = np.zeros(n, np.int64)
        self.a = np.zeros(n, np.int64)
        self.b = np.zeros(n, np.int64)
        self.m = np.zeros(n, np.int64)
        for k, f in enumerate(nodes):
            if isinstance(f, Var):
                self.ops[k] = OP_VAR
                self.a[k] = var_slots[f.index]
            elif isinstance(f, Top):
                self.ops[k] = OP_TOP
            elif isinstance(f, Bot):
                self.ops[k] = OP_BOT
            elif isinstance(f, Neg):
                self.ops[k], self.a[k] = OP_NEG, pos[f.arg]
            elif isinstance(f, (And, Or, Imp, Iff)):
                self.ops[k] = {And: OP_AND, Or: OP_OR, Imp: OP_IMP, Iff: OP_IFF}[type(f)]
                self.a[k], self.b[k] = pos[f.left], pos[f.right]
            elif isinstance(f, Box):
                self.ops[k], self.a[k], self.m[k] = OP_BOX, pos[f.arg], rel_slots[f.index]
            elif isinstance(f, ConvBox):
                self.ops[k], self.a[k], self.m[k] = OP_CBOX, pos[f.arg], rel_slots[f.index]
            elif isinstance(f, UBox):
                self.ops[k], self.a[k] = OP_UBOX, pos[f.arg]
            else:
                raise ValueError(f"kernel cannot evaluate {type(f).__name__}")
        self.nodes = nodes
        self.position = pos


def _eval_numpy(ops, a, b, m, succ, pred, full, vals):
    n_val = vals.shape[0]
    n_nodes = ops.shape[0]
    n_worlds = succ.shape[1]
    out = np.zeros((n_nodes, n_val), np.uint64)
    zero = np.uint64(0)
    for k in range(n_nodes):
        op = ops[k]
        if op == OP_VAR:
            out[k] = vals[:, a[k]]
        elif op == OP_TOP:
            out[k] = full
        elif op == OP_BOT:
            out[k] = zero
        elif op == OP_NEG:
            out[k] = full & ~out[a[k]]
        elif op == OP_AND:
            out[k] = out[a[k]] & out[b[k]]
        elif op == OP_OR:
            out[k] = out[a[k]] | out[b[k]]
        elif op == OP_IMP:
            out[k] = (full & ~out[a[k]]) | out[b[k]]
        elif op == OP_IFF:
            out[k] = full & ~(out[a[k]] ^ out[b[k]])
        elif op == OP_BOX or op == OP_CBOX:
            rel = succ if op == OP_BOX else pred
            x = out[a[k]]
            acc = np.zeros(n_val, np.uint64)
            for w in range(n_worlds):
                hit = (rel[m[k], w] & ~x) == zero
                acc |= np.where(hit, np.uint64(1) << np.uint64(w), zero)
            out[k] = acc
        else:
            out[k] = np.where(out[a[k]] == full, full, zero)
    return out.T.copy()


def _check_v_numpy(dia):
    carrier = dia.shape[0]
    join = np.zeros(1, np.int64)
    djoin = np.zeros(1, np.int64)
    for e in range(carrier):
        join = np.concatenate([join, join | e])
        djoin = np.concatenate([djoin, djoin | dia[e]])
    bad = np.nonzero(dia[join] != djoin)[0]
    return int(bad[0]) if bad.size else -1


def _check_r_numpy(dia):
    c = dia.shape[0]
    x = np.arange(c)
    # below[c, d]: d is a nonzero element under c
    below = ((x[None, :] & ~x[:, None]) == 0) & (x[None, :] != 0)
    hits = (x[:, None] & dia[None, :]) != 0  # hits[a, d]: a meets dia d
    # good[a, c]: c != 0 and every nonzero d <= c has a & dia d != 0
    good = np.all(~below[None, :, :] | hits[:, None, :], axis=2) & (x[None, :] != 0)
    # exists_c[a, b]: some good c <= b
    exists_c = np.any(good[:, None, :] & ((x[None, :] & ~x[:, None]) == 0)[None, :, :], axis=2)
    bad = hits & ~exists_c
    idx = np.argwhere(bad)
    if idx.size:
        return int(idx[0, 0]), int(idx[0, 1])
    return -1, -1


if _HAVE_NUMBA:

    @njit(cache=True)
    def _eval_numba(ops, a, b, m, succ, pred, full, vals):
        n_val = vals.shape[0]
        n_nodes = ops.shape[0]
        n_worlds = succ.shape[1]
        out = np.empty((n_val, n_nodes), np.uint64)
        zero = np.uint64(0)
        one = np.uint64(1)
        for t in range(n_val):
            for k in range(n_nodes):
                op = ops[k]
                r = zero
                if op == OP_VAR:
                    r = vals[t, a[k]]
                elif op == OP_TOP:
                    r = full
                elif op == OP_NEG:
                    r = full & ~out[t, a[k]]
                elif op == OP_AND:
                    r = out[t, a[k]] & out[t, b[k]]
                elif op == OP_OR:
                    r = out[t, a[k]] | out[t, b[k]]
                elif op == OP_IMP:
                    r = (full & ~out[t, a[k]]) | out[t, b[k]]
                elif op == OP_IFF:
                    r = full & ~(out[t, a[k]] ^ out[t, b[k]])
                elif op == OP_BOX or op == OP_CBOX:
                    x = out[t, a[k]]
                    for w in range(n_worlds):
                        s = succ[m[k], w] if op == OP_BOX else pred[m[k], w]
                        if (s & ~x) == zero:
                            r |= one << np.uint64(w)
                elif op == OP_UBOX:
                    if out[t, a[k]] == full:
                        r = full
                out[t, k] = r
        return out

    @njit(cache=True)
    def _check_v_numba(dia):
        carrier = dia.shape[0]
        total = 1 << carrier
        join = np.zeros(total, np.int64)
        djoin = np.zeros(total, np.int64)
        for s in range(1, total):
            low = s & (-s)
            e = 0
            while (1 << e) != low:
                e += 1
            join[s] = join[s ^ low] | e
            djoin[s] = djoin[s ^ low] | dia[e]
        for s in range(total):
            if dia[join[s]] != djoin[s]:
                return s
        return -1

    @njit(cache=True)
    def _check_r_numba(dia):
        c = dia.shape[0]
        good = np.zeros((c, c), np.bool_)
        for a in range(c):
            for x in range(1, c):
                ok = True
                for d in range(1, c):
                    if (d & ~x) == 0 and (a & dia[d]) == 0:
                        ok = False
                        break
                good[a, x] = ok
        for a in range(c):
            for b in range(c):
                if (a & dia[b]) == 0:
                    continue
                found = False
                for x in range(1, c):
                    if (x & ~b) == 0 and good[a, x]:
                        found = True
                        break
                if not found:
                    return a, b
        return -1, -1


def eval_batch(prog: Program, succ: np.ndarray, pred: np.ndarray, n_worlds: int, vals: np.ndarray,
               use_numba: bool | None = None) -> np.ndarray:
    """Truth sets of every program node for each valuation row; shape (rows, nodes)."""
    use = USE_NUMBA if use_numba is None else (use_numba and _HAVE_NUMBA)
    full = full_mask(n_worlds)
    vals = np.ascontiguousarray(vals, dtype=np.uint64)
    if vals.ndim != 2:
        raise ValueError("valuations must be a 2-d array")
    if vals.shape[1] == 0:
        vals = np.zeros((vals.shape[0], 1), np.uint64)
    if use:
        return _eval_numba(prog.ops, prog.a, prog.b, prog.m, succ, pred, full, vals)
    return _eval_numpy(prog.ops, prog.a, prog.b, prog.m, succ, pred, full, vals)


def first_v_failure(dia: np.ndarray, use_numba: bool | None = None) -> int:
    """Index (as a bitset over carrier elements) of a family whose join breaks additivity, or -1."""
    use = USE_NUMBA if use_numba is None else (use_numba and _HAVE_NUMBA)
    dia = np.ascontiguousarray(dia, dtype=np.int64)
    return int(_check_v_numba(dia)) if use else _check_v_numpy(dia)


def first_r_failure(dia: np.ndarray, use_numba: bool | None = None) -> tuple[int, int]:
    use = USE_NUMBA if use_numba is None else (use_numba and _HAVE_NUMBA)
    dia = np.ascontiguousarray(dia, dtype=np.int64)
    if use:
        a, b = _check_r_numba(dia)
        return int(a), int(b)
    return _check_r_numpy(dia)
