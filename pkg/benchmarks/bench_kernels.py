"""Compare the numba kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each workload is run once per backend to warm up (numba compiles on first call),
checked for identical results, then timed as the best of ``--repeat`` runs.
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from vworkbench import _kernels
from vworkbench.decision import collapse
from vworkbench.finite import FiniteMA, _arrays
from vworkbench.formula import parse, subformulas


def eval_workload():
    phi = parse("[]<>top -> []([]([]p0 -> p0) -> p0) & ([]p1 -> <>(p0 & ~p1))")
    frame = collapse(9).frame  # 12 worlds
    rel_slots, succ, pred = _arrays(frame, phi)
    prog = _kernels.Program(phi, {0: 0, 1: 1}, rel_slots)
    n = len(frame.worlds)
    rng = np.random.default_rng(0)
    vals = rng.integers(0, 1 << n, size=(200_000, 2), dtype=np.uint64)
    assert len(subformulas(phi)) == prog.ops.shape[0]

    def run(use):
        return _kernels.eval_batch(prog, succ, pred, n, vals, use)

    return run


def algebra_tables(count: int = 40):
    rng = random.Random(0)
    out = []
    for _ in range(count):
        ma = FiniteMA.from_atom_images(4, {0: [rng.randrange(16) for _ in range(4)]})
        out.append(np.array(ma.ops[0], dtype=np.int64))
    return out


def v_workload():
    tables = algebra_tables()
    return lambda use: [_kernels.first_v_failure(t, use) for t in tables]


def r_workload():
    tables = algebra_tables(400)
    return lambda use: [_kernels.first_r_failure(t, use) for t in tables]


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if not _kernels._HAVE_NUMBA:
        raise SystemExit("numba is not installed; only the numpy backend is available")
    rows = []
    for name, make in (("eval_batch", eval_workload), ("first_v_failure", v_workload),
                       ("first_r_failure", r_workload)):
        run = make()
        a, b = run(True), run(False)
        same = np.array_equal(a, b) if isinstance(a, np.ndarray) else a == b
        if not same:
            raise SystemExit(f"{name}: backends disagree")
        t_nb = best_of(lambda: run(True), args.repeat)
        t_np = best_of(lambda: run(False), args.repeat)
        rows.append((name, t_nb, t_np))
    print(f"{'kernel':<18}{'numba s':>10}{'numpy s':>10}{'speedup':>10}")
    for name, t_nb, t_np in rows:
        print(f"{name:<18}{t_nb:>10.4f}{t_np:>10.4f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
