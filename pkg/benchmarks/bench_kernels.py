"""Benchmark the compiled kernels against the pure-Python fallback.

Runs the four hot kernels (topological sort, forward/backward costs,
lazy edit composition, Levenshtein alignment) on synthetic workloads and
reports wall time per call for each backend plus the speedup.  Outputs
are cross-checked between backends while timing, so a run doubles as an
equivalence sanity check.

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --repeats 9 --scale 2.0
"""

import argparse
import math
import random
import time

import numpy as np

from latkit import Arc, Fst, SymbolTable, TROPICAL
from latkit.kernels import _pykernels

try:
    from latkit.kernels import _ckernels
except ImportError:
    _ckernels = None


def random_dag_csr(rng, num_states, max_out):
    """CSR pieces of a weighted DAG with arcs running low id -> high id."""
    offsets = [0]
    weights = []
    nexts = []
    for q in range(num_states):
        fan = rng.randint(0, max_out) if q < num_states - 1 else 0
        for _ in range(fan):
            nexts.append(rng.randint(q + 1, num_states - 1))
            weights.append(rng.uniform(0.0, 4.0))
        offsets.append(len(nexts))
    finals = [math.inf] * num_states
    finals[num_states - 1] = 0.0
    for q in rng.sample(range(num_states), num_states // 20 or 1):
        finals[q] = rng.uniform(0.0, 2.0)
    return (
        num_states,
        np.asarray(offsets, dtype=np.int64),
        np.asarray(weights, dtype=np.float64),
        np.asarray(nexts, dtype=np.int64),
        np.asarray(finals, dtype=np.float64),
    )


def sausage_lattice(rng, syms, slots, width):
    """Confusion-network acceptor: `slots` slots of `width` alternatives."""
    words = syms.words()
    arcs = [[] for _ in range(slots + 1)]
    for q in range(slots):
        for w in rng.sample(words, width):
            arcs[q].append(
                Arc(syms.id(w), syms.id(w), rng.uniform(0.0, 3.0), q + 1)
            )
    return Fst(0, arcs, {slots: 0.0}, syms, TROPICAL)


def linear_reference(rng, syms, length):
    words = syms.words()
    arcs = []
    for q in range(length):
        wid = syms.id(rng.choice(words))
        arcs.append([Arc(wid, wid, 0.0, q + 1)])
    arcs.append([])
    return Fst(0, arcs, {length: 0.0}, syms, TROPICAL)


def build_workloads(seed, scale):
    """One dict per kernel: positional args ready to pass to either backend."""
    rng = random.Random(seed)
    syms = SymbolTable.from_words(
        (f"w{k:02d}" for k in range(50)), include_unknown=False
    )

    n, offsets, weights, nexts, finals = random_dag_csr(
        rng, int(4000 * scale), 4
    )
    topo = _pykernels.topo_order(n, offsets, nexts)
    dag = {
        "topo_order": (n, offsets, nexts),
        "forward_costs (tropical)": (n, offsets, weights, nexts, topo, 0, False),
        "forward_costs (log)": (n, offsets, weights, nexts, topo, 0, True),
        "backward_costs (tropical)": (n, offsets, weights, nexts, finals, topo, False),
        "backward_costs (log)": (n, offsets, weights, nexts, finals, topo, True),
    }

    ref = linear_reference(rng, syms, int(30 * scale))
    hyp = sausage_lattice(rng, syms, int(30 * scale), 4)
    r_labels = np.asarray(
        [a.ilabel for row in (ref.arcs(q) for q in ref.states()) for a in row],
        dtype=np.int64,
    )
    r_weights = np.zeros(len(r_labels), dtype=np.float64)
    h_offsets, h_il, _, h_w, h_ns, h_finals = hyp.csr()
    nomatch = np.zeros(int(h_il.max()) + 1, dtype=np.int64)
    dag["edit_compose"] = (
        r_labels, r_weights, hyp.num_states, h_offsets, h_il, h_w, h_ns,
        h_finals, hyp.start, 1.0, 1.0, 1.0, 0.0, nomatch,
    )

    m = int(400 * scale)
    a = np.asarray([rng.randrange(1, 51) for _ in range(m)], dtype=np.int64)
    b = np.asarray([rng.randrange(1, 51) for _ in range(m + 20)], dtype=np.int64)
    dag["levenshtein"] = (a, b)
    return dag


def outputs_equal(x, y):
    if type(x) is not type(y):
        return False
    if isinstance(x, tuple):
        return len(x) == len(y) and all(outputs_equal(a, b) for a, b in zip(x, y))
    if isinstance(x, np.ndarray):
        return np.array_equal(x, y)
    return x == y


def best_time(fn, args, repeats):
    """Minimum wall time over `repeats` calls; result of the last call."""
    best = math.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def fmt(seconds):
    if seconds < 1e-3:
        return f"{seconds * 1e6:8.1f} µs"
    if seconds < 1.0:
        return f"{seconds * 1e3:8.2f} ms"
    return f"{seconds:8.2f} s "


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="Time each kernel under both backends."
    )
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repetitions per kernel (best is kept)")
    parser.add_argument("--seed", type=int, default=0,
                        help="workload generator seed")
    parser.add_argument("--scale", type=float, default=1.0,
                        help="multiplier on problem sizes")
    args = parser.parse_args(argv)

    workloads = build_workloads(args.seed, args.scale)
    if _ckernels is None:
        print("compiled backend not built; timing the pure-Python backend only")
    header = f"{'kernel':<28} {'python':>12} {'cython':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    mismatches = 0
    for name, call_args in workloads.items():
        fn_name = name.split(" ")[0]
        py_t, py_out = best_time(
            getattr(_pykernels, fn_name), call_args, args.repeats
        )
        if _ckernels is None:
            print(f"{name:<28} {fmt(py_t)} {'-':>12} {'-':>9}")
            continue
        cy_t, cy_out = best_time(
            getattr(_ckernels, fn_name), call_args, args.repeats
        )
        same = outputs_equal(py_out, cy_out)
        mismatches += not same
        flag = "" if same else "  OUTPUT MISMATCH"
        print(f"{name:<28} {fmt(py_t)} {fmt(cy_t)} {py_t / cy_t:8.1f}x{flag}")
    if mismatches:
        raise SystemExit(f"{mismatches} kernel(s) disagreed between backends")


if __name__ == "__main__":
    main()
