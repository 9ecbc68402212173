"""Pure-Python kernels: the fallback backend.

Each function mirrors its compiled twin in _ckernels.pyx operation for
operation — same traversal order, same floating-point evaluation order,
same libm calls — so the two backends produce bit-identical results.
Inputs and outputs are numpy arrays; internally plain lists are faster
under the interpreter.
"""

import math

import numpy as np

from ..semiring import log_add

INF = math.inf


def topo_order(num_states, offsets, nexts):
    """Kahn's algorithm, FIFO over state ids; None if cyclic."""
    offsets = offsets.tolist()
    nexts = nexts.tolist()
    indeg = [0] * num_states
    for ns in nexts:
        indeg[ns] += 1
    order = [q for q in range(num_states) if indeg[q] == 0]
    head = 0
    while head < len(order):
        q = order[head]
        head += 1
        for i in range(offsets[q], offsets[q + 1]):
            ns = nexts[i]
            indeg[ns] -= 1
            if indeg[ns] == 0:
                order.append(ns)
    if len(order) != num_states:
        return None
    return np.asarray(order, dtype=np.int64)


def forward_costs(num_states, offsets, weights, nexts, topo, start, use_log):
    """Cost from the start to each state over a DAG in topological order.
    use_log selects -log-sum-exp accumulation instead of min."""
    offsets = offsets.tolist()
    weights = weights.tolist()
    nexts = nexts.tolist()
    d = [INF] * num_states
    d[start] = 0.0
    for q in topo.tolist():
        dq = d[q]
        if dq == INF:
            continue
        for i in range(offsets[q], offsets[q + 1]):
            ns = nexts[i]
            cand = dq + weights[i]
            if use_log:
                d[ns] = log_add(d[ns], cand)
            elif cand < d[ns]:
                d[ns] = cand
    return np.asarray(d, dtype=np.float64)


def backward_costs(num_states, offsets, weights, nexts, finals, topo, use_log):
    """Cost from each state to acceptance (final weights included)."""
    offsets = offsets.tolist()
    weights = weights.tolist()
    nexts = nexts.tolist()
    topo = topo.tolist()
    d = finals.tolist()
    for idx in range(num_states - 1, -1, -1):
        q = topo[idx]
        acc = d[q]
        for i in range(offsets[q], offsets[q + 1]):
            cand = weights[i] + d[nexts[i]]
            if use_log:
                acc = log_add(acc, cand)
            elif cand < acc:
                acc = cand
        d[q] = acc
    return np.asarray(d, dtype=np.float64)


def edit_compose(r_labels, r_weights, h_num_states, offsets, ilabels, weights,
                 nexts, finals, h_start, ins_cost, del_cost, sub_cost,
                 match_cost, nomatch):
    """Compose reference ∘ edit-transducer ∘ hypothesis lazily.

    The reference is a linear word-id sequence (r_weights holds its
    per-arc costs); the hypothesis is an acyclic acceptor in CSR form;
    the single-state edit transducer is implied by the four costs and
    never materialized.  nomatch is a 0/1 mask over label ids that must
    never match themselves (they take the substitution cost even on
    equal labels).

    Composite states are (i, q, f): i reference words consumed, q the
    hypothesis state, f=1 right after a hypothesis-side epsilon move.
    f blocks reference-side deletions until the next consuming step —
    the two-state epsilon-sequencing filter — so each alignment is
    counted exactly once.

    Returns (num_states, arc_src, arc_il, arc_ol, arc_w, arc_ns,
    final_states, final_weights) over BFS-numbered states, state 0 the
    start.  Arc ilabel is the reference word (0 on insertions), olabel
    the hypothesis word (0 on deletions).  Dead states are not trimmed.
    """
    r_labels = r_labels.tolist()
    r_weights = r_weights.tolist()
    offsets = offsets.tolist()
    ilabels = ilabels.tolist()
    weights = weights.tolist()
    nexts = nexts.tolist()
    finals = finals.tolist()
    nomatch = nomatch.tolist()
    rn = len(r_labels)
    width = h_num_states * 2

    keys = [h_start * 2]  # packed (i=0, q=h_start, f=0)
    state_map = {keys[0]: 0}
    arc_src = []
    arc_il = []
    arc_ol = []
    arc_w = []
    arc_ns = []
    final_states = []
    final_weights = []

    def target(tkey):
        tid = state_map.get(tkey)
        if tid is None:
            tid = len(keys)
            state_map[tkey] = tid
            keys.append(tkey)
        return tid

    head = 0
    while head < len(keys):
        key = keys[head]
        sid = head
        head += 1
        f = key & 1
        q = (key >> 1) % h_num_states
        i = key // width

        if i < rn and f == 0:
            arc_src.append(sid)
            arc_il.append(r_labels[i])
            arc_ol.append(0)
            arc_w.append(del_cost + r_weights[i])
            arc_ns.append(target(key + width))
        for ai in range(offsets[q], offsets[q + 1]):
            x = ilabels[ai]
            hw = weights[ai]
            hns = nexts[ai]
            if x == 0:
                arc_src.append(sid)
                arc_il.append(0)
                arc_ol.append(0)
                arc_w.append(hw)
                arc_ns.append(target(i * width + hns * 2 + 1))
            else:
                arc_src.append(sid)
                arc_il.append(0)
                arc_ol.append(x)
                arc_w.append(ins_cost + hw)
                arc_ns.append(target(i * width + hns * 2))
                if i < rn:
                    r = r_labels[i]
                    cost = match_cost if (r == x and not nomatch[x]) else sub_cost
                    arc_src.append(sid)
                    arc_il.append(r)
                    arc_ol.append(x)
                    arc_w.append(cost + r_weights[i] + hw)
                    arc_ns.append(target((i + 1) * width + hns * 2))
        if i == rn and finals[q] != INF:
            final_states.append(sid)
            final_weights.append(finals[q])

    return (
        len(keys),
        np.asarray(arc_src, dtype=np.int64),
        np.asarray(arc_il, dtype=np.int64),
        np.asarray(arc_ol, dtype=np.int64),
        np.asarray(arc_w, dtype=np.float64),
        np.asarray(arc_ns, dtype=np.int64),
        np.asarray(final_states, dtype=np.int64),
        np.asarray(final_weights, dtype=np.float64),
    )


def levenshtein(ref, hyp):
    """(substitutions, deletions, insertions) of a minimum unit-cost
    alignment.  Ties prefer the diagonal step, then deletion, then
    insertion, so both backends report identical breakdowns."""
    ref = ref.tolist()
    hyp = hyp.tolist()
    rn = len(ref)
    hn = len(hyp)
    # rows over hyp positions; each cell tracks (cost, subs, dels, ins)
    cost = list(range(hn + 1))
    subs = [0] * (hn + 1)
    dels = [0] * (hn + 1)
    ins = list(range(hn + 1))
    for i in range(1, rn + 1):
        pc, ps, pd, pi = cost, subs, dels, ins
        cost = [i] + [0] * hn
        subs = [0] * (hn + 1)
        dels = [i] + [0] * hn
        ins = [0] * (hn + 1)
        ri = ref[i - 1]
        for j in range(1, hn + 1):
            hit = ri == hyp[j - 1]
            c = pc[j - 1] + (0 if hit else 1)
            s, d, n = ps[j - 1] + (0 if hit else 1), pd[j - 1], pi[j - 1]
            up = pc[j] + 1
            if up < c:
                c, s, d, n = up, ps[j], pd[j] + 1, pi[j]
            left = cost[j - 1] + 1
            if left < c:
                c, s, d, n = left, subs[j - 1], dels[j - 1], ins[j - 1] + 1
            cost[j], subs[j], dels[j], ins[j] = c, s, d, n
    return subs[hn], dels[hn], ins[hn]
