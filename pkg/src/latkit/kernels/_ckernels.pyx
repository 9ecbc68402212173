# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels.

Each function mirrors its pure-Python twin in _pykernels.py operation
for operation — same traversal order, same floating-point evaluation
order, same libm calls — so the two backends produce bit-identical
results.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, exp, log1p

cnp.import_array()


cdef inline double _log_add(double a, double b) noexcept nogil:
    if a == INFINITY:
        return b
    if b == INFINITY:
        return a
    if a <= b:
        return a - log1p(exp(a - b))
    return b - log1p(exp(b - a))


def topo_order(Py_ssize_t num_states,
               cnp.int64_t[::1] offsets,
               cnp.int64_t[::1] nexts):
    """Kahn's algorithm, FIFO over state ids; None if cyclic."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] order_arr = np.empty(num_states, dtype=np.int64)
    cdef cnp.int64_t[::1] order = order_arr
    cdef cnp.int64_t[::1] indeg = np.zeros(num_states, dtype=np.int64)
    cdef Py_ssize_t i, q, ns, head, tail
    for i in range(nexts.shape[0]):
        indeg[nexts[i]] += 1
    tail = 0
    for q in range(num_states):
        if indeg[q] == 0:
            order[tail] = q
            tail += 1
    head = 0
    while head < tail:
        q = order[head]
        head += 1
        for i in range(offsets[q], offsets[q + 1]):
            ns = nexts[i]
            indeg[ns] -= 1
            if indeg[ns] == 0:
                order[tail] = ns
                tail += 1
    if tail != num_states:
        return None
    return order_arr


def forward_costs(Py_ssize_t num_states,
                  cnp.int64_t[::1] offsets,
                  cnp.float64_t[::1] weights,
                  cnp.int64_t[::1] nexts,
                  cnp.int64_t[::1] topo,
                  Py_ssize_t start,
                  bint use_log):
    """Cost from the start to each state over a DAG in topological order.
    use_log selects -log-sum-exp accumulation instead of min."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] d_arr = np.full(num_states, INFINITY)
    cdef cnp.float64_t[::1] d = d_arr
    cdef Py_ssize_t qi, q, i, ns
    cdef double dq, cand
    d[start] = 0.0
    for qi in range(num_states):
        q = topo[qi]
        dq = d[q]
        if dq == INFINITY:
            continue
        for i in range(offsets[q], offsets[q + 1]):
            ns = nexts[i]
            cand = dq + weights[i]
            if use_log:
                d[ns] = _log_add(d[ns], cand)
            elif cand < d[ns]:
                d[ns] = cand
    return d_arr


def backward_costs(Py_ssize_t num_states,
                   cnp.int64_t[::1] offsets,
                   cnp.float64_t[::1] weights,
                   cnp.int64_t[::1] nexts,
                   cnp.float64_t[::1] finals,
                   cnp.int64_t[::1] topo,
                   bint use_log):
    """Cost from each state to acceptance (final weights included)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] d_arr = np.empty(num_states)
    cdef cnp.float64_t[::1] d = d_arr
    cdef Py_ssize_t qi, q, i
    cdef double acc, cand
    for qi in range(num_states):
        d[qi] = finals[qi]
    for qi in range(num_states - 1, -1, -1):
        q = topo[qi]
        acc = d[q]
        for i in range(offsets[q], offsets[q + 1]):
            cand = weights[i] + d[nexts[i]]
            if use_log:
                acc = _log_add(acc, cand)
            elif cand < acc:
                acc = cand
        d[q] = acc
    return d_arr


def edit_compose(cnp.int64_t[::1] r_labels,
                 cnp.float64_t[::1] r_weights,
                 Py_ssize_t h_num_states,
                 cnp.int64_t[::1] offsets,
                 cnp.int64_t[::1] ilabels,
                 cnp.float64_t[::1] weights,
                 cnp.int64_t[::1] nexts,
                 cnp.float64_t[::1] finals,
                 Py_ssize_t h_start,
                 double ins_cost,
                 double del_cost,
                 double sub_cost,
                 double match_cost,
                 cnp.int64_t[::1] nomatch):
    """Compose reference ∘ edit-transducer ∘ hypothesis lazily.
    See _pykernels.edit_compose for the contract; two passes here —
    count, then fill exact-size arrays — emitting states and arcs in
    the same order as the pure backend."""
    cdef Py_ssize_t rn = r_labels.shape[0]
    cdef Py_ssize_t width = h_num_states * 2
    cdef Py_ssize_t cap = (rn + 1) * width
    cdef cnp.int64_t[::1] state_map = np.full(cap, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] keys = np.empty(cap, dtype=np.int64)
    cdef Py_ssize_t n_states = 1, n_arcs = 0, n_finals = 0
    cdef Py_ssize_t head, key, sid, f, q, i, ai, tkey
    cdef cnp.int64_t x, r
    keys[0] = h_start * 2
    state_map[h_start * 2] = 0

    # pass 1: discover states, count arcs and finals
    head = 0
    while head < n_states:
        key = keys[head]
        head += 1
        f = key & 1
        q = (key >> 1) % h_num_states
        i = key // width
        if i < rn and f == 0:
            n_arcs += 1
            tkey = key + width
            if state_map[tkey] < 0:
                state_map[tkey] = n_states
                keys[n_states] = tkey
                n_states += 1
        for ai in range(offsets[q], offsets[q + 1]):
            x = ilabels[ai]
            if x == 0:
                n_arcs += 1
                tkey = i * width + nexts[ai] * 2 + 1
                if state_map[tkey] < 0:
                    state_map[tkey] = n_states
                    keys[n_states] = tkey
                    n_states += 1
            else:
                n_arcs += 1
                tkey = i * width + nexts[ai] * 2
                if state_map[tkey] < 0:
                    state_map[tkey] = n_states
                    keys[n_states] = tkey
                    n_states += 1
                if i < rn:
                    n_arcs += 1
                    tkey = (i + 1) * width + nexts[ai] * 2
                    if state_map[tkey] < 0:
                        state_map[tkey] = n_states
                        keys[n_states] = tkey
                        n_states += 1
        if i == rn and finals[q] != INFINITY:
            n_finals += 1

    # pass 2: emit
    cdef cnp.ndarray[cnp.int64_t, ndim=1] arc_src = np.empty(n_arcs, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] arc_il = np.empty(n_arcs, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] arc_ol = np.empty(n_arcs, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] arc_w = np.empty(n_arcs)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] arc_ns = np.empty(n_arcs, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] fstates = np.empty(n_finals, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] fweights = np.empty(n_finals)
    cdef cnp.int64_t[::1] v_src = arc_src
    cdef cnp.int64_t[::1] v_il = arc_il
    cdef cnp.int64_t[::1] v_ol = arc_ol
    cdef cnp.float64_t[::1] v_w = arc_w
    cdef cnp.int64_t[::1] v_ns = arc_ns
    cdef cnp.int64_t[::1] v_fs = fstates
    cdef cnp.float64_t[::1] v_fw = fweights
    cdef Py_ssize_t pa = 0, pf = 0
    for sid in range(n_states):
        key = keys[sid]
        f = key & 1
        q = (key >> 1) % h_num_states
        i = key // width
        if i < rn and f == 0:
            v_src[pa] = sid
            v_il[pa] = r_labels[i]
            v_ol[pa] = 0
            v_w[pa] = del_cost + r_weights[i]
            v_ns[pa] = state_map[key + width]
            pa += 1
        for ai in range(offsets[q], offsets[q + 1]):
            x = ilabels[ai]
            if x == 0:
                v_src[pa] = sid
                v_il[pa] = 0
                v_ol[pa] = 0
                v_w[pa] = weights[ai]
                v_ns[pa] = state_map[i * width + nexts[ai] * 2 + 1]
                pa += 1
            else:
                v_src[pa] = sid
                v_il[pa] = 0
                v_ol[pa] = x
                v_w[pa] = ins_cost + weights[ai]
                v_ns[pa] = state_map[i * width + nexts[ai] * 2]
                pa += 1
                if i < rn:
                    r = r_labels[i]
                    v_src[pa] = sid
                    v_il[pa] = r
                    v_ol[pa] = x
                    if r == x and nomatch[x] == 0:
                        v_w[pa] = match_cost + r_weights[i] + weights[ai]
                    else:
                        v_w[pa] = sub_cost + r_weights[i] + weights[ai]
                    v_ns[pa] = state_map[(i + 1) * width + nexts[ai] * 2]
                    pa += 1
        if i == rn and finals[q] != INFINITY:
            v_fs[pf] = sid
            v_fw[pf] = finals[q]
            pf += 1

    return (n_states, arc_src, arc_il, arc_ol, arc_w, arc_ns, fstates, fweights)


def levenshtein(cnp.int64_t[::1] ref, cnp.int64_t[::1] hyp):
    """(substitutions, deletions, insertions) of a minimum unit-cost
    alignment; ties prefer diagonal, then deletion, then insertion."""
    cdef Py_ssize_t rn = ref.shape[0]
    cdef Py_ssize_t hn = hyp.shape[0]
    cdef cnp.int64_t[::1] cost = np.empty(hn + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] subs = np.zeros(hn + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] dels = np.zeros(hn + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] ins = np.empty(hn + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] pc = np.empty(hn + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] ps = np.empty(hn + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] pd = np.empty(hn + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] pi = np.empty(hn + 1, dtype=np.int64)
    cdef Py_ssize_t i, j
    cdef cnp.int64_t c, s, d, n, up, left, ri
    cdef bint hit
    for j in range(hn + 1):
        cost[j] = j
        ins[j] = j
    for i in range(1, rn + 1):
        pc[:] = cost
        ps[:] = subs
        pd[:] = dels
        pi[:] = ins
        cost[0] = i
        subs[0] = 0
        dels[0] = i
        ins[0] = 0
        ri = ref[i - 1]
        for j in range(1, hn + 1):
            hit = ri == hyp[j - 1]
            c = pc[j - 1] + (0 if hit else 1)
            s = ps[j - 1] + (0 if hit else 1)
            d = pd[j - 1]
            n = pi[j - 1]
            up = pc[j] + 1
            if up < c:
                c = up
                s = ps[j]
                d = pd[j] + 1
                n = pi[j]
            left = cost[j - 1] + 1
            if left < c:
                c = left
                s = subs[j - 1]
                d = dels[j - 1]
                n = ins[j - 1] + 1
            cost[j] = c
            subs[j] = s
            dels[j] = d
            ins[j] = n
    return int(subs[hn]), int(dels[hn]), int(ins[hn])
