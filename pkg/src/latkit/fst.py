"""Weighted finite-state transducers and the standard lattice algorithms.

An Fst is immutable after construction: every operation here is a pure
function returning a new machine.  States are dense integers; arcs are
stored per state, sorted by (ilabel, olabel, nextstate, weight) so that
serialization and all derived orderings are deterministic.  Label 0 is
epsilon on either tape.

Lattice-flavored machines are acyclic; operations that require
acyclicity verify it via topological sort and raise CyclicFstError.
"""

import math
from collections import deque
from typing import NamedTuple

import numpy as np

from .errors import (
    AcceptorRequiredError,
    CyclicFstError,
    EmptyLanguageError,
    EpsilonCycleError,
    LatkitError,
    NotDeterministicError,
    PathCountExceededError,
    SemiringMismatchError,
    SymbolTableMismatchError,
    VocabularyError,
)
from .kernels import backend as _K
from .semiring import LOG, TROPICAL, Semiring
from .symbols import SymbolTable

EPS = 0
INF = math.inf


class Arc(NamedTuple):
    ilabel: int
    olabel: int
    weight: float
    nextstate: int


class Path(NamedTuple):
    """One accepting walk: raw per-arc labels (epsilons included) and the
    total weight (arc weights ⊗ final weight)."""

    ilabels: tuple
    olabels: tuple
    weight: float

    def input_string(self):
        """Input labels with epsilons stripped."""
        return tuple(x for x in self.ilabels if x != EPS)

    def output_string(self):
        return tuple(x for x in self.olabels if x != EPS)


def _arc_sort_key(arc):
    return (arc.ilabel, arc.olabel, arc.nextstate, arc.weight)


class Fst:
    """Immutable weighted transducer over an attached symbol table."""

    __slots__ = ("start", "symbols", "semiring", "_arcs", "_finals", "_csr_cache")

    def __init__(self, start, arcs, finals, symbols, semiring=TROPICAL):
        """arcs: per-state iterables of Arc; finals: {state: weight}.
        start may be None only for the empty machine."""
        if not isinstance(symbols, SymbolTable):
            raise VocabularyError("an Fst requires an attached SymbolTable")
        if not isinstance(semiring, Semiring):
            raise LatkitError(f"not a semiring: {semiring!r}")
        n = len(arcs)
        if start is None:
            if n:
                raise LatkitError("start state required for a nonempty machine")
        elif not 0 <= start < n:
            raise LatkitError(f"start state {start} out of range (0..{n - 1})")
        frozen = []
        for state_arcs in arcs:
            out = sorted((Arc(*a) for a in state_arcs), key=_arc_sort_key)
            for arc in out:
                if not 0 <= arc.nextstate < n:
                    raise LatkitError(f"arc target {arc.nextstate} out of range")
                if arc.ilabel and not symbols.has_id(arc.ilabel):
                    raise VocabularyError(f"ilabel {arc.ilabel} not in symbol table")
                if arc.olabel and not symbols.has_id(arc.olabel):
                    raise VocabularyError(f"olabel {arc.olabel} not in symbol table")
            frozen.append(tuple(out))
        for state in finals:
            if not 0 <= state < n:
                raise LatkitError(f"final state {state} out of range")
        self.start = start
        self.symbols = symbols
        self.semiring = semiring
        self._arcs = tuple(frozen)
        self._finals = dict(sorted(finals.items()))
        self._csr_cache = None

    # -- construction helpers ------------------------------------------------

    @classmethod
    def build(cls, num_states, start, arcs, finals, symbols, semiring=TROPICAL):
        """Build from flat (src, ilabel, olabel, weight, nextstate) tuples."""
        per_state = [[] for _ in range(num_states)]
        for src, il, ol, w, ns in arcs:
            per_state[src].append(Arc(il, ol, float(w), ns))
        return cls(start, per_state, finals, symbols, semiring)

    def replaced(self, arcs=None, finals=None, symbols=None, start=None):
        """Copy with some components swapped (topology helpers)."""
        return Fst(
            self.start if start is None else start,
            self._arcs if arcs is None else arcs,
            self._finals if finals is None else finals,
            self.symbols if symbols is None else symbols,
            self.semiring,
        )

    # -- read access ---------------------------------------------------------

    @property
    def num_states(self):
        return len(self._arcs)

    @property
    def num_arcs(self):
        return sum(len(a) for a in self._arcs)

    def states(self):
        return range(len(self._arcs))

    def arcs(self, state):
        return self._arcs[state]

    def final(self, state):
        return self._finals.get(state, self.semiring.zero)

    def is_final(self, state):
        return state in self._finals

    def final_states(self):
        return self._finals.items()

    def is_empty(self):
        return self.start is None

    def is_acceptor(self):
        return all(a.ilabel == a.olabel for arcs in self._arcs for a in arcs)

    def has_epsilon_arcs(self):
        return any(
            a.ilabel == EPS and a.olabel == EPS for arcs in self._arcs for a in arcs
        )

    def output_labels(self):
        """Set of non-epsilon output labels."""
        return {a.olabel for arcs in self._arcs for a in arcs if a.olabel != EPS}

    def input_labels(self):
        return {a.ilabel for arcs in self._arcs for a in arcs if a.ilabel != EPS}

    def __eq__(self, other):
        if not isinstance(other, Fst):
            return NotImplemented
        return (
            self.start == other.start
            and self._arcs == other._arcs
            and self._finals == other._finals
            and self.semiring is other.semiring
            and self.symbols == other.symbols
        )

    def __hash__(self):
        return hash((self.start, self._arcs, tuple(self._finals.items())))

    def __repr__(self):
        kind = "acceptor" if self.is_acceptor() else "transducer"
        return (
            f"Fst({self.num_states} states, {self.num_arcs} arcs, "
            f"{self.semiring.name} {kind})"
        )

    def __getstate__(self):
        return (self.start, self._arcs, self._finals, self.symbols, self.semiring)

    def __setstate__(self, state):
        self.start, self._arcs, self._finals, self.symbols, self.semiring = state
        self._csr_cache = None

    # -- flat arrays for the kernels ------------------------------------------

    def csr(self):
        """(offsets, ilabels, olabels, weights, nexts, finals) as numpy arrays;
        arcs concatenated in state order.  Cached (machines are immutable)."""
        if self._csr_cache is None:
            n = self.num_states
            counts = [len(a) for a in self._arcs]
            offsets = np.zeros(n + 1, dtype=np.int64)
            np.cumsum(counts, out=offsets[1:])
            total = int(offsets[-1])
            il = np.empty(total, dtype=np.int64)
            ol = np.empty(total, dtype=np.int64)
            w = np.empty(total, dtype=np.float64)
            ns = np.empty(total, dtype=np.int64)
            pos = 0
            for arcs in self._arcs:
                for a in arcs:
                    il[pos] = a.ilabel
                    ol[pos] = a.olabel
                    w[pos] = a.weight
                    ns[pos] = a.nextstate
                    pos += 1
            finals = np.full(n, INF, dtype=np.float64)
            for q, fw in self._finals.items():
                finals[q] = fw
            self._csr_cache = (offsets, il, ol, w, ns, finals)
        return self._csr_cache


def empty_fst(symbols, semiring=TROPICAL):
    return Fst(None, [], {}, symbols, semiring)


# -- structural queries -------------------------------------------------------


def topological_order(fst):
    """State order with every arc pointing forward; CyclicFstError otherwise."""
    if fst.is_empty():
        return []
    offsets, _, _, _, ns, _ = fst.csr()
    order = _K.topo_order(fst.num_states, offsets, ns)
    if order is None:
        raise CyclicFstError("machine contains a cycle")
    return [int(q) for q in order]


def is_acyclic(fst):
    try:
        topological_order(fst)
    except CyclicFstError:
        return False
    return True


def forward_costs(fst, topo=None):
    """⊕-distance from the start to every state, as a numpy array."""
    if fst.is_empty():
        return np.zeros(0)
    if topo is None:
        topo = topological_order(fst)
    offsets, _, _, w, ns, _ = fst.csr()
    return _K.forward_costs(
        fst.num_states,
        offsets,
        w,
        ns,
        np.asarray(topo, dtype=np.int64),
        fst.start,
        fst.semiring is LOG,
    )


def backward_costs(fst, topo=None):
    """⊕-distance from every state to acceptance (final weights included)."""
    if fst.is_empty():
        return np.zeros(0)
    if topo is None:
        topo = topological_order(fst)
    offsets, _, _, w, ns, finals = fst.csr()
    return _K.backward_costs(
        fst.num_states,
        offsets,
        w,
        ns,
        finals,
        np.asarray(topo, dtype=np.int64),
        fst.semiring is LOG,
    )


def trim(fst):
    """Restrict to states that are both accessible and coaccessible.
    Renumbering preserves the relative order of surviving states."""
    if fst.is_empty():
        return fst
    n = fst.num_states
    accessible = [False] * n
    stack = [fst.start]
    accessible[fst.start] = True
    while stack:
        q = stack.pop()
        for arc in fst.arcs(q):
            if not accessible[arc.nextstate]:
                accessible[arc.nextstate] = True
                stack.append(arc.nextstate)
    rev = [[] for _ in range(n)]
    for q in fst.states():
        for arc in fst.arcs(q):
            rev[arc.nextstate].append(q)
    coaccessible = [False] * n
    stack = [q for q, _ in fst.final_states()]
    for q in stack:
        coaccessible[q] = True
    while stack:
        q = stack.pop()
        for p in rev[q]:
            if not coaccessible[p]:
                coaccessible[p] = True
                stack.append(p)
    keep = [q for q in fst.states() if accessible[q] and coaccessible[q]]
    if len(keep) == n:
        return fst
    if not keep or not coaccessible[fst.start]:
        return empty_fst(fst.symbols, fst.semiring)
    remap = {q: i for i, q in enumerate(keep)}
    arcs = [
        [
            Arc(a.ilabel, a.olabel, a.weight, remap[a.nextstate])
            for a in fst.arcs(q)
            if a.nextstate in remap
        ]
        for q in keep
    ]
    finals = {remap[q]: w for q, w in fst.final_states() if q in remap}
    return Fst(remap[fst.start], arcs, finals, fst.symbols, fst.semiring)


# -- builders ------------------------------------------------------------------


def linear_fst(word_ids, symbols, semiring=TROPICAL):
    """Linear acceptor for a word-id sequence; one arc per word, every
    weight 1̄.  Epsilon and unknown ids are rejected."""
    word_ids = list(word_ids)
    for wid in word_ids:
        if wid == EPS:
            raise VocabularyError("epsilon is not a word")
        if not symbols.has_id(wid):
            raise VocabularyError(f"word id {wid} not in symbol table")
    one = semiring.one
    arcs = [[Arc(wid, wid, one, i + 1)] for i, wid in enumerate(word_ids)]
    arcs.append([])
    return Fst(0, arcs, {len(word_ids): one}, symbols, semiring)


def scale_weights_to_one(fst):
    """Same topology with every arc and final weight set to 1̄ (cost 0)."""
    one = fst.semiring.one
    arcs = [
        [Arc(a.ilabel, a.olabel, one, a.nextstate) for a in fst.arcs(q)]
        for q in fst.states()
    ]
    finals = {q: one for q, _ in fst.final_states()}
    return fst.replaced(arcs=arcs, finals=finals)


def project_output(fst):
    """Copy output labels onto both tapes, yielding an acceptor."""
    arcs = [
        [Arc(a.olabel, a.olabel, a.weight, a.nextstate) for a in fst.arcs(q)]
        for q in fst.states()
    ]
    return fst.replaced(arcs=arcs)


# -- composition ----------------------------------------------------------------


def compose(a, b):
    """Weighted composition a ∘ b with a two-state epsilon-sequencing
    filter: between matched symbols, a-side epsilon moves are taken
    before b-side ones, so no epsilon interleaving is counted twice.
    The result is trimmed."""
    if a.semiring is not b.semiring:
        raise SemiringMismatchError(f"{a.semiring.name} vs {b.semiring.name}")
    if a.symbols != b.symbols:
        raise SymbolTableMismatchError("composition operands must share a symbol table")
    if a.is_empty() or b.is_empty():
        return empty_fst(a.symbols, a.semiring)
    sr = a.semiring
    b_by_il = []
    for q in b.states():
        index = {}
        for arc in b.arcs(q):
            index.setdefault(arc.ilabel, []).append(arc)
        b_by_il.append(index)

    state_ids = {}
    arcs = []
    finals = {}
    queue = deque()

    def state_of(key):
        sid = state_ids.get(key)
        if sid is None:
            sid = len(state_ids)
            state_ids[key] = sid
            arcs.append([])
            queue.append(key)
        return sid

    state_of((a.start, b.start, 0))
    while queue:
        key = queue.popleft()
        qa, qb, f = key
        sid = state_ids[key]
        out = arcs[sid]
        for arc_a in a.arcs(qa):
            if arc_a.olabel == EPS:
                if f == 0:
                    out.append(
                        Arc(arc_a.ilabel, EPS, arc_a.weight,
                            state_of((arc_a.nextstate, qb, 0)))
                    )
            else:
                for arc_b in b_by_il[qb].get(arc_a.olabel, ()):
                    out.append(
                        Arc(arc_a.ilabel, arc_b.olabel,
                            sr.times(arc_a.weight, arc_b.weight),
                            state_of((arc_a.nextstate, arc_b.nextstate, 0)))
                    )
        for arc_b in b_by_il[qb].get(EPS, ()):
            out.append(
                Arc(EPS, arc_b.olabel, arc_b.weight,
                    state_of((qa, arc_b.nextstate, 1)))
            )
        if a.is_final(qa) and b.is_final(qb):
            finals[sid] = sr.times(a.final(qa), b.final(qb))

    out = Fst(0, arcs, finals, a.symbols, sr)
    return trim(out)


# -- epsilon removal -------------------------------------------------------------


def remove_epsilons(fst):
    """Eliminate arcs that are epsilon on both tapes, preserving the
    weighted language exactly.  Rejects epsilon cycles."""
    if fst.is_empty():
        return fst
    sr = fst.semiring
    n = fst.num_states

    eps_arcs = [
        [a for a in fst.arcs(q) if a.ilabel == EPS and a.olabel == EPS]
        for q in fst.states()
    ]
    if not any(eps_arcs):
        return fst

    # Topological order of the epsilon subgraph.
    indeg = [0] * n
    for q in fst.states():
        for a in eps_arcs[q]:
            indeg[a.nextstate] += 1
    ready = deque(q for q in fst.states() if indeg[q] == 0)
    order = []
    while ready:
        q = ready.popleft()
        order.append(q)
        for a in eps_arcs[q]:
            indeg[a.nextstate] -= 1
            if indeg[a.nextstate] == 0:
                ready.append(a.nextstate)
    if len(order) != n:
        raise EpsilonCycleError("epsilon cycle; cannot remove epsilons")

    # closure[q]: state -> ⊕-combined epsilon distance from q, built bottom-up.
    closure = [None] * n
    for q in reversed(order):
        dist = {q: sr.one}
        for a in eps_arcs[q]:
            for p, d in closure[a.nextstate].items():
                w = sr.times(a.weight, d)
                prev = dist.get(p)
                dist[p] = w if prev is None else sr.plus(prev, w)
        closure[q] = dist

    arcs = [[] for _ in range(n)]
    finals = {}
    for q in fst.states():
        fw = sr.zero
        for p in sorted(closure[q]):
            d = closure[q][p]
            for a in fst.arcs(p):
                if a.ilabel == EPS and a.olabel == EPS:
                    continue
                arcs[q].append(
                    Arc(a.ilabel, a.olabel, sr.times(d, a.weight), a.nextstate)
                )
            fw = sr.plus(fw, sr.times(d, fst.final(p)))
        if fw != sr.zero:
            finals[q] = fw
    return trim(fst.replaced(arcs=arcs, finals=finals))


# -- determinization and minimization ----------------------------------------------


def _require_acceptor(fst, op):
    if not fst.is_acceptor():
        raise AcceptorRequiredError(f"{op} requires an acceptor")


def determinize(fst):
    """Weighted subset construction for epsilon-free acyclic acceptors.
    Residual weights keep the weighted language exact."""
    _require_acceptor(fst, "determinize")
    topological_order(fst)  # acyclicity guarantees termination
    if fst.has_epsilon_arcs():
        raise LatkitError("determinize requires an epsilon-free machine")
    fst = trim(fst)
    if fst.is_empty():
        return fst
    sr = fst.semiring

    start_subset = ((fst.start, sr.one),)
    subset_ids = {start_subset: 0}
    queue = deque([start_subset])
    arcs = [[]]
    finals = {}
    while queue:
        subset = queue.popleft()
        sid = subset_ids[subset]
        fw = sr.zero
        by_label = {}
        for q, v in subset:
            if fst.is_final(q):
                fw = sr.plus(fw, sr.times(v, fst.final(q)))
            for arc in fst.arcs(q):
                if arc.weight == sr.zero:
                    continue
                by_label.setdefault(arc.ilabel, []).append(
                    (sr.times(v, arc.weight), arc.nextstate)
                )
        if fw != sr.zero:
            finals[sid] = fw
        for label in sorted(by_label):
            entries = by_label[label]
            total = sr.zero
            for w, _ in entries:
                total = sr.plus(total, w)
            per_ns = {}
            for w, ns in entries:
                prev = per_ns.get(ns)
                per_ns[ns] = w if prev is None else sr.plus(prev, w)
            # residual = weight "divided" by total (⊗ is +, so subtract)
            new_subset = tuple((ns, per_ns[ns] - total) for ns in sorted(per_ns))
            nid = subset_ids.get(new_subset)
            if nid is None:
                nid = len(subset_ids)
                subset_ids[new_subset] = nid
                arcs.append([])
                queue.append(new_subset)
            arcs[sid].append(Arc(label, label, total, nid))
    return Fst(0, arcs, finals, fst.symbols, sr)


def is_deterministic(fst):
    """No state has two outgoing arcs with the same input label, and no
    epsilon arcs."""
    for q in fst.states():
        seen = set()
        for arc in fst.arcs(q):
            if arc.ilabel == EPS or arc.ilabel in seen:
                return False
            seen.add(arc.ilabel)
    return True


def minimize(fst):
    """Merge language-equivalent states of a deterministic acceptor.

    Weighted machines are weight-pushed first (suffix ⊕-distances) so
    equivalent states expose identical arc weights; the pushed-out start
    weight is folded back into the start state's outgoing arcs, splitting
    the start off its class if that class has inbound arcs."""
    _require_acceptor(fst, "minimize")
    if not is_deterministic(fst):
        raise NotDeterministicError("minimize requires a deterministic acceptor")
    fst = trim(fst)
    if fst.is_empty():
        return fst
    sr = fst.semiring
    n = fst.num_states
    one = sr.one

    weighted = any(a.weight != one for q in fst.states() for a in fst.arcs(q)) or any(
        w != one for _, w in fst.final_states()
    )
    if weighted:
        beta = backward_costs(fst)  # raises CyclicFstError on cyclic input
        push_arcs = [
            [
                Arc(a.ilabel, a.olabel, (a.weight + beta[a.nextstate]) - beta[q], a.nextstate)
                for a in fst.arcs(q)
            ]
            for q in fst.states()
        ]
        push_finals = {q: w - beta[q] for q, w in fst.final_states()}
        lam = float(beta[fst.start])
        fst = fst.replaced(arcs=push_arcs, finals=push_finals)
    else:
        lam = one

    # Moore partition refinement on (final weight, arc signatures).
    def initial_sig(q):
        return fst.final(q) if fst.is_final(q) else None

    cls = _partition_by(fst.states(), initial_sig)
    while True:
        def sig(q):
            return (cls[q],) + tuple(
                (a.ilabel, a.weight, cls[a.nextstate]) for a in fst.arcs(q)
            )
        new_cls = _partition_by(fst.states(), sig)
        if new_cls == cls:
            break
        cls = new_cls

    # Quotient machine, BFS-numbered from the start class.
    rep = {}
    for q in fst.states():
        rep.setdefault(cls[q], q)
    start_class = cls[fst.start]
    split_start = lam != one and any(
        cls[a.nextstate] == start_class for q in fst.states() for a in fst.arcs(q)
    )
    ids = {}
    arcs = []
    finals = {}
    queue = deque()

    def class_state(c):
        sid = ids.get(c)
        if sid is None:
            sid = len(ids) + (1 if split_start else 0)
            ids[c] = sid
            queue.append(c)
            while len(arcs) <= sid:
                arcs.append([])
        return sid

    if split_start:
        arcs.append([])  # state 0 reserved for the split start
    start_id = 0 if split_start else class_state(start_class)
    class_state(start_class)
    while queue:
        c = queue.popleft()
        sid = ids[c]
        q = rep[c]
        for a in fst.arcs(q):
            arcs[sid].append(Arc(a.ilabel, a.olabel, a.weight, class_state(cls[a.nextstate])))
        if fst.is_final(q):
            finals[sid] = fst.final(q)

    if lam != one:
        src = ids[start_class]
        folded = [Arc(a.ilabel, a.olabel, sr.times(lam, a.weight), a.nextstate)
                  for a in arcs[src]]
        if split_start:
            arcs[0] = folded
            if src in finals:
                finals[0] = sr.times(lam, finals[src])
        else:
            arcs[src] = folded
            if src in finals:
                finals[src] = sr.times(lam, finals[src])
    return Fst(start_id, arcs, finals, fst.symbols, sr)


def _partition_by(states, key):
    """Map each state to a dense class id, classes numbered by first
    occurrence in state order."""
    ids = {}
    out = {}
    for q in states:
        k = key(q)
        if k not in ids:
            ids[k] = len(ids)
        out[q] = ids[k]
    return out


# -- path algebra -----------------------------------------------------------------


def shortest_path_weight(fst):
    """⊕ over all accepting paths of the path weight; 0̄ for the empty
    language.  Tropical: the minimum path cost."""
    if fst.is_empty():
        return fst.semiring.zero
    beta = backward_costs(fst)
    return float(beta[fst.start])


def shortest_path(fst):
    """One minimum-cost accepting Path (tropical only), with
    deterministic tie-breaking (first-found in state/arc order)."""
    if fst.semiring is not TROPICAL:
        raise SemiringMismatchError("shortest_path requires the tropical semiring")
    if fst.is_empty():
        raise EmptyLanguageError("no accepting path")
    topo = topological_order(fst)
    dist = [INF] * fst.num_states
    parent = {}
    dist[fst.start] = 0.0
    for q in topo:
        dq = dist[q]
        if dq == INF:
            continue
        for arc in fst.arcs(q):
            cand = dq + arc.weight
            if cand < dist[arc.nextstate]:
                dist[arc.nextstate] = cand
                parent[arc.nextstate] = (q, arc)
    best_state, best = None, INF
    for q, fw in fst.final_states():
        total = dist[q] + fw
        if total < best:
            best, best_state = total, q
    if best_state is None:
        raise EmptyLanguageError("no accepting path")
    path = []
    q = best_state
    while q != fst.start:
        p, arc = parent[q]
        path.append(arc)
        q = p
    path.reverse()
    return Path(
        tuple(a.ilabel for a in path),
        tuple(a.olabel for a in path),
        best,
    )


def count_paths(fst):
    """Number of accepting paths (exact integer)."""
    if fst.is_empty():
        return 0
    topo = topological_order(fst)
    counts = [0] * fst.num_states
    for q in reversed(topo):
        c = 1 if fst.is_final(q) else 0
        for arc in fst.arcs(q):
            c += counts[arc.nextstate]
        counts[q] = c
    return counts[fst.start]


def enumerate_paths(fst, cap=100000):
    """All accepting paths in depth-first arc order.  Raises
    PathCountExceededError (naming the count) when the machine has more
    than cap paths."""
    if fst.is_empty():
        return []
    total = count_paths(fst)
    if total > cap:
        raise PathCountExceededError(total, cap)
    paths = []
    stack = [(fst.start, (), (), fst.semiring.one)]
    sr = fst.semiring
    while stack:
        q, il, ol, w = stack.pop()
        if fst.is_final(q):
            paths.append(Path(il, ol, sr.times(w, fst.final(q))))
        for arc in reversed(fst.arcs(q)):
            stack.append(
                (arc.nextstate, il + (arc.ilabel,), ol + (arc.olabel,),
                 sr.times(w, arc.weight))
            )
    return paths


def prune_to_threshold(fst, t):
    """Keep exactly the states and arcs lying on an accepting path of
    weight ≤ t ⊗ (best path weight); inclusive at the boundary.
    Tropical only; empty-language input yields the empty machine."""
    if fst.semiring is not TROPICAL:
        raise SemiringMismatchError("prune_to_threshold requires the tropical semiring")
    if fst.is_empty():
        return fst
    topo = topological_order(fst)
    alpha = forward_costs(fst, topo)
    beta = backward_costs(fst, topo)
    best = beta[fst.start]
    if best == INF:
        return empty_fst(fst.symbols, fst.semiring)
    threshold = t + best
    arcs = [
        [
            a
            for a in fst.arcs(q)
            if (alpha[q] + a.weight) + beta[a.nextstate] <= threshold
        ]
        for q in fst.states()
    ]
    finals = {
        q: w for q, w in fst.final_states() if alpha[q] + w <= threshold
    }
    return trim(fst.replaced(arcs=arcs, finals=finals))
