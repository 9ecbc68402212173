"""The edit transducer: weighted insertions, deletions, substitutions.

The default costs are degenerate on purpose: every edit is free and a
match *pays* −1, so the minimum-cost alignment of a reference string
against a hypothesis machine is the one with the greatest number of
matched words, and its cost is minus that count.  Standard unit costs
(1/1/1/0) turn the same machinery into a Levenshtein aligner.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    AcceptorRequiredError,
    ConfigError,
    LatkitError,
    SemiringMismatchError,
    SymbolTableMismatchError,
    VocabularyError,
)
from .fst import EPS, Arc, Fst, empty_fst, topological_order
from .kernels import backend as _K


@dataclass(frozen=True)
class EditCosts:
    """Costs must leave matching strictly cheapest, or alignments lose
    their maximum-agreement reading."""

    insertion: float = 0.0
    deletion: float = 0.0
    substitution: float = 0.0
    match: float = -1.0

    def __post_init__(self):
        cheapest_edit = min(self.insertion, self.deletion, self.substitution)
        if not self.match < cheapest_edit:
            raise ConfigError(
                f"match cost {self.match} must be strictly below the other "
                f"edit costs (min {cheapest_edit})"
            )


def build_edit_fst(vocab, costs=EditCosts(), unmatchable=(), semiring=None):
    """Single-state edit transducer over every non-epsilon symbol of
    vocab: |V| insertion arcs (ε:w), |V| deletion arcs (w:ε) and |V|²
    pair arcs (wᵢ:wⱼ), the diagonal at the match cost — (|V|+1)²−1 arcs
    in all.  Symbols named in unmatchable take the substitution cost
    even on the diagonal."""
    from .semiring import TROPICAL

    ids = sorted(idx for _, idx in vocab if idx != EPS)
    if not ids:
        raise VocabularyError("edit transducer needs a nonempty vocabulary")
    no_match = {vocab.id(sym) for sym in unmatchable}
    arcs = []
    for w in ids:
        arcs.append(Arc(EPS, w, costs.insertion, 0))
        arcs.append(Arc(w, EPS, costs.deletion, 0))
        for x in ids:
            if w == x and w not in no_match:
                arcs.append(Arc(w, x, costs.match, 0))
            else:
                arcs.append(Arc(w, x, costs.substitution, 0))
    return Fst(0, [arcs], {0: 0.0}, vocab, semiring or TROPICAL)


def linear_labels(fst):
    """Word-id/weight sequences of a linear acceptor, plus its final
    weight; raises if the machine branches or loops."""
    if fst.is_empty():
        raise LatkitError("linear acceptor expected, got the empty machine")
    labels = []
    weights = []
    q = fst.start
    seen = {q}
    while True:
        arcs = fst.arcs(q)
        if not arcs:
            break
        if len(arcs) > 1 or fst.is_final(q):
            raise LatkitError("linear acceptor expected (state branches)")
        arc = arcs[0]
        if arc.ilabel != arc.olabel or arc.ilabel == EPS:
            raise LatkitError("linear acceptor expected (epsilon or transducer arc)")
        if arc.nextstate in seen:
            raise LatkitError("linear acceptor expected (cycle)")
        seen.add(arc.nextstate)
        labels.append(arc.ilabel)
        weights.append(arc.weight)
        q = arc.nextstate
    if not fst.is_final(q):
        raise LatkitError("linear acceptor expected (no final state)")
    return labels, weights, fst.final(q)


def lazy_edit_compose(r, h, costs=EditCosts(), unmatchable=()):
    """reference ∘ edit ∘ hypothesis without materializing the edit
    transducer: edit arcs are generated on demand over (reference
    position, hypothesis state) pairs.  Same weighted language as the
    explicit two-step composition.

    The result's input tape carries reference words (ε on insertions)
    and its output tape hypothesis words (ε on deletions).  Dead states
    are left in place; prune or trim downstream."""
    if r.semiring is not h.semiring:
        raise SemiringMismatchError("operands must share a semiring")
    if r.symbols != h.symbols:
        raise SymbolTableMismatchError("operands must share a symbol table")
    if not h.is_acceptor():
        raise AcceptorRequiredError("lazy_edit_compose requires an acceptor hypothesis")
    topological_order(h)  # raises CyclicFstError
    r_labels, r_weights, r_final = linear_labels(r)
    if h.is_empty():
        return empty_fst(h.symbols, h.semiring)

    offsets, il, _, w, ns, finals = h.csr()
    max_label = int(il.max()) if len(il) else 0
    nomatch = np.zeros(max_label + 1, dtype=np.int64)
    for sym in unmatchable:
        idx = h.symbols.id(sym)
        if idx <= max_label:
            nomatch[idx] = 1
    (n_states, a_src, a_il, a_ol, a_w, a_ns, f_states, f_weights) = _K.edit_compose(
        np.asarray(r_labels, dtype=np.int64),
        np.asarray(r_weights, dtype=np.float64),
        h.num_states,
        offsets,
        il,
        w,
        ns,
        finals,
        h.start,
        costs.insertion,
        costs.deletion,
        costs.substitution,
        costs.match,
        nomatch,
    )
    per_state = [[] for _ in range(n_states)]
    for k in range(len(a_src)):
        per_state[a_src[k]].append(
            Arc(int(a_il[k]), int(a_ol[k]), float(a_w[k]), int(a_ns[k]))
        )
    out_finals = {
        int(f_states[k]): h.semiring.times(r_final, float(f_weights[k]))
        for k in range(len(f_states))
    }
    return Fst(0, per_state, out_finals, h.symbols, h.semiring)
