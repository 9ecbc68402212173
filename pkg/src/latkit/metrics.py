"""Transcript and lattice quality measures.

Word error rate (WER) here is always (S + D + I) / reference length
from a minimum unit-cost alignment.  Lattice-level measures treat arc
costs as -ln posteriors: expected WER weights each path by
exp(-cost) / Σ exp(-cost), the softmax of path costs, which degrades
to the uniform mean when the lattice is unweighted.
"""

import math
import random
from dataclasses import dataclass

import numpy as np

from .edit import EditCosts, lazy_edit_compose
from .errors import ArchiveError, EmptyLanguageError
from .fst import (
    EPS,
    count_paths,
    enumerate_paths,
    linear_fst,
    scale_weights_to_one,
    shortest_path,
    topological_order,
    trim,
)
from .kernels import backend as _K
from .symbols import UNKNOWN


@dataclass(frozen=True)
class ErrorBreakdown:
    substitutions: int
    deletions: int
    insertions: int
    reference_length: int

    @property
    def errors(self):
        return self.substitutions + self.deletions + self.insertions

    @property
    def wer(self):
        """(S+D+I)/N; empty reference scores 0 when error-free, else inf."""
        if self.reference_length == 0:
            return 0.0 if self.errors == 0 else math.inf
        return self.errors / self.reference_length


@dataclass(frozen=True)
class LatticeStats:
    depth: float
    path_count: int
    states: int
    arcs: int


def edit_distance(ref, hyp):
    """Minimum unit-cost alignment of two word sequences; ties prefer
    match, then substitution, then deletion, then insertion."""
    ids = {}
    for w in list(ref) + list(hyp):
        ids.setdefault(w, len(ids))
    r = np.asarray([ids[w] for w in ref], dtype=np.int64)
    h = np.asarray([ids[w] for w in hyp], dtype=np.int64)
    s, d, i = _K.levenshtein(r, h)
    return ErrorBreakdown(s, d, i, len(ref))


def mer_filter(transcripts, decodes, threshold):
    """Partition utterances by matching error rate.

    transcripts/decodes: [(utt_id, words)] with identical id sets; the
    transcript is the reference.  threshold is a percentage; an
    utterance is kept when 100·WER ≤ threshold.  Returns (kept ids,
    dropped ids, [(utt_id, ErrorBreakdown)]), all in transcript order."""
    t_ids = [u for u, _ in transcripts]
    d_map = dict(decodes)
    missing = [u for u in t_ids if u not in d_map]
    extra = sorted(set(d_map) - set(t_ids))
    if missing or extra:
        raise ArchiveError(
            f"utterance ids differ: missing decodes {missing[:10]}, "
            f"unmatched decodes {extra[:10]}"
        )
    kept, dropped, report = [], [], []
    for utt_id, words in transcripts:
        breakdown = edit_distance(words, d_map[utt_id])
        report.append((utt_id, breakdown))
        if 100.0 * breakdown.wer <= threshold:
            kept.append(utt_id)
        else:
            dropped.append(utt_id)
    return kept, dropped, report


def _path_posteriors(costs):
    """Softmax of -costs: exp(-w) normalized, computed stably."""
    best = min(costs)
    raw = [math.exp(best - w) for w in costs]
    total = sum(raw)
    return [p / total for p in raw]


def expected_wer(lattice, ref, cap=100000):
    """Posterior-weighted mean WER over all lattice paths against ref.
    Enumerates paths, so the lattice must have at most cap of them;
    beyond that the error suggests pruning (or sampling, see
    expected_wer_sampled)."""
    ref = list(ref)
    paths = enumerate_paths(lattice, cap)
    if not paths:
        raise EmptyLanguageError("lattice accepts no path")
    posteriors = _path_posteriors([p.weight for p in paths])
    sym = lattice.symbols.sym
    total = 0.0
    for path, post in zip(paths, posteriors):
        hyp = [sym(i) for i in path.output_string()]
        total += post * edit_distance(ref, hyp).wer
    return total


def expected_wer_sampled(lattice, ref, samples=2000, seed=0):
    """Monte-Carlo estimate of expected_wer for lattices too large to
    enumerate: paths are drawn from the exact posterior (via log-domain
    suffix costs), so the estimate is unbiased and seed-reproducible."""
    lattice = trim(lattice)
    if lattice.is_empty():
        raise EmptyLanguageError("lattice accepts no path")
    ref = list(ref)
    topo = topological_order(lattice)
    offsets, _, _, w, ns, finals = lattice.csr()
    beta = _K.backward_costs(
        lattice.num_states, offsets, w, ns, finals,
        np.asarray(topo, dtype=np.int64), True,
    )
    rng = random.Random(seed)
    sym = lattice.symbols.sym
    ids = {}
    for word in ref:
        ids.setdefault(word, len(ids))
    ref_ids = np.asarray([ids[word] for word in ref], dtype=np.int64)
    rn = len(ref)
    total = 0.0
    for _ in range(samples):
        q = lattice.start
        labels = []
        while True:
            fw = lattice.final(q)
            r = rng.random()
            acc = math.exp(beta[q] - fw) if fw != math.inf else 0.0
            if r < acc:
                break
            chosen = None
            for arc in lattice.arcs(q):
                acc += math.exp(beta[q] - arc.weight - beta[arc.nextstate])
                if r < acc:
                    chosen = arc
                    break
            if chosen is None:
                arcs_q = lattice.arcs(q)
                if not arcs_q:  # float slack at a final sink
                    break
                chosen = arcs_q[-1]
            if chosen.olabel != EPS:
                labels.append(chosen.olabel)
            q = chosen.nextstate
        hyp_ids = np.asarray(
            [ids.setdefault(sym(x), len(ids)) for x in labels], dtype=np.int64
        )
        s, d, i = _K.levenshtein(ref_ids, hyp_ids)
        total += (s + d + i) / rn if rn else (0.0 if not labels else math.inf)
    return total / samples


def oracle_wer(lattice, ref):
    """Best achievable WER by any single lattice path: align ref against
    the unweighted lattice with unit edit costs and read the breakdown
    off the cheapest alignment.  No enumeration, so width is free."""
    lattice = trim(lattice)
    if lattice.is_empty():
        raise EmptyLanguageError("lattice accepts no path")
    symbols = lattice.symbols
    ids = [symbols.id_or_unknown(w) for w in ref]
    r = linear_fst(ids, symbols, lattice.semiring)
    h = scale_weights_to_one(lattice)
    unmatchable = (UNKNOWN,) if UNKNOWN in symbols else ()
    aligned = lazy_edit_compose(r, h, EditCosts(1.0, 1.0, 1.0, 0.0), unmatchable)
    path = shortest_path(aligned)
    unk = symbols.unknown_id
    s = d = i = 0
    for il, ol in zip(path.ilabels, path.olabels):
        if il == EPS and ol == EPS:
            continue
        if il == EPS:
            i += 1
        elif ol == EPS:
            d += 1
        elif il != ol or il == unk:
            s += 1
    return ErrorBreakdown(s, d, i, len(ids))


def lattice_depth(lattice):
    """Structural depth: total non-epsilon arcs divided by the arc
    count (epsilons included) of the longest accepting path.  1 for a
    linear lattice; can dip below 1 when epsilon arcs pad paths."""
    lattice = trim(lattice)
    if lattice.is_empty():
        raise EmptyLanguageError("lattice accepts no path")
    topo = topological_order(lattice)
    non_eps = sum(
        1 for q in lattice.states() for a in lattice.arcs(q) if a.olabel != EPS
    )
    longest = [-1] * lattice.num_states
    for q in reversed(topo):
        best = 0 if lattice.is_final(q) else -1
        for a in lattice.arcs(q):
            if longest[a.nextstate] >= 0:
                best = max(best, 1 + longest[a.nextstate])
        longest[q] = best
    length = longest[lattice.start]
    depth = non_eps / length if length > 0 else 1.0
    return LatticeStats(
        depth=depth,
        path_count=count_paths(lattice),
        states=lattice.num_states,
        arcs=lattice.num_arcs,
    )
