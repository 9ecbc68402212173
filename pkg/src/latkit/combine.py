"""Combining an approximate transcript with a hypothesis lattice.

The combination keeps exactly the lattice paths that agree best with
the transcript.  The transcript R is turned into a linear acceptor, the
unweighted lattice H into a search space R∘E∘H through the edit
transducer E (match reward −1, all edits free): a path's cost is minus
its number of matched words, so the cheapest paths are the
most-agreeing alignments.  Pruning at the best cost, projecting onto
the lattice tape, and normalizing (weight strip, epsilon removal,
determinization, minimization) yields a compact acceptor T over the
selected word sequences.  Real costs come back later by composing T
with a grammar.
"""

from dataclasses import dataclass, field

from .edit import EditCosts, lazy_edit_compose
from .errors import (
    AcceptorRequiredError,
    ConfigError,
    EmptyCompositionError,
    EmptyLanguageError,
)
from .fst import (
    compose,
    determinize,
    linear_fst,
    minimize,
    project_output,
    prune_to_threshold,
    remove_epsilons,
    scale_weights_to_one,
    trim,
)
from .symbols import UNKNOWN


@dataclass(frozen=True)
class CombineConfig:
    """prune_margin is the extra path cost tolerated over the best
    alignment: 0 keeps only maximal-match paths, 1 also keeps paths one
    match short, and so on.  Negative margins would cut below the best
    path and are rejected."""

    prune_margin: float = 0.0
    edit_costs: EditCosts = field(default_factory=EditCosts)
    strip_weights_after_prune: bool = True

    def __post_init__(self):
        if self.prune_margin < 0.0:
            raise ConfigError(f"prune margin must be >= 0, got {self.prune_margin}")


def combine(transcript, hypothesis, cfg=CombineConfig()):
    """transcript: word strings; hypothesis: acyclic word-lattice
    acceptor.  Returns the deterministic minimal epsilon-free acceptor
    over the hypothesis word sequences with the highest transcript
    agreement.

    Out-of-vocabulary transcript words map to <unk>, which never
    matches a lattice word: they can only be deleted, which is the
    wanted reading — an unmatched transcript word constrains nothing.
    Lattice weights are ignored (the lattice enters unweighted) and, by
    default, the alignment rewards are stripped from the result."""
    symbols = hypothesis.symbols
    if not hypothesis.is_acceptor():
        raise AcceptorRequiredError("hypothesis must be an acceptor over words")
    if trim(hypothesis).is_empty():
        raise EmptyLanguageError("hypothesis accepts no path")
    ids = [symbols.id_or_unknown(w) for w in transcript]
    r = linear_fst(ids, symbols, hypothesis.semiring)
    h = scale_weights_to_one(hypothesis)
    unmatchable = (UNKNOWN,) if UNKNOWN in symbols else ()
    aligned = lazy_edit_compose(r, h, cfg.edit_costs, unmatchable)
    pruned = prune_to_threshold(aligned, cfg.prune_margin)
    t = project_output(pruned)
    if cfg.strip_weights_after_prune:
        t = scale_weights_to_one(t)
    t = remove_epsilons(t)
    t = determinize(t)
    return minimize(t)


def rescore_with_grammar(t, g, utt_id=None):
    """Compose a combined acceptor with a grammar acceptor, attaching
    the grammar's costs and dropping t-paths outside the grammar's
    support.  Raises EmptyCompositionError (naming utt_id when given)
    if nothing survives."""
    if not t.is_acceptor():
        raise AcceptorRequiredError("rescoring input must be an acceptor")
    if not g.is_acceptor():
        raise AcceptorRequiredError("grammar must be an acceptor")
    out = compose(t, g)
    if out.is_empty():
        where = f" for utterance {utt_id!r}" if utt_id else ""
        raise EmptyCompositionError(
            f"no path of the combined acceptor survives the grammar{where}"
        )
    return out
