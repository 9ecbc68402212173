"""latkit: weighted finite-state lattice combination for lightly supervised training.

The package builds training-data lattices by aligning closed-caption style
transcripts against recognizer hypothesis lattices through a weighted edit
model, then pruning, projecting and normalizing the result into a compact
acceptor.  Supporting modules cover n-gram language model estimation and
interpolation, lattice quality metrics, and a synthetic data simulator.
"""

from .combine import CombineConfig, combine, rescore_with_grammar
from .edit import EditCosts, build_edit_fst, lazy_edit_compose, linear_labels
from .errors import (
    AcceptorRequiredError,
    ArchiveError,
    ArpaFormatError,
    ConfigError,
    CyclicFstError,
    EmptyCompositionError,
    EmptyLanguageError,
    EpsilonCycleError,
    LatkitError,
    NotDeterministicError,
    PathCountExceededError,
    SemiringMismatchError,
    SymbolTableMismatchError,
    VocabularyError,
)
from .fst import (
    EPS,
    Arc,
    Fst,
    Path,
    compose,
    count_paths,
    determinize,
    empty_fst,
    enumerate_paths,
    forward_costs,
    backward_costs,
    is_acyclic,
    is_deterministic,
    linear_fst,
    minimize,
    project_output,
    prune_to_threshold,
    remove_epsilons,
    scale_weights_to_one,
    shortest_path,
    shortest_path_weight,
    topological_order,
    trim,
)
from .kernels import BACKEND
from .lm import (
    BOS,
    EOS,
    NGramModel,
    apply_word_reward,
    estimate,
    interpolate,
    read_arpa,
    to_grammar_fst,
    write_arpa,
)
from .metrics import (
    ErrorBreakdown,
    LatticeStats,
    edit_distance,
    expected_wer,
    expected_wer_sampled,
    lattice_depth,
    mer_filter,
    oracle_wer,
)
from .semiring import LOG, TROPICAL, Semiring
from .simulate import NoiseConfig, Utterance, generate, vocabulary
from .symbols import EPSILON, UNKNOWN, SymbolTable
from .textio import (
    read_archive,
    read_fst,
    read_symbols,
    read_transcripts,
    write_archive,
    write_fst,
    write_symbols,
    write_transcripts,
)

__version__ = "0.1.0"

__all__ = [
    "Arc",
    "BACKEND",
    "BOS",
    "CombineConfig",
    "EOS",
    "EPS",
    "EPSILON",
    "EditCosts",
    "ErrorBreakdown",
    "Fst",
    "LatticeStats",
    "LOG",
    "NGramModel",
    "NoiseConfig",
    "Path",
    "Semiring",
    "SymbolTable",
    "TROPICAL",
    "UNKNOWN",
    "Utterance",
    "AcceptorRequiredError",
    "ArchiveError",
    "ArpaFormatError",
    "ConfigError",
    "CyclicFstError",
    "EmptyCompositionError",
    "EmptyLanguageError",
    "EpsilonCycleError",
    "LatkitError",
    "NotDeterministicError",
    "PathCountExceededError",
    "SemiringMismatchError",
    "SymbolTableMismatchError",
    "VocabularyError",
    "apply_word_reward",
    "backward_costs",
    "build_edit_fst",
    "combine",
    "compose",
    "count_paths",
    "determinize",
    "edit_distance",
    "empty_fst",
    "enumerate_paths",
    "estimate",
    "expected_wer",
    "expected_wer_sampled",
    "forward_costs",
    "generate",
    "interpolate",
    "is_acyclic",
    "is_deterministic",
    "lattice_depth",
    "lazy_edit_compose",
    "linear_fst",
    "linear_labels",
    "mer_filter",
    "minimize",
    "oracle_wer",
    "project_output",
    "prune_to_threshold",
    "read_arpa",
    "read_archive",
    "read_fst",
    "read_symbols",
    "read_transcripts",
    "remove_epsilons",
    "rescore_with_grammar",
    "scale_weights_to_one",
    "shortest_path",
    "shortest_path_weight",
    "to_grammar_fst",
    "topological_order",
    "trim",
    "vocabulary",
    "write_arpa",
    "write_archive",
    "write_fst",
    "write_symbols",
    "write_transcripts",
]
