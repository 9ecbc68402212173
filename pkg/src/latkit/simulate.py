"""Synthetic (reference, noisy transcript, hypothesis lattice) triples.

Two independent corruption channels act on a uniformly sampled
reference.  The transcript channel edits words: each reference word is
deleted with probability p_delete, otherwise substituted with
probability p_substitute; an extra word is inserted before each
position (and at the end) with probability p_insert.  The decoder
channel produces a confusion sausage: per reference word one slot that,
with probability d, collapses to a single epsilon arc (a decoder
deletion), and otherwise offers k alternatives — the true word carrying
posterior q (arc cost −ln q) and k−1 distinct wrong words sharing the
rest (cost −ln((1−q)/(k−1)) each).

Everything is drawn from one seeded generator, so a config and a count
determine the output bit for bit.
"""

import math
import random
from dataclasses import dataclass
from typing import NamedTuple

from .errors import ConfigError
from .fst import EPS, Arc, Fst
from .semiring import TROPICAL
from .symbols import SymbolTable


@dataclass(frozen=True)
class NoiseConfig:
    vocab_size: int = 50
    min_length: int = 8
    max_length: int = 15
    p_delete: float = 0.15
    p_substitute: float = 0.15
    p_insert: float = 0.25
    k: int = 4
    q: float = 0.6
    d: float = 0.05
    seed: int = 0

    def __post_init__(self):
        for name in ("p_delete", "p_substitute", "p_insert", "q", "d"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {v}")
        if self.p_delete + self.p_substitute > 1.0:
            raise ConfigError("p_delete + p_substitute must not exceed 1")
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.k > 1 and self.q <= 0.0:
            raise ConfigError("q must be positive when a slot has alternatives")
        if self.vocab_size < max(2, self.k):
            raise ConfigError(
                f"vocab_size must be at least max(2, k), got {self.vocab_size}"
            )
        if not 1 <= self.min_length <= self.max_length:
            raise ConfigError(
                f"bad length range [{self.min_length}, {self.max_length}]"
            )


class Utterance(NamedTuple):
    utt_id: str
    reference: list
    transcript: list
    hypothesis: Fst


def vocabulary(cfg):
    """The word list implied by the config: w001, w002, ..."""
    width = max(3, len(str(cfg.vocab_size)))
    return [f"w{i:0{width}d}" for i in range(1, cfg.vocab_size + 1)]


def generate(cfg, count):
    """count utterances, ids utt-0001 and up, as (symbols, [Utterance])."""
    if count < 1:
        raise ConfigError(f"count must be >= 1, got {count}")
    words = vocabulary(cfg)
    symbols = SymbolTable.from_words(words)
    rng = random.Random(cfg.seed)
    utterances = []
    pad = max(4, len(str(count)))
    for n in range(1, count + 1):
        length = rng.randint(cfg.min_length, cfg.max_length)
        reference = [words[rng.randrange(len(words))] for _ in range(length)]
        transcript = _corrupt_transcript(reference, cfg, rng, words)
        hypothesis = _sausage(reference, cfg, rng, words, symbols)
        utterances.append(
            Utterance(f"utt-{n:0{pad}d}", reference, transcript, hypothesis)
        )
    return symbols, utterances


def _corrupt_transcript(reference, cfg, rng, words):
    out = []
    for w in reference:
        if rng.random() < cfg.p_insert:
            out.append(words[rng.randrange(len(words))])
        u = rng.random()
        if u < cfg.p_delete:
            continue
        if u < cfg.p_delete + cfg.p_substitute:
            out.append(_other_word(w, rng, words))
        else:
            out.append(w)
    if rng.random() < cfg.p_insert:
        out.append(words[rng.randrange(len(words))])
    return out


def _other_word(word, rng, words):
    pick = words[rng.randrange(len(words) - 1)]
    # skip-one trick: uniform over the vocabulary minus the true word
    return words[len(words) - 1] if pick == word else pick


def _sausage(reference, cfg, rng, words, symbols):
    true_cost = -math.log(cfg.q) if cfg.k > 1 else 0.0
    alt_cost = (
        -math.log((1.0 - cfg.q) / (cfg.k - 1))
        if cfg.k > 1 and cfg.q < 1.0
        else math.inf
    )
    arcs = [[] for _ in range(len(reference) + 1)]
    for i, w in enumerate(reference):
        if rng.random() < cfg.d:
            arcs[i].append(Arc(EPS, EPS, 0.0, i + 1))
            continue
        wid = symbols.id(w)
        arcs[i].append(Arc(wid, wid, true_cost, i + 1))
        if cfg.k > 1 and cfg.q < 1.0:
            pool = [x for x in words if x != w]
            for alt in sorted(rng.sample(pool, cfg.k - 1)):
                aid = symbols.id(alt)
                arcs[i].append(Arc(aid, aid, alt_cost, i + 1))
    return Fst(0, arcs, {len(reference): 0.0}, symbols, TROPICAL)
