"""Shared fixtures and random machine builders for the test suite."""

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from latkit import LOG, TROPICAL, Arc, Fst, SymbolTable

# Weights drawn as multiples of 1/4 so tropical path sums are exact binary
# floats and language comparisons can demand exact equality.
WEIGHT_GRID = [0.25 * k for k in range(9)]


@pytest.fixture
def syms():
    return SymbolTable.from_words(["a", "b", "c", "d", "e"])


def random_acyclic_fst(rng, syms, semiring=TROPICAL, max_states=6,
                       acceptor=True, p_eps=0.15, weighted=True):
    """A random trim acyclic machine with <= max_states states.

    Arcs only go from lower to higher state ids, which guarantees
    acyclicity; retries until the result accepts at least one path.
    """
    labels = [i for _, i in syms if i != 0]
    while True:
        n = rng.randint(2, max_states)
        arcs = [[] for _ in range(n)]
        for q in range(n - 1):
            for _ in range(rng.randint(1, 3)):
                ns = rng.randint(q + 1, n - 1)
                il = 0 if rng.random() < p_eps else rng.choice(labels)
                ol = il if acceptor else (
                    0 if rng.random() < p_eps else rng.choice(labels)
                )
                w = rng.choice(WEIGHT_GRID) if weighted else 0.0
                arcs[q].append(Arc(il, ol, w, ns))
        finals = {n - 1: rng.choice(WEIGHT_GRID) if weighted else 0.0}
        if rng.random() < 0.3 and n > 2:
            finals[rng.randint(1, n - 2)] = (
                rng.choice(WEIGHT_GRID) if weighted else 0.0
            )
        fst = Fst(0, arcs, finals, syms, semiring)
        from latkit import trim

        fst = trim(fst)
        if not fst.is_empty():
            return fst


def random_epsilon_free_acceptor(rng, syms, semiring=TROPICAL, max_states=6,
                                 weighted=True):
    return random_acyclic_fst(
        rng, syms, semiring, max_states, acceptor=True, p_eps=0.0,
        weighted=weighted,
    )


@pytest.fixture
def rng():
    return random.Random(20240817)
