"""Back-off n-gram estimation, interpolation, ARPA I/O and the grammar FST.

The independent checks are: per-context probability mass summing to one,
an external through-backoff ARPA scorer (tests/oracles.py) agreeing with
the model scorer, and grammar-FST path costs agreeing with both.
"""

import math
import random

import pytest

from latkit import (
    EPS,
    ArpaFormatError,
    ConfigError,
    NGramModel,
    SymbolTable,
    VocabularyError,
    apply_word_reward,
    compose,
    estimate,
    interpolate,
    linear_fst,
    read_arpa,
    shortest_path_weight,
    to_grammar_fst,
    write_arpa,
)

from oracles import arpa_score, enumerate_grams

LN10 = math.log(10.0)

WORDS = ["alpha", "beta", "gamma", "delta", "echo", "fox", "golf", "hotel"]


def random_corpus(rng, n_sentences, vocab=WORDS, max_len=9):
    return [
        [rng.choice(vocab) for _ in range(rng.randint(1, max_len))]
        for _ in range(n_sentences)
    ]


def mass(model, context):
    return sum(
        10.0 ** model.cond_log10(w, context)
        for w in model.predicted_vocabulary()
    )


# -- estimation -------------------------------------------------------------------


def test_estimate_distributions_sum_to_one(rng):
    for trial in range(10):
        corpus = random_corpus(rng, 20)
        model = estimate(corpus, order=3)
        contexts = [()] + sorted(model.backoffs)
        for h in contexts:
            assert abs(mass(model, h) - 1.0) < 1e-9, (trial, h)
        # unseen contexts fall back and must normalize too
        for _ in range(5):
            h = tuple(rng.choice(WORDS) for _ in range(2))
            assert abs(mass(model, h) - 1.0) < 1e-9


def test_estimate_covers_every_counted_gram(rng):
    corpus = random_corpus(rng, 15)
    order = 3
    model = estimate(corpus, order=order)
    counted = enumerate_grams(corpus, order)
    for gram in counted:
        assert (gram[:-1], gram[-1]) in model.probs


def test_estimate_vocab_cap_ranks_by_count_then_word():
    corpus = [["b", "b", "b", "a", "a", "c", "c", "d"]]
    model = estimate(corpus, order=2, vocab_cap=2)
    assert set(model.vocab.words()) == {"a", "b"}  # count ties break to "a"
    assert model.view("c") == "<unk>"
    assert model.view("b") == "b"
    # capped-away words score through <unk>
    assert model.cond_log10("c", ("b",)) == model.cond_log10("<unk>", ("b",))


def test_estimate_reserved_tokens_become_unk():
    model = estimate([["a", "<s>", "b", "</s>", "<eps>"]], order=2)
    assert set(model.vocab.words()) == {"a", "b"}
    assert abs(mass(model, ()) - 1.0) < 1e-9


def test_bos_unigram_is_conventional_floor(rng):
    model = estimate(random_corpus(rng, 5), order=2)
    assert model.probs[((), "<s>")] == -99.0
    assert model.cond_log10("<s>", ("alpha",)) == -99.0


def test_every_backoff_context_has_a_prob_entry(rng):
    model = estimate(random_corpus(rng, 25), order=3)
    explicit = {h + (w,) for h, w in model.probs}
    for context in model.backoffs:
        assert context in explicit


def test_perplexity_definition(rng):
    corpus = random_corpus(rng, 10)
    model = estimate(corpus, order=2)
    held_out = random_corpus(rng, 4)
    total = sum(model.sequence_log10(s) for s in held_out)
    tokens = sum(len(s) + 1 for s in held_out)
    assert abs(model.perplexity(held_out) - 10.0 ** (-total / tokens)) < 1e-12


def test_estimate_rejects_bad_input():
    with pytest.raises(ConfigError):
        estimate([], order=2)
    with pytest.raises(ConfigError):
        estimate([["a"]], order=0)
    with pytest.raises(ConfigError):
        estimate([["a"]], order=2, vocab_cap=0)


def test_model_validation():
    vocab = SymbolTable.from_words(["a"])
    with pytest.raises(ConfigError):
        NGramModel(1, {(("x",), "a"): -0.5}, {}, vocab)  # entry beyond order
    with pytest.raises(ConfigError):
        NGramModel(1, {((), "a"): 0.5}, {}, vocab)  # log10 > 0
    with pytest.raises(ConfigError):
        NGramModel(1, {((), "a"): -0.5}, {(): math.inf}, vocab)


def test_unknown_word_maps_to_unk(rng):
    model = estimate(random_corpus(rng, 10), order=2)
    assert model.cond_log10("zzzz", ()) == model.cond_log10("<unk>", ())
    seq_direct = model.sequence_log10(["alpha", "zzzz"])
    seq_unk = model.sequence_log10(["alpha", "<unk>"])
    assert seq_direct == seq_unk


# -- independent scorer agreement ----------------------------------------------------


def test_model_scores_match_independent_arpa_scorer(rng):
    for _ in range(8):
        corpus = random_corpus(rng, 20)
        model = estimate(corpus, order=3)
        text = write_arpa(model)
        for _ in range(25):
            sent = [rng.choice(WORDS + ["zzzz"]) for _ in range(rng.randint(1, 7))]
            want = arpa_score(text, sent)
            got = model.sequence_log10(sent)
            assert abs(got - want) < 1e-9, sent


# -- ARPA round trip -------------------------------------------------------------------


def test_arpa_round_trip_is_bit_exact(rng):
    corpus = random_corpus(rng, 30)
    model = estimate(corpus, order=3)
    text = write_arpa(model)
    back = read_arpa(text)
    assert back.order == model.order
    assert back.probs == model.probs
    assert back.backoffs == model.backoffs
    assert set(back.vocab.words()) == set(model.vocab.words())
    assert write_arpa(back) == text


def test_arpa_sections_and_counts(rng):
    model = estimate(random_corpus(rng, 10), order=2)
    text = write_arpa(model)
    lines = text.splitlines()
    assert lines[0] == "\\data\\"
    n1 = sum(1 for (h, _w) in model.probs if len(h) == 0)
    n2 = sum(1 for (h, _w) in model.probs if len(h) == 1)
    assert f"ngram 1={n1}" in lines
    assert f"ngram 2={n2}" in lines
    assert lines[-1] == "\\end\\"


def test_read_arpa_rejects_malformed_input():
    with pytest.raises(ArpaFormatError):
        read_arpa("not an arpa file")
    bad_count = (
        "\\data\\\nngram 1=2\n\n\\1-grams:\n-0.3\ta\n\n\\end\\\n"
    )
    with pytest.raises(ArpaFormatError):
        read_arpa(bad_count)
    bad_float = (
        "\\data\\\nngram 1=1\n\n\\1-grams:\nxyz\ta\n\n\\end\\\n"
    )
    with pytest.raises(ArpaFormatError) as exc:
        read_arpa(bad_float)
    assert exc.value.line is not None


# -- interpolation -----------------------------------------------------------------------


def test_interpolated_distributions_sum_to_one(rng):
    a = estimate(random_corpus(rng, 20, WORDS[:5]), order=3)
    b = estimate(random_corpus(rng, 20, WORDS[3:]), order=2)
    mixed = interpolate(a, b, 0.7)
    contexts = [()] + sorted(mixed.backoffs)
    for h in contexts:
        assert abs(mass(mixed, h) - 1.0) < 1e-8, h
    for _ in range(20):
        h = tuple(rng.choice(WORDS) for _ in range(rng.randint(1, 2)))
        assert abs(mass(mixed, h) - 1.0) < 1e-8


def test_interpolation_mixes_through_backoff(rng):
    a = estimate(random_corpus(rng, 15), order=3)
    b = estimate(random_corpus(rng, 15), order=3)
    lam = 0.3
    mixed = interpolate(a, b, lam)
    for h, w in list(mixed.probs)[:200]:
        if w == "<s>":
            continue
        want = math.log10(
            lam * 10.0 ** a.cond_log10(w, h)
            + (1.0 - lam) * 10.0 ** b.cond_log10(w, h)
        )
        assert abs(mixed.cond_log10(w, h) - want) < 1e-12


def test_interpolation_endpoints_identical_scores(rng):
    # same vocabulary on purpose: the endpoint models must score every
    # sequence bit-identically to the corresponding input model
    a = estimate(random_corpus(rng, 20), order=3)
    b = estimate(random_corpus(rng, 20), order=2)
    at_one = interpolate(a, b, 1.0)
    at_zero = interpolate(a, b, 0.0)
    for _ in range(50):
        sent = [rng.choice(WORDS + ["zzzz"]) for _ in range(rng.randint(1, 6))]
        assert at_one.sequence_log10(sent) == a.sequence_log10(sent)
        assert at_zero.sequence_log10(sent) == b.sequence_log10(sent)


def test_interpolation_endpoint_with_disjoint_vocab_on_shared_words(rng):
    a = estimate(random_corpus(rng, 20, WORDS[:5]), order=2)
    b = estimate(random_corpus(rng, 20, WORDS[5:]), order=2)
    at_one = interpolate(a, b, 1.0)
    for _ in range(30):
        sent = [rng.choice(WORDS[:5]) for _ in range(rng.randint(1, 6))]
        assert at_one.sequence_log10(sent) == a.sequence_log10(sent)


def test_interpolate_validation(rng):
    a = estimate(random_corpus(rng, 5), order=2)
    with pytest.raises(ConfigError):
        interpolate(a, a, -0.1)
    with pytest.raises(ConfigError):
        interpolate(a, a, 1.5)


# -- grammar FST ---------------------------------------------------------------------------


def grammar_path_cost(grammar, sentence):
    ids = [grammar.symbols.id_or_unknown(w) for w in sentence]
    lin = linear_fst(ids, grammar.symbols, grammar.semiring)
    return shortest_path_weight(compose(lin, grammar))


def test_grammar_fst_scores_match_model(rng):
    for _ in range(5):
        corpus = random_corpus(rng, 20)
        model = estimate(corpus, order=3)
        g = to_grammar_fst(model)
        for _ in range(20):
            sent = [rng.choice(WORDS + ["zzzz"]) for _ in range(rng.randint(1, 6))]
            want = -model.sequence_log10(sent) * LN10
            got = grammar_path_cost(g, sent)
            assert abs(got - want) < 1e-6, sent


def test_grammar_fst_interpolated_model(rng):
    a = estimate(random_corpus(rng, 15, WORDS[:5]), order=2)
    b = estimate(random_corpus(rng, 15, WORDS[3:]), order=2)
    mixed = interpolate(a, b, 0.6)
    g = to_grammar_fst(mixed)
    for _ in range(20):
        sent = [rng.choice(WORDS) for _ in range(rng.randint(1, 5))]
        want = -mixed.sequence_log10(sent) * LN10
        assert abs(grammar_path_cost(g, sent) - want) < 1e-6


def test_grammar_fst_shares_given_symbol_table(rng):
    model = estimate(random_corpus(rng, 10), order=2)
    syms = SymbolTable.from_words(WORDS + ["extra"])
    g = to_grammar_fst(model, syms)
    assert g.symbols == syms


def test_word_reward_shifts_word_arcs_only(rng):
    model = estimate(random_corpus(rng, 10), order=2)
    g = to_grammar_fst(model)
    r = apply_word_reward(g, 3.0)
    assert r.num_states == g.num_states
    for q in g.states():
        for before, after in zip(g.arcs(q), r.arcs(q)):
            if before.olabel == EPS:
                assert after.weight == before.weight
            else:
                assert after.weight == before.weight - 3.0
    for (q, w_before), (_, w_after) in zip(g.final_states(), r.final_states()):
        assert w_after == w_before


def test_word_reward_rejects_negative(rng):
    model = estimate(random_corpus(rng, 5), order=2)
    g = to_grammar_fst(model)
    with pytest.raises(ConfigError):
        apply_word_reward(g, -1.0)
