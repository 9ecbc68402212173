"""End-to-end acceptance gate.

Each test prints one PASS/FAIL line with its measured numbers and
enforces its own wall-clock budget.  Oracles are independent of the
implementations under test: exhaustive path enumeration, a longest
common subsequence matcher, and a standalone recursive scorer over the
stored model entries.
"""

import math
import random
import time

import pytest

from latkit import (
    LOG,
    TROPICAL,
    Arc,
    CombineConfig,
    Fst,
    NoiseConfig,
    SymbolTable,
    apply_word_reward,
    build_edit_fst,
    combine,
    compose,
    determinize,
    edit_distance,
    estimate,
    expected_wer_sampled,
    generate,
    interpolate,
    lattice_depth,
    linear_fst,
    mer_filter,
    minimize,
    project_output,
    prune_to_threshold,
    read_arpa,
    remove_epsilons,
    shortest_path_weight,
    to_grammar_fst,
    write_arpa,
)
from latkit.cli import main as cli_main

from conftest import random_acyclic_fst, random_epsilon_free_acceptor
from oracles import all_paths, language

LN10 = math.log(10.0)


def tables_equal(la, lb, tol):
    return set(la) == set(lb) and all(
        abs(la[k] - lb[k]) <= tol for k in la
    )


def report(name, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}", flush=True)


def lcs_length(a, b):
    """Longest common subsequence length; the count of word matches an
    optimal unit-cost alignment can achieve."""
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            cur.append(max(prev[j], cur[j - 1], prev[j - 1] + (x == y)))
        prev = cur
    return prev[len(b)]


def out_strings(fst):
    return {o for (_i, o) in language(fst)}


# -- 01: edit transducer size ----------------------------------------------------


def test_01_edit_transducer_arc_counts():
    t0 = time.perf_counter()
    got = []
    for size in (1, 3, 10, 100):
        words = [f"v{i}" for i in range(size)]
        table = SymbolTable.from_words(words, include_unknown=False)
        got.append(build_edit_fst(table).num_arcs)
    elapsed = time.perf_counter() - t0
    ok = got == [3, 15, 120, 10200] and elapsed < 1.0
    report("edit transducer arc counts", ok,
           f"got {got}, want [3, 15, 120, 10200], {elapsed:.3f}s")
    assert ok


# -- 02: combination equals brute-force best-match selection ----------------------


def test_02_combination_matches_brute_force():
    t0 = time.perf_counter()
    rng = random.Random(12021)
    syms = SymbolTable.from_words(["a", "b", "c", "d", "e"])
    words = syms.words()
    mismatches = 0
    for case in range(1000):
        while True:
            hyp = random_epsilon_free_acceptor(rng, syms, TROPICAL,
                                               max_states=6)
            paths = all_paths(hyp)
            if len(paths) <= 64:
                break
        pool = list(words) + ["oov1", "oov2"]
        transcript = [rng.choice(pool) for _ in range(rng.randint(0, 8))]
        combined = combine(transcript, hyp)

        hyp_strings = {outs for _i, outs, _w in paths}
        best = max(
            lcs_length(transcript, [syms.sym(x) for x in s])
            for s in hyp_strings
        )
        want = {
            s for s in hyp_strings
            if lcs_length(transcript, [syms.sym(x) for x in s]) == best
        }
        if out_strings(combined) != want:
            mismatches += 1
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 60.0
    report("combination vs brute force (1000 cases)", ok,
           f"{mismatches} mismatches, {elapsed:.1f}s")
    assert ok


# -- 03: boundary behaviors --------------------------------------------------------


def test_03_boundary_behaviors():
    syms = SymbolTable.from_words(["a", "b", "c", "d"])

    def sausage(slots):
        arcs = [
            [Arc(syms.id(w), syms.id(w), 0.5, i + 1) for w in ws]
            for i, ws in enumerate(slots)
        ] + [[]]
        return Fst(0, arcs, {len(slots): 0.0}, syms, TROPICAL)

    hyp = sausage([("a", "b"), ("c", "d")])
    disjoint = combine(["zzz", "yyy", "xxx"], hyp)
    full = out_strings(project_output(hyp))
    ok_disjoint = (
        out_strings(disjoint) == full
        and all(w == 0.0 for w in language(disjoint).values())
    )

    contained = combine(["a", "c"], hyp)
    ids = (syms.id("a"), syms.id("c"))
    ok_contained = language(contained) == {(ids, ids): 0.0}

    ok = ok_disjoint and ok_contained
    report("boundary behaviors", ok,
           f"disjoint keeps lattice: {ok_disjoint}, "
           f"containment collapses to transcript: {ok_contained}")
    assert ok


# -- 04/05: simulated corpus ordering and depth reduction --------------------------


@pytest.fixture(scope="module")
def simulated_batch():
    cfg = NoiseConfig(vocab_size=50, min_length=8, max_length=15,
                      p_delete=0.15, p_substitute=0.15, q=0.6, k=4,
                      d=0.05, seed=20240817)
    t0 = time.perf_counter()
    _symbols, utts = generate(cfg, 500)
    rows = []
    for u in utts:
        t_wer = edit_distance(u.reference, u.transcript).wer
        h_ewer = expected_wer_sampled(u.hypothesis, u.reference,
                                      samples=2000, seed=0)
        combined = combine(u.transcript, u.hypothesis)
        c_ewer = expected_wer_sampled(combined, u.reference,
                                      samples=2000, seed=0)
        rows.append((t_wer, h_ewer, c_ewer,
                     lattice_depth(u.hypothesis).depth,
                     lattice_depth(combined).depth))
    return rows, time.perf_counter() - t0


def test_04_expected_wer_ordering_on_simulated_corpus(simulated_batch):
    rows, elapsed = simulated_batch
    n = len(rows)
    t_wer = sum(r[0] for r in rows) / n
    h_ewer = sum(r[1] for r in rows) / n
    c_ewer = sum(r[2] for r in rows) / n
    ok = (t_wer > h_ewer > c_ewer
          and c_ewer <= 0.9 * h_ewer
          and elapsed < 120.0)
    report("expected-WER ordering (500 utterances)", ok,
           f"transcript {t_wer:.4f} > hypothesis {h_ewer:.4f} > "
           f"combined {c_ewer:.4f} "
           f"(relative drop {1 - c_ewer / h_ewer:.1%}), {elapsed:.1f}s")
    assert ok


def test_05_depth_reduction_on_simulated_corpus(simulated_batch):
    rows, _elapsed = simulated_batch
    t0 = time.perf_counter()
    n = len(rows)
    d_hyp = sum(r[3] for r in rows) / n
    d_comb = sum(r[4] for r in rows) / n
    elapsed = time.perf_counter() - t0
    ok = d_comb < d_hyp and elapsed < 60.0
    report("depth reduction", ok,
           f"combined {d_comb:.2f} < hypothesis {d_hyp:.2f}")
    assert ok


# -- 06: word-reward arithmetic -----------------------------------------------------


def bounded_walks(g, max_arcs):
    """(state sequence of arc indices, accumulated cost) for every
    accepting walk of at most max_arcs arcs."""
    walks = []
    stack = [(g.start, (), 0.0)]
    while stack:
        q, idxs, cost = stack.pop()
        fw = g.final(q)
        if fw != math.inf:
            walks.append((idxs, cost + fw))
        if len(idxs) < max_arcs:
            for i, arc in enumerate(g.arcs(q)):
                stack.append((arc.nextstate, idxs + ((q, i),),
                              cost + arc.weight))
    return walks


def test_06_word_reward_arithmetic():
    t0 = time.perf_counter()
    rng = random.Random(606)
    words = ["alpha", "bravo", "carol", "delta", "echo"]
    checked = 0
    for trial in range(20):
        corpus = [
            [rng.choice(words) for _ in range(rng.randint(1, 6))]
            for _ in range(25)
        ]
        model = estimate(corpus, order=2)
        for backoff_arcs in (False, True):
            g = to_grammar_fst(model, backoff_arcs=backoff_arcs)
            gr = apply_word_reward(g, 3.0)
            for idxs, total in bounded_walks(g, 4):
                # replay the same walk on the rewarded machine
                cost_r = 0.0
                k = 0
                for q, i in idxs:
                    a = g.arcs(q)[i]
                    b = gr.arcs(q)[i]
                    assert (b.ilabel, b.olabel, b.nextstate) == \
                        (a.ilabel, a.olabel, a.nextstate)
                    if a.olabel != 0:
                        k += 1
                        assert b.weight == a.weight - 3.0  # bit-exact
                    else:
                        assert b.weight == a.weight
                    cost_r += b.weight
                final_state = (
                    g.arcs(idxs[-1][0])[idxs[-1][1]].nextstate
                    if idxs else g.start
                )
                fw = g.final(final_state)
                assert gr.final(final_state) == fw
                assert abs((cost_r + fw) - (total - 3.0 * k)) < 1e-9
                checked += 1
    elapsed = time.perf_counter() - t0
    ok = checked > 1000 and elapsed < 10.0
    report("word-reward arithmetic", ok,
           f"{checked} walks checked, {elapsed:.1f}s")
    assert ok


# -- 07: FST algebra vs path enumeration ---------------------------------------------


def compose_oracle(a, b):
    plus = min if a.semiring is TROPICAL else LOG.plus
    joined = {}
    for (i1, o1), w1 in language(a).items():
        for (i2, o2), w2 in language(b).items():
            if o1 == i2:
                key = (i1, o2)
                w = w1 + w2
                joined[key] = plus(joined[key], w) if key in joined else w
    return joined


def test_07_fst_algebra_soundness():
    t0 = time.perf_counter()
    rng = random.Random(707)
    syms = SymbolTable.from_words(["a", "b", "c", "d", "e"])
    counts = dict.fromkeys(
        ("compose", "remove_epsilons", "determinize", "minimize", "prune"), 0
    )
    for case in range(1000):
        semiring = LOG if case % 3 == 0 else TROPICAL
        tol = 1e-9 if semiring is LOG else 0.0

        acceptors = rng.random() < 0.7
        a = random_acyclic_fst(rng, syms, semiring, max_states=5,
                               acceptor=acceptors, p_eps=0.0)
        b = random_acyclic_fst(rng, syms, semiring, max_states=5,
                               acceptor=acceptors, p_eps=0.0)
        got = language(compose(a, b))
        want = compose_oracle(a, b)
        assert tables_equal(got, want, tol), f"compose case {case}"
        counts["compose"] += 1

        m = random_acyclic_fst(rng, syms, semiring, max_states=6,
                               acceptor=True, p_eps=0.3)
        assert tables_equal(
            language(remove_epsilons(m)), language(m), tol
        ), f"remove_epsilons case {case}"
        counts["remove_epsilons"] += 1

        ef = random_epsilon_free_acceptor(rng, syms, semiring, max_states=6)
        det = determinize(ef)
        assert tables_equal(language(det), language(ef), tol), \
            f"determinize case {case}"
        counts["determinize"] += 1

        assert tables_equal(language(minimize(det)), language(ef), tol), \
            f"minimize case {case}"
        counts["minimize"] += 1

        p = random_acyclic_fst(rng, syms, TROPICAL, max_states=6,
                               acceptor=True, p_eps=0.1)
        full = language(p)
        best = min(full.values())
        want_best = {k: w for k, w in full.items() if w <= best}
        assert tables_equal(
            language(prune_to_threshold(p, 0.0)), want_best, 0.0
        ), f"prune case {case}"
        # at a positive margin every string within the margin survives at
        # its exact weight; survivors are a subset of the original language
        # and pruning paths can only raise a surviving string's weight
        margin = rng.choice((0.5, 1.0))
        kept = language(prune_to_threshold(p, margin))
        want_margin = {k: w for k, w in full.items() if w <= best + margin}
        assert set(want_margin) <= set(kept) <= set(full)
        assert all(kept[k] == full[k] for k in want_margin)
        assert all(w >= full[k] for k, w in kept.items())
        counts["prune"] += 1
    elapsed = time.perf_counter() - t0
    ok = all(v >= 1000 for v in counts.values()) and elapsed < 120.0
    report("FST algebra soundness", ok,
           f"{counts} equivalence checks, {elapsed:.1f}s")
    assert ok


# -- 08: language model correctness ---------------------------------------------------


def grammar_score(g, model, sentence):
    ids = [g.symbols.id_or_unknown(w) for w in sentence]
    s = linear_fst(ids, g.symbols, TROPICAL)
    return shortest_path_weight(compose(s, g))


def test_08_language_model_correctness():
    t0 = time.perf_counter()
    rng = random.Random(808)
    words_a = ["alpha", "bravo", "carol", "delta", "echo", "fox", "golf",
               "hotel"]
    words_b = ["delta", "echo", "fox", "golf", "india", "julia"]
    corpus_a = [[rng.choice(words_a) for _ in range(rng.randint(1, 7))]
                for _ in range(60)]
    corpus_b = [[rng.choice(words_b) for _ in range(rng.randint(1, 7))]
                for _ in range(60)]
    in_domain = estimate(corpus_a, order=3)
    background = estimate(corpus_b, order=3)
    mixed = interpolate(in_domain, background, 0.7)

    vocab_pool = words_a + words_b + ["zzz"]

    # conditional distributions of the mixture sum to one
    worst_sum = 0.0
    for _ in range(100):
        context = tuple(rng.choice(vocab_pool)
                        for _ in range(rng.randint(0, 2)))
        total = sum(
            10.0 ** mixed.cond_log10(w, context)
            for w in mixed.predicted_vocabulary()
        )
        worst_sum = max(worst_sum, abs(total - 1.0))
    ok_sums = worst_sum <= 1e-8

    # endpoint identities are exact
    sentences = [
        [rng.choice(vocab_pool) for _ in range(rng.randint(0, 8))]
        for _ in range(50)
    ]
    at_one = interpolate(in_domain, background, 1.0)
    at_zero = interpolate(in_domain, background, 0.0)
    ok_endpoints = all(
        at_one.sequence_log10(s) == in_domain.sequence_log10(s)
        and at_zero.sequence_log10(s) == background.sequence_log10(s)
        for s in sentences
    )

    # grammar FST scores match the scorer
    worst_fst = 0.0
    for model in (in_domain, mixed):
        g = to_grammar_fst(model)
        for s in sentences:
            got = grammar_score(g, model, s)
            want = -model.sequence_log10(s) * LN10
            worst_fst = max(worst_fst, abs(got - want))
    ok_fst = worst_fst <= 1e-6

    # ARPA round trip is score-identical
    worst_arpa = 0.0
    for model in (in_domain, mixed):
        back = read_arpa(write_arpa(model))
        for s in sentences:
            worst_arpa = max(
                worst_arpa,
                abs(back.sequence_log10(s) - model.sequence_log10(s)),
            )
    ok_arpa = worst_arpa <= 1e-9

    elapsed = time.perf_counter() - t0
    ok = ok_sums and ok_endpoints and ok_fst and ok_arpa and elapsed < 60.0
    report("language model correctness", ok,
           f"sum dev {worst_sum:.2e}, endpoints exact: {ok_endpoints}, "
           f"grammar dev {worst_fst:.2e}, round-trip dev {worst_arpa:.2e}, "
           f"{elapsed:.1f}s")
    assert ok


# -- 09: MER filter semantics ----------------------------------------------------------


def test_09_mer_filter_semantics():
    t0 = time.perf_counter()
    transcripts = [
        ("u1", ["a", "b", "c", "d"]),   # 0%
        ("u2", ["a", "b", "c", "d"]),   # 25%
        ("u3", ["a", "b", "c", "d"]),   # 50%
        ("u4", ["a", "b"]),             # 100%
    ]
    decodes = [
        ("u1", ["a", "b", "c", "d"]),
        ("u2", ["a", "x", "c", "d"]),
        ("u3", ["a", "x", "y", "d"]),
        ("u4", ["p", "q"]),
    ]
    want_kept = {0.0: ["u1"], 25.0: ["u1", "u2"], 40.0: ["u1", "u2"],
                 50.0: ["u1", "u2", "u3"], 100.0: ["u1", "u2", "u3", "u4"]}
    ok = True
    previous = set()
    for threshold in (0.0, 25.0, 40.0, 50.0, 100.0):
        kept, dropped, _report = mer_filter(transcripts, decodes, threshold)
        ok = ok and kept == want_kept[threshold]
        ok = ok and sorted(kept + dropped) == ["u1", "u2", "u3", "u4"]
        ok = ok and previous <= set(kept)
        previous = set(kept)
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 5.0
    report("MER filter semantics", ok,
           f"exact partitions at 5 thresholds, monotone, {elapsed:.2f}s")
    assert ok


# -- 10: CLI determinism -----------------------------------------------------------------


def test_10_cli_determinism(tmp_path):
    t0 = time.perf_counter()
    base = [
        "simulate", "--count", "12", "--seed", "3", "--vocab-size", "20",
        "--min-length", "4", "--max-length", "7",
        "--out-refs", str(tmp_path / "refs.txt"),
        "--out-transcripts", str(tmp_path / "trans.txt"),
        "--out-lattices", str(tmp_path / "lat.ark"),
        "--out-syms", str(tmp_path / "words.syms"),
    ]
    assert cli_main(base) == 0
    first = {
        name: (tmp_path / name).read_bytes()
        for name in ("refs.txt", "trans.txt", "lat.ark", "words.syms")
    }
    assert cli_main(base) == 0
    ok_rerun = all(
        (tmp_path / name).read_bytes() == blob for name, blob in first.items()
    )

    outputs = []
    for jobs in ("1", "2", "4"):
        comb = tmp_path / f"comb-{jobs}.ark"
        rc = cli_main([
            "combine",
            "--transcripts", str(tmp_path / "trans.txt"),
            "--lattices", str(tmp_path / "lat.ark"),
            "--syms", str(tmp_path / "words.syms"),
            "--out", str(comb), "--jobs", jobs,
        ])
        assert rc == 0
        tsv = tmp_path / f"ewer-{jobs}.tsv"
        rc = cli_main([
            "expected-wer", "--estimate", "--samples", "400", "--seed", "9",
            "--refs", str(tmp_path / "refs.txt"),
            "--lattices", str(tmp_path / "lat.ark"),
            "--syms", str(tmp_path / "words.syms"),
            "--out", str(tsv), "--jobs", jobs,
        ])
        assert rc == 0
        outputs.append((comb.read_bytes(), tsv.read_bytes()))
    ok_jobs = all(o == outputs[0] for o in outputs[1:])

    elapsed = time.perf_counter() - t0
    ok = ok_rerun and ok_jobs
    report("CLI determinism", ok,
           f"re-run identical: {ok_rerun}, --jobs 1/2/4 identical: "
           f"{ok_jobs}, {elapsed:.1f}s")
    assert ok
