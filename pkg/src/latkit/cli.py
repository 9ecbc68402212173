"""Command-line front end: batch operations over utterance archives.

Every subcommand is a thin binding of one library operation mapped over
the entries of transcript files and lattice archives.  Work is spread
over a process pool (--jobs, default all cores) but results are always
assembled in input order, so outputs are byte-identical for any worker
count.  Per-utterance failures are reported on stderr and skipped
(exit status 1) unless --fail-fast; malformed inputs and usage errors
exit with status 2.
"""

import argparse
import multiprocessing
import os
import sys

from . import textio
from .combine import CombineConfig, combine, rescore_with_grammar
from .edit import EditCosts
from .lm import (
    apply_word_reward,
    estimate,
    interpolate,
    read_arpa,
    to_grammar_fst,
    write_arpa,
)
from .metrics import (
    expected_wer,
    expected_wer_sampled,
    lattice_depth,
    mer_filter,
    oracle_wer,
)
from .simulate import NoiseConfig, generate
from .errors import ArchiveError, LatkitError
from .fst import (
    determinize,
    minimize,
    project_output,
    prune_to_threshold,
    remove_epsilons,
    scale_weights_to_one,
    trim,
)
from .semiring import LOG, TROPICAL

_CTX = None  # per-subcommand shared state for pool workers


def _set_ctx(ctx):
    global _CTX
    _CTX = ctx


def _map_ordered(worker, items, ctx, jobs, fail_fast):
    """Map worker over [(utt_id, payload)] preserving order.

    worker returns (utt_id, ok, result-or-message).  Returns
    (results, failures) as [(utt_id, value)] lists in input order."""
    results, failures = [], []
    if jobs > 1 and len(items) > 1:
        pool = multiprocessing.get_context().Pool(
            jobs, initializer=_set_ctx, initargs=(ctx,)
        )
        with pool:
            chunk = max(1, len(items) // (jobs * 4))
            iterator = pool.imap(worker, items, chunksize=chunk)
            for utt_id, ok, value in iterator:
                if ok:
                    results.append((utt_id, value))
                else:
                    failures.append((utt_id, value))
                    if fail_fast:
                        break
    else:
        _set_ctx(ctx)
        for item in items:
            utt_id, ok, value = worker(item)
            if ok:
                results.append((utt_id, value))
            else:
                failures.append((utt_id, value))
                if fail_fast:
                    break
    return results, failures


def _report_failures(failures):
    for utt_id, message in failures:
        print(f"{utt_id}: {message}", file=sys.stderr)


def _write_report(rows, path):
    """rows: (utt_id, metric, value) triples; written as TSV."""
    text = "".join(f"{u}\t{m}\t{v}\n" for u, m, v in rows)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _check_same_ids(archive_ids, other_ids, what):
    missing = [u for u in archive_ids if u not in set(other_ids)]
    extra = [u for u in other_ids if u not in set(archive_ids)]
    if missing or extra:
        raise ArchiveError(
            f"utterance ids differ between lattices and {what}: "
            f"missing {missing[:10]}, extra {extra[:10]}"
        )


def _semiring(name):
    return LOG if name == "log" else TROPICAL


# -- workers (top level so the pool can pickle them by name) -------------------


def _combine_one(item):
    utt_id, (words, fst) = item
    try:
        return utt_id, True, combine(words, fst, _CTX["cfg"])
    except LatkitError as exc:
        return utt_id, False, str(exc)


def _prune_one(item):
    utt_id, fst = item
    try:
        return utt_id, True, prune_to_threshold(fst, _CTX["threshold"])
    except LatkitError as exc:
        return utt_id, False, str(exc)


def _rescore_one(item):
    utt_id, fst = item
    try:
        out = rescore_with_grammar(fst, _CTX["grammar"], utt_id)
        return utt_id, True, out
    except LatkitError as exc:
        return utt_id, False, str(exc)


def _expected_wer_one(item):
    utt_id, (ref, fst) = item
    ctx = _CTX
    try:
        if ctx["estimate"]:
            value = expected_wer_sampled(
                fst, ref, ctx["samples"], ctx["seed"]
            )
        else:
            value = expected_wer(fst, ref, ctx["cap"])
        return utt_id, True, value
    except LatkitError as exc:
        return utt_id, False, str(exc)


def _oracle_wer_one(item):
    utt_id, (ref, fst) = item
    try:
        return utt_id, True, oracle_wer(fst, ref)
    except LatkitError as exc:
        return utt_id, False, str(exc)


def _depth_one(item):
    utt_id, fst = item
    try:
        return utt_id, True, lattice_depth(fst).depth
    except LatkitError as exc:
        return utt_id, False, str(exc)


# -- subcommands -----------------------------------------------------------------


def cmd_combine(args):
    symbols = textio.read_symbols(args.syms)
    transcripts = dict(textio.read_transcripts(args.transcripts))
    lattices = textio.read_archive(args.lattices, symbols)
    _check_same_ids([u for u, _ in lattices], list(transcripts), "transcripts")
    cfg = CombineConfig(
        prune_margin=args.prune_margin,
        edit_costs=EditCosts(),
        strip_weights_after_prune=not args.keep_weights,
    )
    items = [(u, (transcripts[u], fst)) for u, fst in lattices]
    results, failures = _map_ordered(
        _combine_one, items, {"cfg": cfg}, args.jobs, args.fail_fast
    )
    textio.write_archive(results, args.out)
    _report_failures(failures)
    return 1 if failures else 0


def cmd_prune(args):
    if args.threshold < 0:
        raise LatkitError(f"--threshold must be >= 0, got {args.threshold}")
    symbols = textio.read_symbols(args.syms)
    lattices = textio.read_archive(args.lattices, symbols)
    results, failures = _map_ordered(
        _prune_one, lattices, {"threshold": args.threshold},
        args.jobs, args.fail_fast,
    )
    textio.write_archive(results, args.out)
    _report_failures(failures)
    return 1 if failures else 0


def cmd_rescore(args):
    symbols = textio.read_symbols(args.syms)
    grammar = textio.read_fst(args.grammar, symbols)
    lattices = textio.read_archive(args.lattices, symbols)
    results, failures = _map_ordered(
        _rescore_one, lattices, {"grammar": grammar}, args.jobs, args.fail_fast
    )
    textio.write_archive(results, args.out)
    _report_failures(failures)
    return 1 if failures else 0


def cmd_mer_filter(args):
    transcripts = textio.read_transcripts(args.transcripts)
    decodes = textio.read_transcripts(args.decodes)
    kept, dropped, report = mer_filter(
        transcripts, decodes, args.threshold
    )
    kept_set = set(kept)
    textio.write_transcripts(
        [(u, w) for u, w in transcripts if u in kept_set], args.out_kept
    )
    textio.write_transcripts(
        [(u, w) for u, w in transcripts if u not in kept_set], args.out_dropped
    )
    rows = [(u, "mer", repr(100.0 * b.wer)) for u, b in report]
    total_errors = sum(b.errors for _, b in report)
    total_len = sum(b.reference_length for _, b in report)
    overall = 100.0 * total_errors / total_len if total_len else 0.0
    rows.append(("ALL", "mer", repr(overall)))
    _write_report(rows, args.report)
    return 0


def _read_refs_and_lattices(args):
    symbols = textio.read_symbols(args.syms)
    refs = dict(textio.read_transcripts(args.refs))
    lattices = textio.read_archive(args.lattices, symbols)
    _check_same_ids([u for u, _ in lattices], list(refs), "references")
    return [(u, (refs[u], fst)) for u, fst in lattices]


def cmd_expected_wer(args):
    items = _read_refs_and_lattices(args)
    ctx = {
        "cap": args.cap,
        "estimate": args.estimate,
        "samples": args.samples,
        "seed": args.seed,
    }
    results, failures = _map_ordered(
        _expected_wer_one, items, ctx, args.jobs, args.fail_fast
    )
    rows = [(u, "expected_wer", repr(v)) for u, v in results]
    if results:
        mean = sum(v for _, v in results) / len(results)
        rows.append(("ALL", "expected_wer", repr(mean)))
    _write_report(rows, args.out)
    _report_failures(failures)
    return 1 if failures else 0


def cmd_oracle_wer(args):
    items = _read_refs_and_lattices(args)
    results, failures = _map_ordered(
        _oracle_wer_one, items, {}, args.jobs, args.fail_fast
    )
    rows = [(u, "oracle_wer", repr(b.wer)) for u, b in results]
    total_errors = sum(b.errors for _, b in results)
    total_len = sum(b.reference_length for _, b in results)
    if results:
        overall = total_errors / total_len if total_len else 0.0
        rows.append(("ALL", "oracle_wer", repr(overall)))
    _write_report(rows, args.out)
    _report_failures(failures)
    return 1 if failures else 0


def cmd_depth(args):
    symbols = textio.read_symbols(args.syms)
    lattices = textio.read_archive(args.lattices, symbols)
    results, failures = _map_ordered(
        _depth_one, lattices, {}, args.jobs, args.fail_fast
    )
    rows = [(u, "depth", repr(v)) for u, v in results]
    if results:
        rows.append(("ALL", "depth", repr(sum(v for _, v in results) / len(results))))
    _write_report(rows, args.out)
    _report_failures(failures)
    return 1 if failures else 0


def cmd_lm_train(args):
    with open(args.corpus, encoding="utf-8") as fh:
        corpus = [line.split() for line in fh]
    model = estimate(corpus, order=args.order, vocab_cap=args.vocab_cap)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(write_arpa(model))
    return 0


def cmd_lm_interpolate(args):
    with open(args.in_arpa, encoding="utf-8") as fh:
        in_domain = read_arpa(fh.read())
    with open(args.bg, encoding="utf-8") as fh:
        background = read_arpa(fh.read())
    mixed = interpolate(in_domain, background, args.lam)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(write_arpa(mixed))
    return 0


def cmd_lm_to_fst(args):
    with open(args.in_arpa, encoding="utf-8") as fh:
        model = read_arpa(fh.read())
    symbols = textio.read_symbols(args.syms) if args.syms else None
    grammar = to_grammar_fst(model, symbols)
    textio.write_fst(grammar, args.out)
    if args.out_syms:
        textio.write_symbols(grammar.symbols, args.out_syms)
    return 0


def cmd_word_reward(args):
    symbols = textio.read_symbols(args.syms)
    grammar = textio.read_fst(args.in_fst, symbols)
    textio.write_fst(apply_word_reward(grammar, args.reward), args.out)
    return 0


def cmd_simulate(args):
    cfg = NoiseConfig(
        vocab_size=args.vocab_size,
        min_length=args.min_length,
        max_length=args.max_length,
        p_delete=args.p_delete,
        p_substitute=args.p_substitute,
        p_insert=args.p_insert,
        k=args.k,
        q=args.q,
        d=args.d,
        seed=args.seed,
    )
    symbols, utterances = generate(cfg, args.count)
    textio.write_symbols(symbols, args.out_syms)
    textio.write_transcripts(
        [(u.utt_id, u.reference) for u in utterances], args.out_refs
    )
    textio.write_transcripts(
        [(u.utt_id, u.transcript) for u in utterances], args.out_transcripts
    )
    textio.write_archive(
        [(u.utt_id, u.hypothesis) for u in utterances], args.out_lattices
    )
    return 0


def cmd_fst_convert(args):
    symbols = textio.read_symbols(args.syms)
    fst = textio.read_fst(args.in_fst, symbols, _semiring(args.semiring))
    if args.trim:
        fst = trim(fst)
    if args.project_output:
        fst = project_output(fst)
    if args.strip_weights:
        fst = scale_weights_to_one(fst)
    if args.remove_epsilons:
        fst = remove_epsilons(fst)
    if args.determinize:
        fst = determinize(fst)
    if args.minimize:
        fst = minimize(fst)
    textio.write_fst(fst, args.out)
    return 0


# -- argument parsing --------------------------------------------------------------


def _add_jobs(p):
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                   help="worker processes (default: all cores)")
    p.add_argument("--fail-fast", action="store_true",
                   help="stop at the first per-utterance failure")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="latkit",
        description="Lattice-combination toolkit for lightly supervised training data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("combine", help="combine transcripts with hypothesis lattices")
    p.add_argument("--transcripts", required=True)
    p.add_argument("--lattices", required=True)
    p.add_argument("--syms", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--prune-margin", type=float, default=0.0,
                   help="extra match-count slack kept beyond the best alignment")
    p.add_argument("--keep-weights", action="store_true",
                   help="keep alignment rewards instead of stripping them")
    _add_jobs(p)
    p.set_defaults(func=cmd_combine)

    p = sub.add_parser("prune", help="prune lattice paths above a cost threshold")
    p.add_argument("--lattices", required=True)
    p.add_argument("--syms", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threshold", type=float, required=True,
                   help="keep paths within this extra cost of the best")
    _add_jobs(p)
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser("rescore", help="compose lattices with a grammar FST")
    p.add_argument("--lattices", required=True)
    p.add_argument("--grammar", required=True)
    p.add_argument("--syms", required=True)
    p.add_argument("--out", required=True)
    _add_jobs(p)
    p.set_defaults(func=cmd_rescore)

    p = sub.add_parser("mer-filter", help="partition utterances by matching error rate")
    p.add_argument("--transcripts", required=True)
    p.add_argument("--decodes", required=True)
    p.add_argument("--threshold", type=float, required=True,
                   help="keep utterances with MER (percent) at or below this")
    p.add_argument("--out-kept", required=True)
    p.add_argument("--out-dropped", required=True)
    p.add_argument("--report", default=None, help="per-utterance TSV (default stdout)")
    p.set_defaults(func=cmd_mer_filter)

    p = sub.add_parser("expected-wer", help="posterior-weighted WER over lattice paths")
    p.add_argument("--lattices", required=True)
    p.add_argument("--refs", required=True)
    p.add_argument("--syms", required=True)
    p.add_argument("--out", default=None, help="report TSV (default stdout)")
    p.add_argument("--cap", type=int, default=100000,
                   help="maximum paths to enumerate exactly")
    p.add_argument("--estimate", action="store_true",
                   help="sample paths from the posterior instead of enumerating")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    _add_jobs(p)
    p.set_defaults(func=cmd_expected_wer)

    p = sub.add_parser("oracle-wer", help="best single-path WER per lattice")
    p.add_argument("--lattices", required=True)
    p.add_argument("--refs", required=True)
    p.add_argument("--syms", required=True)
    p.add_argument("--out", default=None, help="report TSV (default stdout)")
    _add_jobs(p)
    p.set_defaults(func=cmd_oracle_wer)

    p = sub.add_parser("depth", help="structural lattice depth")
    p.add_argument("--lattices", required=True)
    p.add_argument("--syms", required=True)
    p.add_argument("--out", default=None, help="report TSV (default stdout)")
    _add_jobs(p)
    p.set_defaults(func=cmd_depth)

    p = sub.add_parser("lm-train", help="estimate a back-off n-gram model")
    p.add_argument("--corpus", required=True, help="one sentence per line")
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--vocab-cap", type=int, default=None,
                   help="keep only this many most-frequent words")
    p.add_argument("--out", required=True, help="ARPA output")
    p.set_defaults(func=cmd_lm_train)

    p = sub.add_parser("lm-interpolate", help="mix two ARPA models")
    p.add_argument("--lambda", dest="lam", type=float, required=True,
                   help="weight on the in-domain model")
    p.add_argument("--in", dest="in_arpa", required=True, help="in-domain ARPA")
    p.add_argument("--bg", required=True, help="background ARPA")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lm_interpolate)

    p = sub.add_parser("lm-to-fst", help="export an ARPA model as a grammar FST")
    p.add_argument("--in", dest="in_arpa", required=True)
    p.add_argument("--syms", default=None,
                   help="shared symbol table (default: derive from the model)")
    p.add_argument("--out", required=True)
    p.add_argument("--out-syms", default=None,
                   help="write the grammar's symbol table here")
    p.set_defaults(func=cmd_lm_to_fst)

    p = sub.add_parser("word-reward", help="subtract a constant from word arcs")
    p.add_argument("--reward", type=float, required=True)
    p.add_argument("--in", dest="in_fst", required=True)
    p.add_argument("--syms", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_word_reward)

    p = sub.add_parser("simulate", help="generate synthetic reference/transcript/lattice data")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--vocab-size", type=int, default=50)
    p.add_argument("--min-length", type=int, default=8)
    p.add_argument("--max-length", type=int, default=15)
    p.add_argument("--p-delete", type=float, default=0.15)
    p.add_argument("--p-substitute", type=float, default=0.15)
    p.add_argument("--p-insert", type=float, default=0.25)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--q", type=float, default=0.6)
    p.add_argument("--d", type=float, default=0.05)
    p.add_argument("--out-refs", required=True)
    p.add_argument("--out-transcripts", required=True)
    p.add_argument("--out-lattices", required=True)
    p.add_argument("--out-syms", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fst-convert", help="read, transform and rewrite one FST")
    p.add_argument("--in", dest="in_fst", required=True)
    p.add_argument("--syms", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--semiring", choices=("tropical", "log"), default="tropical")
    p.add_argument("--trim", action="store_true")
    p.add_argument("--project-output", action="store_true")
    p.add_argument("--strip-weights", action="store_true")
    p.add_argument("--remove-epsilons", action="store_true")
    p.add_argument("--determinize", action="store_true")
    p.add_argument("--minimize", action="store_true")
    p.set_defaults(func=cmd_fst_convert)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LatkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
