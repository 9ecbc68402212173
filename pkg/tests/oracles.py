"""Independent reference implementations used to check latkit results.

Everything here is deliberately written with different algorithms than the
package: exhaustive path enumeration instead of dynamic programming,
recursive edit distance instead of the two-row DP, a brute-force search
over alignments instead of FST composition, and a standalone ARPA scorer
instead of the NGramModel machinery.  Slow but obviously correct.
"""

import math

from latkit import EPS, LOG, TROPICAL


def all_paths(fst, max_paths=1_000_000):
    """Every accepting path as (ilabels, olabels, weight), by DFS.

    Weight accumulation is plain left-to-right addition; the caller is
    responsible for keeping the machine acyclic and small.
    """
    if fst.start is None:
        return []
    paths = []
    stack = [(fst.start, (), (), 0.0)]
    while stack:
        q, ils, ols, w = stack.pop()
        fw = fst.final(q)
        if fw != math.inf:
            paths.append((ils, ols, w + fw))
            if len(paths) > max_paths:
                raise AssertionError("oracle path explosion")
        for arc in fst.arcs(q):
            stack.append(
                (arc.nextstate, ils + (arc.ilabel,), ols + (arc.olabel,), w + arc.weight)
            )
    return paths


def language(fst):
    """Map (input string, output string) -> combined weight over all paths.

    Strings have epsilons removed; parallel paths combine with the
    machine's semiring plus (min for tropical, log-add for log).
    """
    plus = min if fst.semiring is TROPICAL else LOG.plus
    table = {}
    for ils, ols, w in all_paths(fst):
        key = (
            tuple(x for x in ils if x != EPS),
            tuple(x for x in ols if x != EPS),
        )
        table[key] = plus(table[key], w) if key in table else w
    return table


def languages_equal(a, b, tol=0.0):
    """Compare two weighted languages within tol (0 = exact)."""
    la, lb = language(a), language(b)
    if set(la) != set(lb):
        return False
    return all(abs(la[k] - lb[k]) <= tol for k in la)


def edit_distance_recursive(ref, hyp):
    """(subs, dels, ins) by memoized recursion over prefixes.

    Ties are broken preferring match, then substitution, then deletion,
    then insertion, judged on the operation that closes the prefix —
    the backtrace convention — via explicit (total, kind-rank) pairs,
    independent of the iterative kernel's implementation.
    """
    memo = {}

    def go(i, j):
        if (i, j) in memo:
            return memo[(i, j)]
        if i == 0 and j == 0:
            result = (0, 0, 0)
        else:
            options = []
            if i > 0 and j > 0:
                s, d, n = go(i - 1, j - 1)
                if ref[i - 1] == hyp[j - 1]:
                    options.append((s + d + n, 0, (s, d, n)))
                else:
                    options.append((s + d + n + 1, 1, (s + 1, d, n)))
            if i > 0:
                s, d, n = go(i - 1, j)
                options.append((s + d + n + 1, 2, (s, d + 1, n)))
            if j > 0:
                s, d, n = go(i, j - 1)
                options.append((s + d + n + 1, 3, (s, d, n + 1)))
            options.sort(key=lambda t: (t[0], t[1]))
            result = options[0][2]
        memo[(i, j)] = result
        return result

    return go(len(ref), len(hyp))


def best_alignment_cost(ref, hyp, ins, dele, sub, match):
    """Minimum alignment cost between two strings under explicit costs,
    by memoized recursion (used to cross-check edit compositions)."""
    memo = {}

    def go(i, j):
        if (i, j) in memo:
            return memo[(i, j)]
        if i == len(ref) and j == len(hyp):
            result = 0.0
        elif i == len(ref):
            result = ins + go(i, j + 1)
        elif j == len(hyp):
            result = dele + go(i + 1, j)
        else:
            step = match if ref[i] == hyp[j] else sub
            result = min(
                step + go(i + 1, j + 1),
                dele + go(i + 1, j),
                ins + go(i, j + 1),
            )
        memo[(i, j)] = result
        return result

    return go(0, 0)


def combine_languages_brute(ref_ids, hyp_lang, ins, dele, sub, match,
                            unmatchable=()):
    """Oracle for the transcript/lattice combination pipeline.

    hyp_lang maps hypothesis strings (tuples of ids) to their cost.
    Returns {hyp string: best total alignment cost} where total =
    alignment cost + hypothesis cost, with unmatchable symbols never
    allowed the match step.
    """
    bad = set(unmatchable)

    def align(hyp):
        memo = {}

        def go(i, j):
            if (i, j) in memo:
                return memo[(i, j)]
            if i == len(ref_ids) and j == len(hyp):
                result = 0.0
            elif i == len(ref_ids):
                result = ins + go(i, j + 1)
            elif j == len(hyp):
                result = dele + go(i + 1, j)
            else:
                matches = ref_ids[i] == hyp[j] and hyp[j] not in bad
                step = match if matches else sub
                result = min(
                    step + go(i + 1, j + 1),
                    dele + go(i + 1, j),
                    ins + go(i, j + 1),
                )
            memo[(i, j)] = result
            return result

        return go(0, 0)

    return {h: align(h) + w for h, w in hyp_lang.items()}


def arpa_score(text, words, include_eos=True):
    """Total log10 probability of a word list under an ARPA file, by a
    standalone reader and through-backoff scorer."""
    probs, backoffs = {}, {}
    order = 0
    section = 0
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("ngram ") or line in ("\\data\\", "\\end\\"):
            continue
        if line.startswith("\\") and line.endswith("-grams:"):
            section = int(line[1:].split("-")[0])
            order = max(order, section)
            continue
        parts = line.split("\t")
        gram = tuple(parts[1].split())
        probs[gram] = float(parts[0])
        if len(parts) > 2:
            backoffs[gram] = float(parts[2])

    vocab = {g[0] for g in probs if len(g) == 1}

    def view(w):
        return w if w in vocab else "<unk>"

    def score(context, w):
        gram = context + (w,)
        if gram in probs:
            return probs[gram]
        if not context:
            raise KeyError(w)
        return backoffs.get(context, 0.0) + score(context[1:], w)

    seq = ["<s>"] + [view(w) for w in words] + (["</s>"] if include_eos else [])
    total = 0.0
    for i in range(1, len(seq)):
        context = tuple(seq[max(0, i - order + 1):i])
        total += score(context, seq[i])
    return total


def sample_paths_by_posterior(fst, n, rng):
    """Draw n paths by enumerating the whole language and sampling from
    the exact softmax posterior (cross-check for the walk-based sampler)."""
    paths = all_paths(fst)
    costs = [w for _, _, w in paths]
    best = min(costs)
    raw = [math.exp(best - w) for w in costs]
    total = sum(raw)
    post = [p / total for p in raw]
    picks = rng.choices(range(len(paths)), weights=post, k=n)
    return [paths[i] for i in picks]


def enumerate_grams(sentences, order):
    """All (history, word) n-gram counts up to order, with <s>/</s>,
    counted naively (cross-check for the estimator's count tables)."""
    counts = {}
    for sent in sentences:
        seq = ["<s>"] + list(sent) + ["</s>"]
        for k in range(1, order + 1):
            for i in range(len(seq) - k + 1):
                gram = tuple(seq[i:i + k])
                if k > 1 and gram[-1] == "<s>":
                    continue
                counts[gram] = counts.get(gram, 0) + 1
    return counts
