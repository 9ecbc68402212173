"""Back-off n-gram language models.

Estimation uses interpolated Witten–Bell smoothing, which is free of
tuning parameters and keeps every conditional distribution summing to
one exactly:

    P(w | h) = (c(h,w) + T(h) · P(w | h′)) / (c(h) + T(h))

with T(h) the number of distinct continuations of h, h′ the history
with its oldest word dropped, and a uniform distribution at the bottom.
Models store log10 scores (the ARPA convention) keyed by word strings;
sentence boundaries <s> and </s> live in the score tables but are not
lattice symbols — </s> surfaces as final weights in the exported
grammar and <s> only ever appears as context.

A model can be exported as a grammar acceptor whose states are n-gram
histories.  The default export gives every state one arc per
predictable word, costed through back-off, so a word sequence has
exactly one accepting path and its cost equals the scorer's output.
Encoding back-off structurally as epsilon arcs instead keeps the
machine sparse but lets shortest paths take back-off detours that
undercut the scorer — a detour pays the back-off penalty once yet may
reach a history whose later predictions are cheaper, so per-arc cost
domination does not bound the gap.  The epsilon form is available for
callers that want the compact machine and can tolerate approximate
costs.
"""

import math
from collections import Counter

from .errors import ArpaFormatError, ConfigError, LatkitError, VocabularyError
from .fst import EPS, Arc, Fst
from .semiring import TROPICAL
from .symbols import EPSILON, UNKNOWN, SymbolTable

BOS = "<s>"
EOS = "</s>"
RESERVED = (EPSILON, UNKNOWN, BOS, EOS)

LN10 = math.log(10.0)
BOS_LOG10 = -99.0  # conventional stand-in for "never predict <s>"


class NGramModel:
    """Immutable back-off model: probs[(context, word)] and
    backoffs[context] in log10, contexts as word-string tuples."""

    def __init__(self, order, probs, backoffs, vocab):
        if order < 1:
            raise ConfigError(f"order must be >= 1, got {order}")
        for (context, word), lp in probs.items():
            if len(context) >= order:
                raise ConfigError(
                    f"entry {context + (word,)} longer than order {order}"
                )
            if lp > 0.0 or math.isnan(lp) or lp == -math.inf:
                raise ConfigError(
                    f"P({word}|{' '.join(context)}) has log10 {lp}, not in (0, 1]"
                )
        for context, bow in backoffs.items():
            if math.isnan(bow) or math.isinf(bow):
                raise ConfigError(f"back-off weight for {context} is {bow}")
        self.order = order
        self.probs = dict(probs)
        self.backoffs = dict(backoffs)
        self.vocab = vocab

    def predicted_vocabulary(self):
        """Everything the model can predict: words, <unk>, </s>."""
        return tuple(self.vocab.words()) + (UNKNOWN, EOS)

    def view(self, word):
        """Map a token to the model's universe (<unk> when unknown)."""
        if word in (BOS, EOS):
            return word
        if word == UNKNOWN or word in self.vocab:
            return word
        return UNKNOWN

    def cond_log10(self, word, context=()):
        """log10 P(word | context) through back-off.  The context is
        truncated to the model order; out-of-vocabulary tokens on
        either side are read as <unk>."""
        word = self.view(word)
        if word == BOS:
            return BOS_LOG10
        context = tuple(self.view(t) for t in context)[-(self.order - 1):] \
            if self.order > 1 else ()
        acc = 0.0
        while True:
            lp = self.probs.get((context, word))
            if lp is not None:
                return acc + lp
            if not context:
                raise VocabularyError(f"model cannot score {word!r}")
            acc += self.backoffs.get(context, 0.0)
            context = context[1:]

    def sequence_log10(self, words, include_eos=True):
        """log10 P(w1..wk [</s>] | <s>): the sentence score."""
        history = (BOS,)
        total = 0.0
        for w in words:
            total += self.cond_log10(w, history)
            history = history + (self.view(w),)
        if include_eos:
            total += self.cond_log10(EOS, history)
        return total

    def perplexity(self, sentences):
        """Per-token perplexity over tokenized sentences, </s> included."""
        total = 0.0
        count = 0
        for words in sentences:
            total += self.sequence_log10(words, include_eos=True)
            count += len(words) + 1
        if count == 0:
            raise ConfigError("perplexity of an empty corpus")
        return 10.0 ** (-total / count)


def estimate(corpus, order=3, vocab_cap=None):
    """Witten–Bell back-off model from tokenized sentences.

    The vocabulary keeps the vocab_cap most frequent words (ties broken
    alphabetically); everything else becomes <unk>.  Reserved tokens
    (<s>, </s>, <eps>, <unk>) occurring in the corpus are read as
    <unk>."""
    sentences = [list(s) for s in corpus if list(s)]
    if not sentences:
        raise ConfigError("empty corpus")
    if vocab_cap is not None and vocab_cap < 1:
        raise ConfigError(f"vocab_cap must be >= 1, got {vocab_cap}")

    unigram = Counter()
    for s in sentences:
        for w in s:
            unigram[w if w not in RESERVED else UNKNOWN] += 1
    unigram.pop(UNKNOWN, None)
    ranked = sorted(unigram.items(), key=lambda kv: (-kv[1], kv[0]))
    if vocab_cap is not None:
        ranked = ranked[:vocab_cap]
    kept = sorted(w for w, _ in ranked)
    vocab = SymbolTable.from_words(kept)
    in_vocab = set(kept)

    def normalize(w):
        return w if w in in_vocab else UNKNOWN

    counts = Counter()
    for s in sentences:
        padded = [BOS] + [normalize(w) for w in s] + [EOS]
        for k in range(1, order + 1):
            for i in range(len(padded) - k + 1):
                gram = tuple(padded[i : i + k])
                if gram[-1] == BOS and k > 1:
                    continue
                counts[gram] += 1

    # history totals and distinct-continuation counts
    totals = Counter()
    distinct = Counter()
    for gram, c in counts.items():
        if gram[-1] == BOS:
            continue  # <s> is never predicted
        h = gram[:-1]
        totals[h] += c
        distinct[h] += 1

    v_pred = kept + [UNKNOWN, EOS]
    uniform = 1.0 / len(v_pred)

    # interpolated probabilities, bottom-up by history length
    probs10 = {}
    prob_cache = {}

    def interp(h, w):
        """P(w|h) of the interpolated model (probability domain)."""
        key = (h, w)
        p = prob_cache.get(key)
        if p is not None:
            return p
        if not h:
            base = uniform
        else:
            base = interp(h[1:], w)
        c_hw = counts.get(h + (w,), 0)
        t = distinct.get(h, 0)
        tot = totals.get(h, 0)
        if t == 0:
            p = base
        else:
            p = (c_hw + t * base) / (tot + t)
        prob_cache[key] = p
        return p

    for w in v_pred:
        probs10[((), w)] = math.log10(interp((), w))
    probs10[((), BOS)] = BOS_LOG10
    for gram in sorted(counts, key=len):
        if len(gram) < 2 or gram[-1] == BOS:
            continue
        h, w = gram[:-1], gram[-1]
        probs10[(h, w)] = math.log10(interp(h, w))

    backoffs10 = {}
    for h in totals:
        if not h or len(h) >= order:
            continue
        bow = distinct[h] / (totals[h] + distinct[h])
        backoffs10[h] = math.log10(bow)

    return NGramModel(order, probs10, backoffs10, vocab)


def interpolate(in_domain, background, lam):
    """Mix two back-off models: P(w|h) = λ·P_in + (1−λ)·P_bg, evaluated
    through each model's back-off, re-encoded as one back-off model over
    the union of the explicit n-grams.

    Vocabularies merge; each model scores the other's extra words by
    splitting its own <unk> mass uniformly across them (plus <unk>
    itself), which keeps every conditional distribution summing to one
    exactly.  Back-off weights are recomputed bottom-up so the merged
    model normalizes."""
    if not 0.0 <= lam <= 1.0:
        raise ConfigError(f"interpolation weight must be in [0, 1], got {lam}")
    # the mixture degenerates to one operand at the endpoints; returning
    # it directly keeps the identity exact (re-encoding would perturb
    # recomputed back-off weights in the last float digits)
    if lam == 1.0:
        return in_domain
    if lam == 0.0:
        return background
    order = max(in_domain.order, background.order)
    union_words = sorted(set(in_domain.vocab.words()) | set(background.vocab.words()))
    vocab = SymbolTable.from_words(union_words)

    def make_scorer(model):
        missing = [w for w in union_words if w not in model.vocab]
        lshare = -math.log10(len(missing) + 1.0)

        def log10p(w, h):
            lp = model.cond_log10(w, h)
            if missing and w != EOS and model.view(w) == UNKNOWN:
                lp += lshare
            return lp

        return log10p

    l_in = make_scorer(in_domain)
    l_bg = make_scorer(background)

    # endpoints stay in the log domain so λ ∈ {0, 1} reproduces the
    # surviving model's scores bit for bit
    if lam == 1.0:
        mixed10 = l_in
    elif lam == 0.0:
        mixed10 = l_bg
    else:
        def mixed10(w, h):
            return math.log10(
                lam * 10.0 ** l_in(w, h) + (1.0 - lam) * 10.0 ** l_bg(w, h)
            )

    grams = set()
    for model in (in_domain, background):
        for (h, w) in model.probs:
            if w == BOS:
                continue
            grams.add((h, w))
    # root entries must cover the whole merged prediction vocabulary
    for w in union_words + [UNKNOWN, EOS]:
        grams.add(((), w))

    probs10 = {}
    for h, w in sorted(grams, key=lambda hw: (len(hw[0]), hw[0], hw[1])):
        probs10[(h, w)] = mixed10(w, h)
    probs10[((), BOS)] = BOS_LOG10

    by_context = {}
    for (h, w) in probs10:
        if w != BOS:
            by_context.setdefault(h, []).append(w)

    merged = NGramModel(order, probs10, {}, vocab)
    backoffs10 = {}
    for h in sorted((h for h in by_context if h), key=lambda h: (len(h), h)):
        seen = by_context[h]
        num = 1.0 - sum(10.0 ** probs10[(h, w)] for w in seen)
        den = 1.0 - sum(10.0 ** merged.cond_log10(w, h[1:]) for w in seen)
        if den <= 1e-12 or num <= 0.0:
            # explicit entries exhaust the mass; back-off is unreachable
            backoffs10[h] = 0.0
        else:
            backoffs10[h] = math.log10(num / den)
        merged.backoffs[h] = backoffs10[h]
    return NGramModel(order, probs10, backoffs10, vocab)


# -- grammar export ------------------------------------------------------------


def to_grammar_fst(model, symbols=None, backoff_arcs=False):
    """Acceptor over the model's words with one state per stored
    history.  By default each state carries one arc per predictable
    word at the full through-back-off cost −ln P(w|h), landing on the
    longest stored suffix of h+(w,), with −ln P(</s>|h) as the final
    weight; a word sequence then has exactly one accepting path and its
    cost matches the scorer.  With backoff_arcs=True only explicitly
    stored continuations get word arcs and back-off becomes an epsilon
    arc at −ln(bow) to the shortened history: far fewer arcs, but
    shortest paths may mix back-off detours that score below the exact
    value.  Either way there is at most one word arc per (state, word).
    symbols, when given, must contain every model word."""
    if symbols is None:
        symbols = model.vocab
    else:
        missing = [w for w in model.vocab.words() if w not in symbols]
        if missing:
            raise VocabularyError(
                f"grammar words missing from the symbol table: {missing[:5]}"
            )

    contexts = {h for (h, _w) in model.probs}
    if () not in contexts:
        raise LatkitError("model has no root entries; cannot export a grammar")
    if not backoff_arcs:
        # A stored back-off weight at a history with no explicit
        # continuations still shifts scores passing through it, so such
        # histories must be states too or resolution would skip them.
        contexts |= {h for h in model.backoffs if len(h) < model.order}
        # Close under prefixes: following arcs state by state then
        # lands on the same history the scorer tracks, even for models
        # whose stored histories are not already closed.
        contexts |= {h[:k] for h in contexts for k in range(len(h))}
    states = sorted(contexts, key=lambda h: (len(h), h))
    state_id = {h: i for i, h in enumerate(states)}

    def resolve(history):
        """Longest suffix of the history that is a grammar state."""
        history = history[-(model.order - 1):] if model.order > 1 else ()
        while history not in state_id:
            history = history[1:]
        return state_id[history]

    arcs = [[] for _ in states]
    finals = {}
    if backoff_arcs:
        for (h, w), lp in sorted(model.probs.items()):
            src = state_id[h]
            if w == BOS:
                continue
            if w == EOS:
                finals[src] = -lp * LN10
                continue
            wid = symbols.id_or_unknown(w)
            arcs[src].append(Arc(wid, wid, -lp * LN10, resolve(h + (w,))))
        for h, bow in sorted(model.backoffs.items(),
                             key=lambda kv: (len(kv[0]), kv[0])):
            if h and h in state_id:
                arcs[state_id[h]].append(Arc(EPS, EPS, -bow * LN10,
                                             state_id[h[1:]]))
        for h in states:
            # unreached back-off (no stored weight) still needs its escape
            if h and h not in model.backoffs:
                arcs[state_id[h]].append(Arc(EPS, EPS, 0.0, state_id[h[1:]]))
    else:
        predictable = list(model.vocab.words())
        if ((), UNKNOWN) in model.probs:
            predictable.append(UNKNOWN)
        for h in states:
            src = state_id[h]
            for w in predictable:
                wid = symbols.id_or_unknown(w)
                cost = -model.cond_log10(w, h) * LN10
                arcs[src].append(Arc(wid, wid, cost, resolve(h + (w,))))
            finals[src] = -model.cond_log10(EOS, h) * LN10

    start = state_id.get((BOS,), state_id[()])
    return Fst(start, arcs, finals, symbols, TROPICAL)


def apply_word_reward(g, reward):
    """Subtract a constant from every arc with a non-epsilon output
    label; epsilon arcs and final weights are untouched.  Rewarding
    words this way offsets the model's bias toward short paths."""
    if reward < 0:
        raise ConfigError(f"word reward must be >= 0, got {reward}")
    arcs = [
        [
            Arc(a.ilabel, a.olabel,
                a.weight - reward if a.olabel != EPS else a.weight,
                a.nextstate)
            for a in g.arcs(q)
        ]
        for q in g.states()
    ]
    return g.replaced(arcs=arcs)


# -- ARPA text format -----------------------------------------------------------


def write_arpa(model):
    """Serialize to ARPA text.  Scores print with repr(), so reading
    the output back reproduces them bit-exactly."""
    by_order = {}
    for (h, w), lp in model.probs.items():
        by_order.setdefault(len(h) + 1, {})[h + (w,)] = lp
    lines = ["\\data\\"]
    for k in range(1, model.order + 1):
        lines.append(f"ngram {k}={len(by_order.get(k, {}))}")
    lines.append("")
    for k in range(1, model.order + 1):
        lines.append(f"\\{k}-grams:")
        section = by_order.get(k, {})
        for gram in sorted(section):
            lp = section[gram]
            bow = model.backoffs.get(gram)
            text = f"{_fmt(lp)}\t{' '.join(gram)}"
            if bow is not None:
                text += f"\t{_fmt(bow)}"
            lines.append(text)
        lines.append("")
    lines.append("\\end\\")
    return "\n".join(lines) + "\n"


def _fmt(x):
    return repr(float(x))


def read_arpa(text):
    """Parse ARPA text into a model.  Section counts must match the
    lines emitted; errors carry the offending line number.  A missing
    back-off field means back-off weight 1 (log 0)."""
    lines = text.splitlines()
    counts = {}
    probs = {}
    backoffs = {}
    section = None  # current n-gram order
    seen = Counter()
    state = "preamble"
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        if state == "preamble":
            if line == "\\data\\":
                state = "data"
            continue
        if line == "\\end\\":
            state = "done"
            break
        if state == "data":
            if line.startswith("ngram "):
                try:
                    k, n = line[6:].split("=")
                    counts[int(k)] = int(n)
                except ValueError:
                    raise ArpaFormatError(f"bad ngram count {line!r}", lineno) from None
                continue
            state = "grams"
        if line.startswith("\\") and line.endswith("-grams:"):
            try:
                section = int(line[1:-7])
            except ValueError:
                raise ArpaFormatError(f"bad section header {line!r}", lineno) from None
            if section not in counts:
                raise ArpaFormatError(
                    f"section \\{section}-grams: not declared in \\data\\", lineno
                )
            continue
        if state != "grams" or section is None:
            raise ArpaFormatError(f"unexpected line {line!r}", lineno)
        fields = line.split()
        if len(fields) == section + 1:
            lp, gram, bow = fields[0], fields[1:], None
        elif len(fields) == section + 2:
            lp, gram, bow = fields[0], fields[1:-1], fields[-1]
        else:
            raise ArpaFormatError(
                f"expected {section}-gram line, got {len(fields)} fields", lineno
            )
        try:
            lp = float(lp)
            bow = float(bow) if bow is not None else None
        except ValueError:
            raise ArpaFormatError(f"bad score in {line!r}", lineno) from None
        gram = tuple(gram)
        probs[(gram[:-1], gram[-1])] = lp
        if bow is not None:
            backoffs[gram] = bow
        seen[section] += 1
    if state != "done":
        raise ArpaFormatError("missing \\end\\ marker", len(lines))
    for k, n in counts.items():
        if seen.get(k, 0) != n:
            raise ArpaFormatError(
                f"\\data\\ declares {n} {k}-grams, file has {seen.get(k, 0)}"
            )
    if not counts:
        raise ArpaFormatError("no \\data\\ section")
    order = max(counts)
    words = sorted(
        w for (h, w) in probs if not h and w not in RESERVED
    )
    vocab = SymbolTable.from_words(words)
    return NGramModel(order, probs, backoffs, vocab)
