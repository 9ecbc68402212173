"""Text serialization: FSTs, symbol tables, lattice archives, transcripts.

FST text format (AT&T-style), one line per arc or final state:

    src dst ilabel olabel [cost]     arc (labels are integer ids)
    state [cost]                     final state

The first line's first field is the start state.  Omitted costs are 0.
Weights are printed with repr(), which round-trips float64 exactly; the
writer omits zero costs, so write → read → write is byte-stable.

A lattice archive holds many FSTs: each entry is a header line
"=== <utt-id>", the FST's text lines, then one blank line.  Entry order
is meaningful and preserved.

Transcript files are "utt-id w1 w2 ..." lines; symbol tables are
"symbol<TAB>id" lines.  Everything is UTF-8.
"""

import io
import os

from .errors import ArchiveError, LatkitError
from .fst import Arc, Fst, empty_fst
from .semiring import TROPICAL
from .symbols import SymbolTable


def _fmt_cost(w):
    return repr(float(w))


def fst_to_lines(fst):
    """Serialize to a list of text lines (no trailing newlines)."""
    lines = []
    if fst.is_empty():
        return lines
    start = fst.start
    if not fst.arcs(start) and not fst.is_final(start):
        # start reaches nothing: the empty language serializes to no lines
        return lines
    order = [start] + [q for q in fst.states() if q != start]
    for q in order:
        for a in fst.arcs(q):
            if a.weight == 0.0:
                lines.append(f"{q} {a.nextstate} {a.ilabel} {a.olabel}")
            else:
                lines.append(
                    f"{q} {a.nextstate} {a.ilabel} {a.olabel} {_fmt_cost(a.weight)}"
                )
        if fst.is_final(q):
            fw = fst.final(q)
            if fw == 0.0:
                lines.append(f"{q}")
            else:
                lines.append(f"{q} {_fmt_cost(fw)}")
    return lines


def fst_from_lines(lines, symbols, semiring=TROPICAL):
    """Parse FST text lines (blank lines ignored)."""
    arc_rows = []
    final_rows = []
    start = None
    max_state = -1
    for raw in lines:
        fields = raw.split()
        if not fields:
            continue
        try:
            if len(fields) in (4, 5):
                src, dst, il, ol = (int(x) for x in fields[:4])
                w = float(fields[4]) if len(fields) == 5 else 0.0
                arc_rows.append((src, il, ol, w, dst))
                max_state = max(max_state, src, dst)
            elif len(fields) in (1, 2):
                q = int(fields[0])
                w = float(fields[1]) if len(fields) == 2 else 0.0
                final_rows.append((q, w))
                max_state = max(max_state, q)
            else:
                raise ValueError(f"{len(fields)} fields")
            if start is None:
                start = int(fields[0])
        except ValueError as exc:
            raise LatkitError(f"bad FST line {raw!r}: {exc}") from None
    if start is None:
        return empty_fst(symbols, semiring)
    num_states = max_state + 1
    per_state = [[] for _ in range(num_states)]
    for src, il, ol, w, dst in arc_rows:
        per_state[src].append(Arc(il, ol, w, dst))
    finals = {}
    for q, w in final_rows:
        if q in finals:
            raise LatkitError(f"state {q} listed final twice")
        finals[q] = w
    return Fst(start, per_state, finals, symbols, semiring)


def write_fst(fst, path):
    with open(path, "w", encoding="utf-8") as fh:
        for line in fst_to_lines(fst):
            fh.write(line + "\n")


def read_fst(path, symbols, semiring=TROPICAL):
    with open(path, encoding="utf-8") as fh:
        return fst_from_lines(fh.read().splitlines(), symbols, semiring)


# -- symbol tables ---------------------------------------------------------


def write_symbols(table, path):
    with open(path, "w", encoding="utf-8") as fh:
        for sym, idx in table:
            fh.write(f"{sym}\t{idx}\n")


def read_symbols(path):
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                # tolerate space-separated tables
                parts = line.split()
            if len(parts) != 2:
                raise LatkitError(f"{path}:{lineno}: bad symbol line {line!r}")
            try:
                entries.append((parts[0], int(parts[1])))
            except ValueError:
                raise LatkitError(
                    f"{path}:{lineno}: bad symbol id {parts[1]!r}"
                ) from None
    return SymbolTable(entries)


# -- lattice archives --------------------------------------------------------


def write_archive(entries, path_or_file):
    """entries: iterable of (utt_id, fst), written in order."""
    if isinstance(path_or_file, (str, bytes, os.PathLike)):
        with open(path_or_file, "w", encoding="utf-8") as fh:
            _write_archive_file(entries, fh)
    else:
        _write_archive_file(entries, path_or_file)


def _write_archive_file(entries, fh):
    for utt_id, fst in entries:
        _check_utt_id(utt_id)
        fh.write(f"=== {utt_id}\n")
        for line in fst_to_lines(fst):
            fh.write(line + "\n")
        fh.write("\n")


def _check_utt_id(utt_id):
    if not utt_id or utt_id != utt_id.strip() or any(c.isspace() for c in utt_id):
        raise ArchiveError(f"bad utterance id {utt_id!r}")


def read_archive(path_or_file, symbols, semiring=TROPICAL):
    """Returns [(utt_id, fst)] in file order; duplicate ids are an error."""
    if isinstance(path_or_file, (str, bytes, os.PathLike)):
        with open(path_or_file, encoding="utf-8") as fh:
            return _read_archive_file(fh, symbols, semiring)
    return _read_archive_file(path_or_file, symbols, semiring)


def _read_archive_file(fh, symbols, semiring):
    entries = []
    seen = set()
    utt_id = None
    body = []
    for lineno, raw in enumerate(fh, 1):
        line = raw.rstrip("\n")
        if line.startswith("=== "):
            if utt_id is not None:
                raise ArchiveError(
                    f"line {lineno}: entry {utt_id!r} not closed by a blank line"
                )
            utt_id = line[4:].strip()
            _check_utt_id(utt_id)
            if utt_id in seen:
                raise ArchiveError(f"duplicate utterance id {utt_id!r}")
            seen.add(utt_id)
            body = []
        elif not line.strip():
            if utt_id is not None:
                entries.append((utt_id, fst_from_lines(body, symbols, semiring)))
                utt_id = None
        elif utt_id is None:
            raise ArchiveError(f"line {lineno}: content outside any entry: {line!r}")
        else:
            body.append(line)
    if utt_id is not None:
        # final entry may omit the trailing blank line
        entries.append((utt_id, fst_from_lines(body, symbols, semiring)))
    return entries


def archive_to_string(entries):
    buf = io.StringIO()
    _write_archive_file(entries, buf)
    return buf.getvalue()


def archive_from_string(text, symbols, semiring=TROPICAL):
    return _read_archive_file(io.StringIO(text), symbols, semiring)


# -- transcripts ---------------------------------------------------------------


def read_transcripts(path_or_file):
    """Returns [(utt_id, [word, ...])] in file order."""
    if isinstance(path_or_file, (str, bytes, os.PathLike)):
        with open(path_or_file, encoding="utf-8") as fh:
            return _read_transcripts_file(fh)
    return _read_transcripts_file(path_or_file)


def _read_transcripts_file(fh):
    out = []
    seen = set()
    for raw in fh:
        fields = raw.split()
        if not fields:
            continue
        utt_id, words = fields[0], fields[1:]
        if utt_id in seen:
            raise ArchiveError(f"duplicate utterance id {utt_id!r}")
        seen.add(utt_id)
        out.append((utt_id, words))
    return out


def write_transcripts(entries, path_or_file):
    if isinstance(path_or_file, (str, bytes, os.PathLike)):
        with open(path_or_file, "w", encoding="utf-8") as fh:
            _write_transcripts_file(entries, fh)
    else:
        _write_transcripts_file(entries, path_or_file)


def _write_transcripts_file(entries, fh):
    for utt_id, words in entries:
        _check_utt_id(utt_id)
        fh.write(" ".join([utt_id] + list(words)) + "\n")
