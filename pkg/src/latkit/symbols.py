"""Symbol table: bijection between word strings and integer labels.

Label 0 is reserved for epsilon ("<eps>").  Tables are immutable;
extended() returns a new table that appends symbols without disturbing
existing ids, so labels remain valid across the extension.
"""

from .errors import VocabularyError

EPSILON = "<eps>"
UNKNOWN = "<unk>"


class SymbolTable:
    __slots__ = ("_sym_to_id", "_id_to_sym")

    def __init__(self, entries):
        """entries: iterable of (symbol, id) pairs; must include ("<eps>", 0)."""
        sym_to_id = {}
        id_to_sym = {}
        for sym, idx in entries:
            if idx < 0:
                raise VocabularyError(f"negative id {idx} for symbol {sym!r}")
            if sym in sym_to_id:
                raise VocabularyError(f"duplicate symbol {sym!r}")
            if idx in id_to_sym:
                raise VocabularyError(f"duplicate id {idx} ({id_to_sym[idx]!r}, {sym!r})")
            sym_to_id[sym] = idx
            id_to_sym[idx] = sym
        if id_to_sym.get(0) != EPSILON:
            raise VocabularyError(f'id 0 must map to "{EPSILON}"')
        self._sym_to_id = sym_to_id
        self._id_to_sym = id_to_sym

    @classmethod
    def from_words(cls, words, include_unknown=True):
        """Table with <eps>=0, then (optionally <unk>) and the given words
        in order, with consecutive ids."""
        entries = [(EPSILON, 0)]
        if include_unknown:
            entries.append((UNKNOWN, 1))
        next_id = len(entries)
        for w in words:
            if w in (EPSILON, UNKNOWN):
                continue
            entries.append((w, next_id))
            next_id += 1
        return cls(entries)

    def id(self, sym):
        try:
            return self._sym_to_id[sym]
        except KeyError:
            raise VocabularyError(f"unknown symbol {sym!r}") from None

    def sym(self, idx):
        try:
            return self._id_to_sym[idx]
        except KeyError:
            raise VocabularyError(f"unknown label id {idx}") from None

    def __contains__(self, sym):
        return sym in self._sym_to_id

    def has_id(self, idx):
        return idx in self._id_to_sym

    def __len__(self):
        return len(self._sym_to_id)

    def __iter__(self):
        """Yields (symbol, id) in id order."""
        for idx in sorted(self._id_to_sym):
            yield self._id_to_sym[idx], idx

    def __eq__(self, other):
        if not isinstance(other, SymbolTable):
            return NotImplemented
        return self._sym_to_id == other._sym_to_id

    def __hash__(self):
        return hash(tuple(sorted(self._id_to_sym.items())))

    def __repr__(self):
        return f"SymbolTable({len(self)} symbols)"

    @property
    def unknown_id(self):
        """Id of the reserved <unk> symbol, or None if absent."""
        return self._sym_to_id.get(UNKNOWN)

    def id_or_unknown(self, sym):
        """Resolve sym, mapping out-of-vocabulary words to <unk>."""
        idx = self._sym_to_id.get(sym)
        if idx is not None:
            return idx
        unk = self._sym_to_id.get(UNKNOWN)
        if unk is None:
            raise VocabularyError(
                f"unknown symbol {sym!r} and no {UNKNOWN!r} in the table"
            )
        return unk

    def words(self):
        """All non-epsilon, non-<unk> symbols in id order."""
        return [s for s, i in self if i != 0 and s != UNKNOWN]

    def extended(self, symbols):
        """New table with the given symbols appended (ids continue after
        the current maximum); already-present symbols are kept as is."""
        entries = list(self)
        next_id = max(i for _, i in entries) + 1
        present = set(self._sym_to_id)
        for sym in symbols:
            if sym not in present:
                entries.append((sym, next_id))
                present.add(sym)
                next_id += 1
        return SymbolTable(entries)
