"""Immutable dictionary-encoded triple store with three index permutations.

Every term is interned to an integer id in first-appearance order; the triple
set is kept as three sorted permutations (subject-predicate-object,
predicate-object-subject, object-subject-predicate) so any bound-position
combination of a pattern can be answered by a binary-searched prefix range.
"""
from __future__ import annotations

from bisect import bisect_left
from typing import Iterable, Iterator, Sequence

from .terms import Mapping, Term, Triple, TriplePattern

_SPO = "spo"
_POS = "pos"
_OSP = "osp"

# serving permutation per (subject bound, predicate bound, object bound)
_PERM_FOR_MASK = {
    (True, True, True): _SPO,
    (True, True, False): _SPO,
    (True, False, False): _SPO,
    (True, False, True): _OSP,
    (False, True, True): _POS,
    (False, True, False): _POS,
    (False, False, True): _OSP,
    (False, False, False): _SPO,
}


class Graph:
    """A fixed set of triples; build once via build_graph, then read-only."""

    __slots__ = ("_terms", "_ids", "_spo", "_pos", "_osp")

    def __init__(
        self,
        terms: list[Term],
        ids: dict[Term, int],
        spo: list[tuple[int, int, int]],
    ):
        self._terms = terms
        self._ids = ids
        self._spo = spo
        self._pos = sorted((p, o, s) for s, p, o in spo)
        self._osp = sorted((o, s, p) for s, p, o in spo)

    def __len__(self) -> int:
        return len(self._spo)

    def term_id(self, term: Term) -> int | None:
        return self._ids.get(term)

    def index_sizes(self) -> tuple[int, int, int]:
        return (len(self._spo), len(self._pos), len(self._osp))

    def triples(self) -> Iterator[Triple]:
        """All triples in subject-predicate-object index order."""
        terms = self._terms
        for s, p, o in self._spo:
            yield Triple(terms[s], terms[p], terms[o])

    def match(
        self, pattern: TriplePattern, order: str | None = None
    ) -> tuple[list[Mapping], int]:
        """Solution mappings for a single pattern, in serving-index order.

        `order` forces a specific permutation ('spo', 'pos', 'osp'); by
        default it is chosen from the pattern's bound positions.
        """
        bound: list[int | None] = []
        for term in pattern.positions():
            if term.is_variable:
                bound.append(None)
            else:
                tid = self._ids.get(term)
                if tid is None:
                    return [], 0
                bound.append(tid)
        s, p, o = bound
        if order is None:
            order = _PERM_FOR_MASK[(s is not None, p is not None, o is not None)]
        if order == _SPO:
            index, key = self._spo, (s, p, o)
        elif order == _POS:
            index, key = self._pos, (p, o, s)
        elif order == _OSP:
            index, key = self._osp, (o, s, p)
        else:
            raise ValueError(f"unknown index order: {order!r}")

        prefix: list[int] = []
        for part in key:
            if part is None:
                break
            prefix.append(part)
        lo, hi = _prefix_range(index, prefix)

        # variable name per triple position, with repeated-variable checks
        names = [t.lexical if t.is_variable else None for t in pattern.positions()]
        terms = self._terms
        out: list[Mapping] = []
        for row in index[lo:hi]:
            if not _row_matches(row, order, key):
                continue
            s_id, p_id, o_id = _to_spo(row, order)
            bindings: dict[str, Term] = {}
            ok = True
            for name, tid in zip(names, (s_id, p_id, o_id)):
                if name is None:
                    continue
                term = terms[tid]
                if bindings.setdefault(name, term) != term:
                    ok = False
                    break
            if ok:
                out.append(Mapping(bindings))
        return out, len(out)


def _prefix_range(index: Sequence[tuple[int, int, int]], prefix: list[int]) -> tuple[int, int]:
    if not prefix:
        return 0, len(index)
    pad = 3 - len(prefix)
    lo = bisect_left(index, tuple(prefix) + (-1,) * pad)
    hi_key = prefix[:-1] + [prefix[-1] + 1]
    hi = bisect_left(index, tuple(hi_key) + (-1,) * pad)
    return lo, hi


def _row_matches(row: tuple[int, int, int], order: str, key: tuple) -> bool:
    # positions beyond the contiguous bound prefix still need checking
    for part, val in zip(key, row):
        if part is not None and part != val:
            return False
    return True


def _to_spo(row: tuple[int, int, int], order: str) -> tuple[int, int, int]:
    if order == _SPO:
        return row
    if order == _POS:
        p, o, s = row
        return s, p, o
    o, s, p = row
    return s, p, o


def build_graph(triples: Iterable[Triple]) -> Graph:
    """Deduplicate, intern, and index a triple list into an immutable Graph."""
    terms: list[Term] = []
    ids: dict[Term, int] = {}

    def intern(term: Term) -> int:
        tid = ids.get(term)
        if tid is None:
            tid = len(terms)
            ids[term] = tid
            terms.append(term)
        return tid

    seen: set[tuple[int, int, int]] = set()
    rows: list[tuple[int, int, int]] = []
    for t in triples:
        if not isinstance(t, Triple):
            raise ValueError(f"not a valid triple: {t!r}")
        row = (intern(t.subject), intern(t.predicate), intern(t.object))
        if row not in seen:
            seen.add(row)
            rows.append(row)
    rows.sort()
    return Graph(terms, ids, rows)


def match_pattern(g: Graph, pattern: TriplePattern, order: str | None = None) -> tuple[list[Mapping], int]:
    """Single-pattern matching primitive; see Graph.match."""
    return g.match(pattern, order=order)
