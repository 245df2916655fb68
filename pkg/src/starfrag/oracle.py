"""Brute-force reference evaluation used by tests and query generation.

Deliberately independent of the indexed store: patterns are matched by linear
scans over a plain triple list and joined by enumerating matching-triple
combinations with unification. Slow, simple, and trusted.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from .terms import Mapping, StarPattern, Term, Triple, TriplePattern


def unify(pattern: TriplePattern, triple: Triple, acc: Mapping) -> Mapping | None:
    """Extend `acc` so that the pattern matches the triple, or None."""
    bindings: dict[str, Term] = {}
    for pt, tt in zip(pattern.positions(), (triple.subject, triple.predicate, triple.object)):
        if pt.is_variable:
            known = acc.get(pt.lexical) or bindings.get(pt.lexical)
            if known is None:
                bindings[pt.lexical] = tt
            elif known != tt:
                return None
        elif pt != tt:
            return None
    return acc.merge(Mapping(bindings))


def scan_matches(triples: Sequence[Triple], pattern: TriplePattern) -> list[Triple]:
    """All triples matching the pattern, by full linear scan."""
    out = []
    for t in triples:
        if unify(pattern, t, Mapping()) is not None:
            out.append(t)
    return out


def oracle_bgp(triples: Sequence[Triple], patterns: Sequence[TriplePattern]) -> list[Mapping]:
    """All solution mappings of a conjunctive pattern set.

    Enumerates combinations of per-pattern matching triples (precomputed by
    linear scan), abandoning a combination as soon as unification fails.
    """
    triples = list(triples)
    candidates = [scan_matches(triples, p) for p in patterns]
    results: list[Mapping] = []

    def extend(i: int, acc: Mapping) -> None:
        if i == len(patterns):
            results.append(acc)
            return
        for t in candidates[i]:
            nxt = unify(patterns[i], t, acc)
            if nxt is not None:
                extend(i + 1, nxt)

    extend(0, Mapping())
    return results


def oracle_star(
    triples: Sequence[Triple], star: StarPattern, omega: Iterable[Mapping] = ()
) -> set[Mapping]:
    """Reference result of the star-shaped selector as a set of mappings.

    With a non-empty bindings sequence, a mapping survives only when it
    strictly extends at least one of the given bindings.
    """
    mappings = set(oracle_bgp(triples, star.patterns))
    omega = tuple(omega)
    if not omega:
        return mappings
    return {m for m in mappings if any(m.extends(b) for b in omega)}


def oracle_rows(
    triples: Sequence[Triple],
    patterns: Sequence[TriplePattern],
    projection: Sequence[str],
    distinct: bool,
) -> list[Mapping]:
    """Projected (and optionally deduplicated) result rows of a BGP query."""
    rows = [m.project(projection) for m in oracle_bgp(triples, patterns)]
    if distinct:
        seen: set[Mapping] = set()
        deduped = []
        for r in rows:
            if r not in seen:
                seen.add(r)
                deduped.append(r)
        rows = deduped
    return rows
