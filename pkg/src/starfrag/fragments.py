"""Selector functions, fragment construction, and deterministic paging.

A selector applied to a graph yields an ordered sequence of triple groups;
each group is the set of ground triples produced by one solution mapping of
the selector's pattern(s). Fragments carry an exact group count and the
hypermedia controls needed to walk their pages.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable

from .graph import Graph
from .terms import (
    Mapping,
    StarPattern,
    Triple,
    TriplePattern,
    apply_mapping,
    substitute,
)

DEFAULT_PAGE_SIZE = 50
MAX_OMEGA = 30


def _check_bindings(bindings: tuple[Mapping, ...]) -> None:
    if len(set(bindings)) != len(bindings):
        raise ValueError("bindings sequence must contain distinct mappings")


@dataclass(frozen=True)
class TriplePatternSelector:
    """Single-pattern selector; with bindings this is the restricted variant."""

    pattern: TriplePattern
    bindings: tuple[Mapping, ...] = ()

    def __post_init__(self) -> None:
        _check_bindings(self.bindings)

    @property
    def kind(self) -> str:
        return "brtp" if self.bindings else "tp"

    @property
    def star(self) -> StarPattern:
        return StarPattern(self.pattern.subject, (self.pattern,))


@dataclass(frozen=True)
class StarPatternSelector:
    """Star-shaped selector restricted by an (optionally empty) bindings sequence."""

    star: StarPattern
    bindings: tuple[Mapping, ...] = ()

    def __post_init__(self) -> None:
        _check_bindings(self.bindings)

    @property
    def kind(self) -> str:
        return "star"


Selector = TriplePatternSelector | StarPatternSelector


@dataclass(frozen=True)
class TripleGroup:
    """The ground triples of one solution mapping, with that mapping."""

    mapping: Mapping
    triples: frozenset[Triple]


@dataclass(frozen=True, eq=True)
class Fragment:
    uri: str
    selector: Selector
    groups: tuple[TripleGroup, ...]
    cnt: int
    controls: dict[str, str]


@dataclass(frozen=True)
class FragmentPage:
    page_uri: str
    fragment_uri: str
    selector: Selector
    groups: tuple[TripleGroup, ...]
    cnt: int
    page: int
    page_size: int
    has_next: bool
    controls: dict[str, str]


def select_star(
    g: Graph, star: StarPattern, omega: Iterable[Mapping] = ()
) -> list[TripleGroup]:
    """Evaluate a star pattern over the graph, optionally bindings-restricted.

    One group per solution mapping; with a non-empty bindings sequence only
    mappings extending at least one binding survive. A binding over variables
    outside the star can never be extended and therefore eliminates itself.
    Groups come out in nested index order of the member patterns, which fixes
    paging across requests.
    """
    omega = tuple(omega)
    star_vars = set(star.variables())
    relevant: tuple[Mapping, ...] | None = None
    if omega:
        relevant = tuple(b for b in omega if set(b.variables) <= star_vars)
        if not relevant:
            return []

    patterns = star.patterns
    groups: list[TripleGroup] = []

    def compatible(acc: Mapping) -> bool:
        return any(all(acc.get(k) in (None, v) for k, v in b.items()) for b in relevant)

    def walk(i: int, acc: Mapping) -> None:
        if relevant is not None and not compatible(acc):
            return
        if i == len(patterns):
            ground = apply_mapping(acc, star)
            groups.append(
                TripleGroup(acc, frozenset(p.to_triple() for p in ground.patterns))
            )
            return
        sub = substitute(acc, patterns[i])
        if sub is None:
            return
        matches, _ = g.match(sub)
        for ext in matches:
            nxt = acc.merge(ext)
            if nxt is not None:
                walk(i + 1, nxt)

    walk(0, Mapping())
    return groups


def select_triple_pattern(
    g: Graph, pattern: TriplePattern, omega: Iterable[Mapping] = ()
) -> list[TripleGroup]:
    """Single-pattern selector: exactly the singleton-star evaluation."""
    return select_star(g, StarPattern(pattern.subject, (pattern,)), omega)


def selector_digest(selector: Selector) -> str:
    """Stable short digest of a selector, used to mint fragment URIs."""
    if isinstance(selector, TriplePatternSelector):
        parts = ["tp", _pattern_key(selector.pattern)]
    else:
        parts = ["star"] + [_pattern_key(p) for p in selector.star.patterns]
    for b in selector.bindings:
        parts.append(",".join(f"{k}={v.text()}" for k, v in b.items()))
    raw = "|".join(parts).encode("utf-8")
    return hashlib.sha256(raw).hexdigest()[:16]


def _pattern_key(p: TriplePattern) -> str:
    return f"{p.subject.text()} {p.predicate.text()} {p.object.text()}"


def make_fragment(source_uri: str, selector: Selector, g: Graph) -> Fragment:
    """Materialize the full selector result with its exact cardinality."""
    if isinstance(selector, TriplePatternSelector):
        groups = select_triple_pattern(g, selector.pattern, selector.bindings)
    else:
        groups = select_star(g, selector.star, selector.bindings)
    fragment_uri = f"{source_uri}/fragment?sel={selector_digest(selector)}"
    controls = {
        "collection": source_uri,
        "fragmentTemplate": f"{source_uri}/fragment{{?s,p,o,page}}",
        "fragment": fragment_uri,
    }
    return Fragment(fragment_uri, selector, tuple(groups), len(groups), controls)


def paginate(fragment: Fragment, page: int, page_size: int = DEFAULT_PAGE_SIZE) -> FragmentPage:
    """Slice a fragment into its `page`-th page (1-based).

    Pages beyond the data are empty with has_next false, so paging loops
    terminate uniformly.
    """
    if page < 1:
        raise ValueError("page numbers start at 1")
    if page_size < 1:
        raise ValueError("page size must be positive")
    start = (page - 1) * page_size
    groups = fragment.groups[start : start + page_size]
    has_next = fragment.cnt > page * page_size
    page_uri = f"{fragment.uri}&page={page}"
    controls = dict(fragment.controls)
    controls["self"] = page_uri
    if has_next:
        controls["nextPage"] = f"{fragment.uri}&page={page + 1}"
    return FragmentPage(
        page_uri=page_uri,
        fragment_uri=fragment.uri,
        selector=fragment.selector,
        groups=groups,
        cnt=fragment.cnt,
        page=page,
        page_size=page_size,
        has_next=has_next,
        controls=controls,
    )
