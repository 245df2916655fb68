"""Core RDF data model: terms, triples, patterns, and solution mappings.

Terms carry a kind tag and an opaque lexical form. Literal lexical forms keep
their full surface syntax (quotes plus any datatype/language suffix) so that
comparison and round-tripping are purely textual.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping as MappingABC

IRI = "iri"
LITERAL = "literal"
BLANK = "blank"
VARIABLE = "variable"

_LITERAL_SUFFIX_RE = re.compile(r'^(@[A-Za-z][A-Za-z0-9-]*|\^\^<[^\s<>"]+>)?$')
_BLANK_LABEL_RE = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_.-]*$")
_VAR_NAME_RE = re.compile(r"^[A-Za-z0-9_]+$")


def split_literal(lexical: str) -> tuple[str, str]:
    """Split a literal surface form into (quoted value, suffix).

    Returns the index boundaries validated; raises ValueError on malformed
    forms. The value part includes both quotes; the suffix is '' or
    '@lang' / '^^<iri>'.
    """
    if len(lexical) < 2 or lexical[0] != '"':
        raise ValueError(f"literal must start with a quote: {lexical!r}")
    i = 1
    while i < len(lexical):
        ch = lexical[i]
        if ch == "\\":
            i += 2
            continue
        if ch == '"':
            break
        i += 1
    if i >= len(lexical) or lexical[i] != '"':
        raise ValueError(f"unterminated literal: {lexical!r}")
    value, suffix = lexical[: i + 1], lexical[i + 1 :]
    if not _LITERAL_SUFFIX_RE.match(suffix):
        raise ValueError(f"malformed literal suffix: {suffix!r}")
    return value, suffix


@dataclass(frozen=True)
class Term:
    """A single RDF term or query variable."""

    kind: str
    lexical: str

    def __post_init__(self) -> None:
        if self.kind == IRI:
            if not self.lexical or any(c.isspace() for c in self.lexical):
                raise ValueError(f"invalid IRI: {self.lexical!r}")
            if "<" in self.lexical or ">" in self.lexical:
                raise ValueError(f"invalid IRI: {self.lexical!r}")
        elif self.kind == LITERAL:
            split_literal(self.lexical)
        elif self.kind == BLANK:
            if not _BLANK_LABEL_RE.match(self.lexical):
                raise ValueError(f"invalid blank node label: {self.lexical!r}")
        elif self.kind == VARIABLE:
            if not _VAR_NAME_RE.match(self.lexical):
                raise ValueError(f"invalid variable name: {self.lexical!r}")
        else:
            raise ValueError(f"unknown term kind: {self.kind!r}")

    @property
    def is_variable(self) -> bool:
        return self.kind == VARIABLE

    def text(self) -> str:
        """Canonical tagged text form, shared by the wire format and N-Triples."""
        if self.kind == IRI:
            return f"<{self.lexical}>"
        if self.kind == LITERAL:
            return self.lexical
        if self.kind == BLANK:
            return f"_:{self.lexical}"
        return f"?{self.lexical}"

    def __repr__(self) -> str:
        return f"Term({self.text()})"


def iri(value: str) -> Term:
    return Term(IRI, value)


_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def lit(value: str, *, lang: str | None = None, datatype: str | None = None) -> Term:
    """Build a literal term from a raw string value."""
    escaped = "".join(_ESCAPES.get(c, c) for c in value)
    suffix = ""
    if lang is not None:
        suffix = f"@{lang}"
    elif datatype is not None:
        suffix = f"^^<{datatype}>"
    return Term(LITERAL, f'"{escaped}"{suffix}')


def blank(label: str) -> Term:
    return Term(BLANK, label)


def var(name: str) -> Term:
    return Term(VARIABLE, name.lstrip("?"))


def parse_term(text: str) -> Term:
    """Parse the tagged text form back into a Term."""
    if not text:
        raise ValueError("empty term")
    if text[0] == "<":
        if text[-1] != ">":
            raise ValueError(f"unterminated IRI: {text!r}")
        return Term(IRI, text[1:-1])
    if text[0] == '"':
        return Term(LITERAL, text)
    if text.startswith("_:"):
        return Term(BLANK, text[2:])
    if text[0] == "?":
        return Term(VARIABLE, text[1:])
    raise ValueError(f"unrecognized term: {text!r}")


@dataclass(frozen=True)
class Triple:
    """A ground RDF statement."""

    subject: Term
    predicate: Term
    object: Term

    def __post_init__(self) -> None:
        if self.subject.kind not in (IRI, BLANK):
            raise ValueError(f"invalid triple subject in {self._txt()}")
        if self.predicate.kind != IRI:
            raise ValueError(f"invalid triple predicate in {self._txt()}")
        if self.object.kind not in (IRI, BLANK, LITERAL):
            raise ValueError(f"invalid triple object in {self._txt()}")

    def _txt(self) -> str:
        return f"({self.subject.text()} {self.predicate.text()} {self.object.text()})"

    def __repr__(self) -> str:
        return f"Triple{self._txt()}"


@dataclass(frozen=True)
class TriplePattern:
    """A triple with variables allowed in any position except literal subjects."""

    subject: Term
    predicate: Term
    object: Term

    def __post_init__(self) -> None:
        if self.subject.kind not in (IRI, BLANK, VARIABLE):
            raise ValueError(f"invalid pattern subject in {self._txt()}")
        if self.predicate.kind not in (IRI, VARIABLE):
            raise ValueError(f"invalid pattern predicate in {self._txt()}")

    def _txt(self) -> str:
        return f"({self.subject.text()} {self.predicate.text()} {self.object.text()})"

    def positions(self) -> tuple[Term, Term, Term]:
        return (self.subject, self.predicate, self.object)

    def variables(self) -> Iterator[str]:
        for t in self.positions():
            if t.is_variable:
                yield t.lexical

    def is_ground(self) -> bool:
        return not any(t.is_variable for t in self.positions())

    def to_triple(self) -> Triple:
        return Triple(self.subject, self.predicate, self.object)

    def __repr__(self) -> str:
        return f"TriplePattern{self._txt()}"


@dataclass(frozen=True)
class StarPattern:
    """A non-empty set of triple patterns sharing one subject (the root)."""

    root: Term
    patterns: tuple[TriplePattern, ...]

    def __post_init__(self) -> None:
        if not self.patterns:
            raise ValueError("star pattern must contain at least one triple pattern")
        for p in self.patterns:
            if p.subject != self.root:
                raise ValueError(
                    f"pattern {p!r} does not share the star root {self.root.text()}"
                )
        if len(set(self.patterns)) != len(self.patterns):
            raise ValueError("star pattern contains duplicate triple patterns")

    @classmethod
    def of(cls, patterns: Iterable[TriplePattern]) -> "StarPattern":
        pats = tuple(patterns)
        if not pats:
            raise ValueError("star pattern must contain at least one triple pattern")
        return cls(pats[0].subject, pats)

    def variables(self) -> tuple[str, ...]:
        """Variable names in first-occurrence order across the member patterns."""
        seen: dict[str, None] = {}
        if self.root.is_variable:
            seen[self.root.lexical] = None
        for p in self.patterns:
            for name in p.variables():
                seen.setdefault(name, None)
        return tuple(seen)

    def __len__(self) -> int:
        return len(self.patterns)


class Mapping:
    """An immutable partial assignment of variable names to ground terms."""

    __slots__ = ("_bindings", "_hash")

    def __init__(self, bindings: MappingABC[str, Term] | Iterable[tuple[str, Term]] = ()):
        items = bindings.items() if isinstance(bindings, MappingABC) else bindings
        b: dict[str, Term] = {}
        for name, term in items:
            name = name.lstrip("?")
            if term.kind == VARIABLE:
                raise ValueError(f"mapping may not bind {name!r} to a variable")
            b[name] = term
        self._bindings = b
        self._hash = hash(frozenset(b.items()))

    def get(self, name: str) -> Term | None:
        return self._bindings.get(name)

    def items(self) -> list[tuple[str, Term]]:
        return sorted(self._bindings.items())

    @property
    def variables(self) -> frozenset[str]:
        return frozenset(self._bindings)

    def __len__(self) -> int:
        return len(self._bindings)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Mapping) and self._bindings == other._bindings

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"?{k}->{v.text()}" for k, v in self.items())
        return f"Mapping({inner})"

    def extends(self, other: "Mapping") -> bool:
        """True iff every binding of `other` appears identically here."""
        return all(self._bindings.get(k) == v for k, v in other._bindings.items())

    def project(self, names: Iterable[str]) -> "Mapping":
        return Mapping(
            (n, self._bindings[n]) for n in names if n in self._bindings
        )

    def merge(self, other: "Mapping") -> "Mapping | None":
        """Union of two mappings, or None when they disagree on a shared variable."""
        merged = dict(self._bindings)
        for k, v in other._bindings.items():
            if merged.setdefault(k, v) != v:
                return None
        out = Mapping.__new__(Mapping)
        out._bindings = merged
        out._hash = hash(frozenset(merged.items()))
        return out

    def compatible(self, other: "Mapping") -> bool:
        """True iff the two mappings agree on every variable both bind."""
        a, b = self._bindings, other._bindings
        if len(b) < len(a):
            a, b = b, a
        return all(b.get(k, v) == v for k, v in a.items())


EMPTY_MAPPING = Mapping()


def substitute(mapping: Mapping, pattern: TriplePattern) -> TriplePattern | None:
    """Replace bound variables in a pattern; None when the result would be
    ill-formed (e.g. a literal pushed into subject position)."""

    def sub(t: Term) -> Term:
        if t.is_variable:
            bound = mapping.get(t.lexical)
            if bound is not None:
                return bound
        return t

    try:
        return TriplePattern(sub(pattern.subject), sub(pattern.predicate), sub(pattern.object))
    except ValueError:
        return None


def apply_mapping(mapping: Mapping, star: StarPattern) -> StarPattern:
    """Substitute bound variables throughout a star pattern.

    Patterns that collapse to the same form after substitution are merged,
    keeping the first occurrence; unbound variables are preserved.
    """
    root = star.root
    if root.is_variable:
        bound = mapping.get(root.lexical)
        if bound is not None:
            root = bound
    out: dict[TriplePattern, None] = {}
    for p in star.patterns:
        sub = substitute(mapping, p)
        if sub is None:
            raise ValueError(f"substitution into {p!r} produced an invalid pattern")
        out.setdefault(sub, None)
    return StarPattern(root, tuple(out))
