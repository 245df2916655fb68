"""Line-oriented N-Triples parsing and serialization.

Literal bodies are kept verbatim (escape sequences untouched) so that a
parse/serialize round trip is the identity on the triple set.
"""
from __future__ import annotations

from typing import Iterable

from .terms import BLANK, IRI, LITERAL, Term, Triple, split_literal


class NTriplesParseError(ValueError):
    """Raised for a malformed statement; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class _LineScanner:
    def __init__(self, line: str, line_no: int):
        self.line = line
        self.pos = 0
        self.line_no = line_no

    def error(self, message: str) -> NTriplesParseError:
        return NTriplesParseError(self.line_no, message)

    def skip_ws(self) -> None:
        while self.pos < len(self.line) and self.line[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        return self.pos >= len(self.line)

    def peek(self) -> str:
        return self.line[self.pos] if self.pos < len(self.line) else ""

    def read_iri(self) -> Term:
        start = self.pos
        end = self.line.find(">", start + 1)
        if end < 0:
            raise self.error("unterminated IRI")
        body = self.line[start + 1 : end]
        self.pos = end + 1
        try:
            return Term(IRI, body)
        except ValueError as exc:
            raise self.error(str(exc)) from None

    def read_blank(self) -> Term:
        start = self.pos + 2
        end = start
        while end < len(self.line) and not self.line[end].isspace():
            end += 1
        label = self.line[start:end]
        self.pos = end
        try:
            return Term(BLANK, label)
        except ValueError as exc:
            raise self.error(str(exc)) from None

    def read_literal(self) -> Term:
        start = self.pos
        i = start + 1
        while i < len(self.line):
            ch = self.line[i]
            if ch == "\\":
                i += 2
                continue
            if ch == '"':
                break
            i += 1
        if i >= len(self.line):
            raise self.error("unterminated literal")
        i += 1  # past the closing quote
        if i < len(self.line) and self.line[i] == "@":
            while i < len(self.line) and not self.line[i].isspace():
                i += 1
        elif self.line[i : i + 2] == "^^":
            end = self.line.find(">", i)
            if end < 0:
                raise self.error("unterminated literal datatype")
            i = end + 1
        surface = self.line[start:i]
        self.pos = i
        try:
            split_literal(surface)
        except ValueError as exc:
            raise self.error(str(exc)) from None
        return Term(LITERAL, surface)

    def read_term(self, *, allow_literal: bool) -> Term:
        self.skip_ws()
        ch = self.peek()
        if ch == "<":
            return self.read_iri()
        if ch == "_" and self.line[self.pos : self.pos + 2] == "_:":
            return self.read_blank()
        if ch == '"':
            if not allow_literal:
                raise self.error("literal not allowed in this position")
            return self.read_literal()
        if not ch:
            raise self.error("unexpected end of statement")
        raise self.error(f"unexpected character {ch!r}")


def parse_ntriples(text: str | Iterable[str]) -> list[Triple]:
    """Parse N-Triples text into a list of triples, one per statement line.

    Duplicate statements are retained; deduplication happens at graph build.
    Raises NTriplesParseError (with line number) on the first malformed line.
    """
    lines = text.splitlines() if isinstance(text, str) else text
    triples: list[Triple] = []
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        sc = _LineScanner(raw, line_no)
        s = sc.read_term(allow_literal=False)
        sc.skip_ws()
        if sc.peek() != "<":
            raise sc.error("predicate must be an IRI")
        p = sc.read_iri()
        o = sc.read_term(allow_literal=True)
        sc.skip_ws()
        if sc.peek() != ".":
            raise sc.error("expected '.' terminating the statement")
        sc.pos += 1
        sc.skip_ws()
        if not sc.at_end() and sc.peek() != "#":
            raise sc.error("trailing content after '.'")
        try:
            triples.append(Triple(s, p, o))
        except ValueError as exc:
            raise sc.error(str(exc)) from None
    return triples


def serialize_triple(t: Triple) -> str:
    return f"{t.subject.text()} {t.predicate.text()} {t.object.text()} ."


def serialize_ntriples(triples: Iterable[Triple]) -> str:
    """One statement per line, trailing newline when non-empty."""
    lines = [serialize_triple(t) for t in triples]
    return "\n".join(lines) + ("\n" if lines else "")
