"""Parser for the SELECT/basic-graph-pattern subset of SPARQL.

Supported: PREFIX declarations, SELECT [DISTINCT] with '*' or an explicit
variable list, and a WHERE block of triple patterns separated by '.' with the
';' predicate-object-list shorthand. Anything else raises an explicit
unsupported-feature error naming the keyword.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .terms import BLANK, IRI, LITERAL, Term, TriplePattern, VARIABLE


class SparqlParseError(ValueError):
    pass


class UnsupportedFeatureError(SparqlParseError):
    def __init__(self, feature: str):
        super().__init__(f"unsupported SPARQL feature: {feature}")
        self.feature = feature


_UNSUPPORTED = {
    "OPTIONAL", "UNION", "FILTER", "GRAPH", "SERVICE", "BIND", "VALUES",
    "MINUS", "ORDER", "GROUP", "HAVING", "LIMIT", "OFFSET", "CONSTRUCT",
    "ASK", "DESCRIBE", "INSERT", "DELETE", "EXISTS", "NOT", "REDUCED",
    "FROM",
}

_PNAME_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_-]*)?:([A-Za-z0-9_][A-Za-z0-9_.-]*)?")
_WORD_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_VAR_RE = re.compile(r"[?$]([A-Za-z0-9_]+)")


@dataclass(frozen=True)
class BGPQuery:
    """A parsed SELECT query over a single basic graph pattern."""

    distinct: bool
    projection: tuple[str, ...] | None  # None means '*'
    patterns: tuple[TriplePattern, ...]

    def variables(self) -> tuple[str, ...]:
        """All variable names, in first occurrence order."""
        seen: dict[str, None] = {}
        for p in self.patterns:
            for t in p.positions():
                if t.is_variable:
                    seen.setdefault(t.lexical, None)
        return tuple(seen)

    def projected(self) -> tuple[str, ...]:
        return self.projection if self.projection is not None else self.variables()


_Token = tuple[str, object, int]  # (kind, value, offset)


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "#":
            j = text.find("\n", i)
            i = n if j < 0 else j + 1
            continue
        if ch == "<":
            j = text.find(">", i + 1)
            if j < 0:
                raise SparqlParseError(f"unterminated IRI at offset {i}")
            tokens.append(("iri", text[i + 1 : j], i))
            i = j + 1
            continue
        if ch in "?$":
            m = _VAR_RE.match(text, i)
            if not m:
                raise SparqlParseError(f"bad variable at offset {i}")
            tokens.append(("var", m.group(1), i))
            i = m.end()
            continue
        if ch == '"':
            j = i + 1
            while j < n:
                if text[j] == "\\":
                    j += 2
                    continue
                if text[j] == '"':
                    break
                j += 1
            if j >= n:
                raise SparqlParseError(f"unterminated literal at offset {i}")
            j += 1
            if j < n and text[j] == "@":
                while j < n and (text[j].isalnum() or text[j] in "@-"):
                    j += 1
            elif text[j : j + 2] == "^^":
                if text[j + 2 : j + 3] != "<":
                    raise SparqlParseError(
                        "only '^^<iri>' datatype syntax is supported in queries"
                    )
                k = text.find(">", j + 2)
                if k < 0:
                    raise SparqlParseError(f"unterminated datatype at offset {j}")
                j = k + 1
            tokens.append(("literal", text[i:j], i))
            i = j
            continue
        if ch in "{}.;*":
            tokens.append(("punct", ch, i))
            i += 1
            continue
        if text[i : i + 2] == "_:":
            m = re.match(r"_:([A-Za-z0-9_][A-Za-z0-9_.-]*)", text[i:])
            if not m:
                raise SparqlParseError(f"bad blank node at offset {i}")
            tokens.append(("blank", m.group(1), i))
            i += len(m.group(0))
            continue
        m = _PNAME_RE.match(text, i)
        if m and m.end() > i and ":" in text[i : m.end()]:
            tokens.append(("pname", (m.group(1) or "", m.group(2) or ""), i))
            i = m.end()
            continue
        m = _WORD_RE.match(text, i)
        if m:
            tokens.append(("word", m.group(0), i))
            i = m.end()
            continue
        m = re.match(r"[0-9][0-9.]*", text[i:])
        if m:
            tokens.append(("number", m.group(0), i))
            i += m.end()
            continue
        raise SparqlParseError(f"unexpected character {ch!r} at offset {i}")
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0
        self.prefixes: dict[str, str] = {}

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> _Token:
        tok = self.peek()
        if tok is None:
            raise SparqlParseError("unexpected end of query")
        self.pos += 1
        return tok

    def expect_word(self, word: str) -> None:
        tok = self.next()
        if tok[0] != "word" or str(tok[1]).upper() != word:
            raise SparqlParseError(f"expected {word}, got {tok[1]!r}")

    def expect_punct(self, ch: str) -> None:
        tok = self.next()
        if tok[0] != "punct" or tok[1] != ch:
            raise SparqlParseError(f"expected {ch!r}, got {tok[1]!r}")

    def resolve_pname(self, prefix: str, local: str) -> Term:
        if prefix not in self.prefixes:
            raise SparqlParseError(f"undeclared prefix {prefix!r}:")
        return Term(IRI, self.prefixes[prefix] + local)

    def term(self) -> Term:
        kind, value, offset = self.next()
        if kind == "iri":
            return Term(IRI, str(value))
        if kind == "pname":
            prefix, local = value  # type: ignore[misc]
            return self.resolve_pname(prefix, local)
        if kind == "var":
            return Term(VARIABLE, str(value))
        if kind == "literal":
            return Term(LITERAL, str(value))
        if kind == "blank":
            return Term(BLANK, str(value))
        if kind == "number":
            raise SparqlParseError(
                f"bare numeric literals are not supported; quote the value {value!r}"
            )
        raise SparqlParseError(f"expected a term, got {value!r} at offset {offset}")


def parse_sparql_select(text: str) -> BGPQuery:
    """Parse a SELECT query; prefixes are expanded, pattern order preserved."""
    tokens = _tokenize(text)
    for kind, value, _ in tokens:
        if kind == "word" and str(value).upper() in _UNSUPPORTED:
            raise UnsupportedFeatureError(str(value).upper())

    p = _Parser(tokens)
    while True:
        tok = p.peek()
        if tok and tok[0] == "word" and str(tok[1]).upper() == "PREFIX":
            p.next()
            name_tok = p.next()
            if name_tok[0] != "pname" or name_tok[1][1] != "":  # type: ignore[index]
                raise SparqlParseError("PREFIX expects 'name:' followed by an IRI")
            iri_tok = p.next()
            if iri_tok[0] != "iri":
                raise SparqlParseError("PREFIX expects an IRI in angle brackets")
            p.prefixes[name_tok[1][0]] = str(iri_tok[1])  # type: ignore[index]
        else:
            break

    p.expect_word("SELECT")
    distinct = False
    tok = p.peek()
    if tok and tok[0] == "word" and str(tok[1]).upper() == "DISTINCT":
        distinct = True
        p.next()

    projection: tuple[str, ...] | None
    tok = p.peek()
    if tok and tok[0] == "punct" and tok[1] == "*":
        p.next()
        projection = None
    else:
        names: list[str] = []
        while True:
            tok = p.peek()
            if tok and tok[0] == "var":
                names.append(str(p.next()[1]))
            else:
                break
        if not names:
            raise SparqlParseError("SELECT needs '*' or at least one variable")
        projection = tuple(names)

    p.expect_word("WHERE")
    p.expect_punct("{")

    patterns: list[TriplePattern] = []
    while True:
        tok = p.peek()
        if tok is None:
            raise SparqlParseError("unterminated WHERE block")
        if tok[0] == "punct" and tok[1] == "}":
            p.next()
            break
        subject = p.term()
        while True:
            predicate = p.term()
            obj = p.term()
            try:
                patterns.append(TriplePattern(subject, predicate, obj))
            except ValueError as exc:
                raise SparqlParseError(str(exc)) from None
            tok = p.peek()
            if tok and tok[0] == "punct" and tok[1] == ";":
                p.next()
                continue
            if tok and tok[0] == "punct" and tok[1] == ".":
                p.next()
            break

    trailing = p.peek()
    if trailing is not None:
        raise SparqlParseError(f"trailing content after query: {trailing[1]!r}")
    if not patterns:
        raise SparqlParseError("WHERE block contains no triple patterns")
    query = BGPQuery(distinct, projection, tuple(patterns))
    if projection is not None:
        available = set(query.variables())
        missing = [v for v in projection if v not in available]
        if missing:
            raise SparqlParseError(
                f"projected variables not present in patterns: {', '.join(missing)}"
            )
    return query
