"""JSON wire format shared by server and client.

Terms travel as tagged strings ("<iri>", '"literal"', "_:blank", "?var");
payloads are encoded as canonical JSON (sorted keys, compact separators) so
that identical pages always serialize to identical bytes.
"""
from __future__ import annotations

import json
from typing import Any
from urllib.parse import urlencode

from .fragments import (
    FragmentPage,
    Selector,
    StarPatternSelector,
    TripleGroup,
    TriplePatternSelector,
)
from .terms import Mapping, StarPattern, Triple, TriplePattern, parse_term


class WireFormatError(ValueError):
    pass


def encode(obj: Any) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


def decode(body: bytes | str) -> Any:
    try:
        return json.loads(body)
    except json.JSONDecodeError as exc:
        raise WireFormatError(f"invalid JSON: {exc}") from None


def mapping_to_json(m: Mapping) -> dict[str, str]:
    return {name: term.text() for name, term in m.items()}


def mapping_from_json(obj: Any) -> Mapping:
    if not isinstance(obj, dict):
        raise WireFormatError("mapping must be an object")
    try:
        return Mapping({name: parse_term(text) for name, text in obj.items()})
    except ValueError as exc:
        raise WireFormatError(str(exc)) from None


def pattern_to_json(p: TriplePattern) -> list[str]:
    return [p.subject.text(), p.predicate.text(), p.object.text()]


def pattern_from_json(obj: Any) -> TriplePattern:
    if not isinstance(obj, list) or len(obj) != 3:
        raise WireFormatError("pattern must be a [subject, predicate, object] array")
    try:
        return TriplePattern(*(parse_term(t) for t in obj))
    except ValueError as exc:
        raise WireFormatError(str(exc)) from None


def triple_from_json(obj: Any) -> Triple:
    pattern = pattern_from_json(obj)
    try:
        return pattern.to_triple()
    except ValueError as exc:
        raise WireFormatError(str(exc)) from None


def triple_to_json(t: Triple) -> list[str]:
    return [t.subject.text(), t.predicate.text(), t.object.text()]


def selector_to_json(selector: Selector) -> dict[str, Any]:
    bindings = [mapping_to_json(b) for b in selector.bindings]
    if isinstance(selector, TriplePatternSelector):
        return {"type": "tp", "pattern": pattern_to_json(selector.pattern), "bindings": bindings}
    return {
        "type": "star",
        "patterns": [pattern_to_json(p) for p in selector.star.patterns],
        "bindings": bindings,
    }


def selector_from_json(obj: Any) -> Selector:
    if not isinstance(obj, dict):
        raise WireFormatError("selector must be an object")
    sel_type = obj.get("type")
    if sel_type not in ("tp", "star"):
        raise WireFormatError(f"unknown selector type: {sel_type!r}")
    if "pattern" in obj and "patterns" in obj:
        raise WireFormatError("selector carries both 'pattern' and 'patterns'")
    raw_bindings = obj.get("bindings", [])
    if not isinstance(raw_bindings, list):
        raise WireFormatError("'bindings' must be an array")
    bindings = tuple(mapping_from_json(b) for b in raw_bindings)
    try:
        if sel_type == "tp":
            if "pattern" not in obj:
                raise WireFormatError("tp selector requires 'pattern'")
            return TriplePatternSelector(pattern_from_json(obj["pattern"]), bindings)
        if "patterns" not in obj:
            raise WireFormatError("star selector requires 'patterns'")
        patterns = obj["patterns"]
        if not isinstance(patterns, list) or not patterns:
            raise WireFormatError("'patterns' must be a non-empty array")
        star = StarPattern.of(pattern_from_json(p) for p in patterns)
        return StarPatternSelector(star, bindings)
    except ValueError as exc:
        raise WireFormatError(str(exc)) from None


def group_to_json(group: TripleGroup) -> dict[str, Any]:
    return {
        "mapping": mapping_to_json(group.mapping),
        "triples": sorted(triple_to_json(t) for t in group.triples),
    }


def group_from_json(obj: Any) -> TripleGroup:
    if not isinstance(obj, dict):
        raise WireFormatError("group must be an object")
    mapping = mapping_from_json(obj.get("mapping", {}))
    triples = obj.get("triples")
    if not isinstance(triples, list):
        raise WireFormatError("group 'triples' must be an array")
    return TripleGroup(mapping, frozenset(triple_from_json(t) for t in triples))


def page_to_json(page: FragmentPage) -> dict[str, Any]:
    return {
        "selector": selector_to_json(page.selector),
        "metadata": {
            "cnt": page.cnt,
            "page": page.page,
            "pageSize": page.page_size,
            "hasNext": page.has_next,
        },
        "controls": dict(page.controls),
        "groups": [group_to_json(g) for g in page.groups],
    }


def page_from_json(obj: Any) -> FragmentPage:
    if not isinstance(obj, dict):
        raise WireFormatError("page must be an object")
    try:
        meta = obj["metadata"]
        controls = obj["controls"]
        groups = tuple(group_from_json(g) for g in obj["groups"])
        return FragmentPage(
            page_uri=controls["self"],
            fragment_uri=controls["fragment"],
            selector=selector_from_json(obj["selector"]),
            groups=groups,
            cnt=meta["cnt"],
            page=meta["page"],
            page_size=meta["pageSize"],
            has_next=meta["hasNext"],
            controls=dict(controls),
        )
    except KeyError as exc:
        raise WireFormatError(f"page is missing field {exc}") from None


def build_tp_query(pattern: TriplePattern, page: int) -> str:
    """Query string for the GET form of the single-pattern selector."""
    return urlencode(
        [
            ("s", pattern.subject.text()),
            ("p", pattern.predicate.text()),
            ("o", pattern.object.text()),
            ("page", str(page)),
        ]
    )


def build_post_body(selector: Selector, page: int) -> bytes:
    return encode({"selector": selector_to_json(selector), "page": page})
