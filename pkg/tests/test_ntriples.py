from __future__ import annotations

import random

import pytest

from starfrag.ntriples import NTriplesParseError, parse_ntriples, serialize_ntriples
from starfrag.terms import blank, iri, lit

from .conftest import G0_TEXT


def test_parse_iri_statement():
    triples = parse_ntriples("<http://ex/alice> <http://ex/country> <http://ex/Germany> .")
    assert len(triples) == 1
    t = triples[0]
    assert (t.subject, t.predicate, t.object) == (
        iri("http://ex/alice"),
        iri("http://ex/country"),
        iri("http://ex/Germany"),
    )


def test_parse_literal_statement():
    triples = parse_ntriples('<http://ex/alice> <http://ex/birthDate> "1970" .')
    assert len(triples) == 1
    assert triples[0].object == lit("1970")


def test_parse_missing_object_is_an_error():
    with pytest.raises(NTriplesParseError) as err:
        parse_ntriples("<http://ex/a> <http://ex/p> .")
    assert err.value.line_no == 1


def test_error_carries_line_number():
    text = G0_TEXT + "<http://ex/a> <http://ex/p>\n"
    with pytest.raises(NTriplesParseError) as err:
        parse_ntriples(text)
    assert err.value.line_no == 10


def test_comments_and_blank_lines_skipped():
    text = "# header\n\n<http://ex/a> <http://ex/p> <http://ex/b> . # trailing\n"
    triples = parse_ntriples(text)
    assert len(triples) == 1


def test_duplicates_are_retained():
    line = "<http://ex/a> <http://ex/p> <http://ex/b> ."
    assert len(parse_ntriples(line + "\n" + line)) == 2


def test_literal_forms_and_escapes():
    text = "\n".join(
        [
            '<http://ex/a> <http://ex/p> "with \\"quotes\\" and \\\\" .',
            '<http://ex/a> <http://ex/p> "tagged"@en .',
            '<http://ex/a> <http://ex/p> "5"^^<http://www.w3.org/2001/XMLSchema#integer> .',
            "<http://ex/a> <http://ex/p> _:b7 .",
        ]
    )
    triples = parse_ntriples(text)
    assert triples[0].object.lexical == '"with \\"quotes\\" and \\\\"'
    assert triples[1].object == lit("tagged", lang="en")
    assert triples[2].object == lit("5", datatype="http://www.w3.org/2001/XMLSchema#integer")
    assert triples[3].object == blank("b7")


def test_round_trip_identity_on_fixture():
    triples = parse_ntriples(G0_TEXT)
    again = parse_ntriples(serialize_ntriples(triples))
    assert set(again) == set(triples)
    assert again == triples


def test_round_trip_identity_randomized():
    rng = random.Random(5)
    terms = (
        [iri(f"http://ex/r{i}") for i in range(6)]
        + [lit(f"value {i}", lang="en" if i % 2 else None) for i in range(4)]
        + [blank(f"n{i}") for i in range(3)]
    )
    subjects = [t for t in terms if t.kind in ("iri", "blank")]
    preds = [t for t in terms if t.kind == "iri"]
    from starfrag.terms import Triple

    triples = [
        Triple(rng.choice(subjects), rng.choice(preds), rng.choice(terms))
        for _ in range(120)
    ]
    assert parse_ntriples(serialize_ntriples(triples)) == triples
