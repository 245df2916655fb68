from __future__ import annotations

import pytest


def pytest_runtest_logreport(report):
    # one visible pass/fail line per acceptance criterion, independent of -s
    if report.when == "call" and "test_acceptance.py::test_criterion" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        print(f"\n{name}: {'PASS' if report.passed else 'FAIL'}")

from starfrag.client import InProcessTransport
from starfrag.graph import build_graph
from starfrag.ntriples import parse_ntriples
from starfrag.server import ServerConfig, start_server
from starfrag.terms import StarPattern, TriplePattern, iri, lit, var

EX = "http://ex/"

# Nine-triple fixture: three people, their country, one award each, and a
# birth date. Only alice (Germany) and bob (Norway) share an award.
G0_TEXT = """\
<http://ex/alice> <http://ex/country> <http://ex/Germany> .
<http://ex/alice> <http://ex/award> <http://ex/X> .
<http://ex/alice> <http://ex/birthDate> "1970" .
<http://ex/bob> <http://ex/country> <http://ex/Norway> .
<http://ex/bob> <http://ex/award> <http://ex/X> .
<http://ex/bob> <http://ex/birthDate> "1980" .
<http://ex/carol> <http://ex/country> <http://ex/Norway> .
<http://ex/carol> <http://ex/award> <http://ex/Y> .
<http://ex/carol> <http://ex/birthDate> "1975" .
"""

LISTING_QUERY = """\
PREFIX ex: <http://ex/>
SELECT DISTINCT * WHERE {
  ?p1 ex:country ex:Germany .
  ?p1 ex:award ?a .
  ?p1 ex:birthDate ?bd1 .
  ?p2 ex:country ex:Norway .
  ?p2 ex:award ?a .
  ?p2 ex:birthDate ?bd2
}
"""


def ex(name: str):
    return iri(EX + name)


def tp(s, p, o) -> TriplePattern:
    def cook(x):
        if isinstance(x, str):
            if x.startswith("?"):
                return var(x)
            if x.startswith('"'):
                return lit(x.strip('"'))
            return ex(x)
        return x

    return TriplePattern(cook(s), cook(p), cook(o))


def star_s1() -> StarPattern:
    return StarPattern.of(
        [
            tp("?p1", "country", "Germany"),
            tp("?p1", "award", "?a"),
            tp("?p1", "birthDate", "?bd1"),
        ]
    )


def star_s2() -> StarPattern:
    return StarPattern.of(
        [
            tp("?p2", "country", "Norway"),
            tp("?p2", "award", "?a"),
            tp("?p2", "birthDate", "?bd2"),
        ]
    )


@pytest.fixture(scope="session")
def g0_triples():
    return parse_ntriples(G0_TEXT)


@pytest.fixture(scope="session")
def g0(g0_triples):
    return build_graph(g0_triples)


@pytest.fixture(scope="session")
def g0_config(g0):
    return ServerConfig(datasets={"ds": g0})


@pytest.fixture(scope="session")
def g0_transport(g0_config):
    return InProcessTransport(g0_config)


@pytest.fixture(scope="session")
def g0_server(g0_config):
    server = start_server(g0_config)
    yield server
    server.shutdown()
