from __future__ import annotations

import random

import pytest

from starfrag.fragments import (
    StarPatternSelector,
    TriplePatternSelector,
    make_fragment,
    paginate,
    select_star,
    select_triple_pattern,
)
from starfrag.graph import build_graph
from starfrag.oracle import oracle_star
from starfrag.terms import (
    Mapping,
    StarPattern,
    Triple,
    TriplePattern,
    apply_mapping,
    iri,
    lit,
    var,
)

from .conftest import ex, star_s1, star_s2, tp


def test_select_star_s2_unrestricted(g0, g0_triples):
    groups = select_star(g0, star_s2())
    expected = {
        Mapping({"p2": ex("bob"), "a": ex("X"), "bd2": lit("1980")}),
        Mapping({"p2": ex("carol"), "a": ex("Y"), "bd2": lit("1975")}),
    }
    assert {g.mapping for g in groups} == expected
    assert oracle_star(g0_triples, star_s2()) == expected


def test_select_star_restricted_to_bob(g0, g0_triples):
    omega = [Mapping({"a": ex("X")})]
    groups = select_star(g0, star_s2(), omega)
    assert [g.mapping.get("p2") for g in groups] == [ex("bob")]
    assert oracle_star(g0_triples, star_s2(), omega) == {g.mapping for g in groups}


def test_select_star_binding_outside_pattern_excludes_all(g0):
    omega = [Mapping({"unrelated": ex("Q")})]
    assert select_star(g0, star_s2(), omega) == []


def test_select_star_norwegian_laureate_fixture():
    dbo = "http://dbpedia.org/ontology/"
    dbr = "http://dbpedia.org/resource/"
    jb = iri(dbr + "Jens_Bratlie")
    graph = build_graph(
        [
            Triple(jb, iri(dbo + "country"), iri(dbr + "Norway")),
            Triple(jb, iri(dbo + "award"), iri(dbr + "Order_of_St._Olav")),
            Triple(jb, iri(dbo + "birthDate"), lit("1856-1-17")),
            Triple(iri(dbr + "Other"), iri(dbo + "country"), iri(dbr + "Norway")),
            Triple(iri(dbr + "Merkel"), iri(dbo + "country"), iri(dbr + "Germany")),
        ]
    )
    star = StarPattern.of(
        [
            TriplePattern(var("p2"), iri(dbo + "country"), iri(dbr + "Norway")),
            TriplePattern(var("p2"), iri(dbo + "award"), var("a")),
            TriplePattern(var("p2"), iri(dbo + "birthDate"), var("bd2")),
        ]
    )
    groups = select_star(graph, star)
    assert len(groups) == 1
    assert groups[0].triples == frozenset(
        [
            Triple(jb, iri(dbo + "country"), iri(dbr + "Norway")),
            Triple(jb, iri(dbo + "award"), iri(dbr + "Order_of_St._Olav")),
            Triple(jb, iri(dbo + "birthDate"), lit("1856-1-17")),
        ]
    )


def test_select_triple_pattern_examples(g0):
    groups = select_triple_pattern(g0, tp("?p", "country", "Norway"))
    assert {g.mapping.get("p") for g in groups} == {ex("bob"), ex("carol")}

    groups = select_triple_pattern(g0, tp("?p", "award", "?a"), [Mapping({"p": ex("bob")})])
    assert [g.mapping for g in groups] == [Mapping({"p": ex("bob"), "a": ex("X")})]

    assert select_triple_pattern(g0, tp("?p", "country", "France"), [Mapping({"p": ex("bob")})]) == []


def _random_instance(rng: random.Random):
    n_subjects = rng.randint(2, 12)
    subjects = [iri(f"http://r/s{i}") for i in range(n_subjects)]
    preds = [iri(f"http://r/p{i}") for i in range(rng.randint(2, 5))]
    objects = subjects + [lit(str(i)) for i in range(4)]
    triples = [
        Triple(rng.choice(subjects), rng.choice(preds), rng.choice(objects))
        for _ in range(rng.randint(5, 120))
    ]
    k = rng.randint(1, 4)
    names = ["a", "b", "c"]
    pats = []
    for _ in range(k):
        pred = rng.choice(preds) if rng.random() < 0.8 else var("pv")
        if rng.random() < 0.6:
            obj = var(rng.choice(names))
        else:
            obj = rng.choice(objects)
        pats.append(TriplePattern(var("root"), pred, obj))
    try:
        star = StarPattern.of(pats)
    except ValueError:
        return None
    omega = []
    star_vars = list(star.variables())
    for _ in range(rng.randint(0, 6)):
        chosen = rng.sample(star_vars, rng.randint(1, min(2, len(star_vars))))
        m = Mapping({v: rng.choice(objects if v != "root" else subjects) for v in chosen})
        if m not in omega:
            omega.append(m)
    return triples, star, omega


def test_select_star_matches_oracle_randomized():
    rng = random.Random(23)
    done = 0
    while done < 60:
        inst = _random_instance(rng)
        if inst is None:
            continue
        triples, star, omega = inst
        g = build_graph(triples)
        got = select_star(g, star, omega)
        assert {grp.mapping for grp in got} == oracle_star(triples, star, omega)
        # group soundness: triples are exactly the substituted star
        graph_triples = set(g.triples())
        for grp in got:
            ground = apply_mapping(grp.mapping, star)
            assert grp.triples == frozenset(p.to_triple() for p in ground.patterns)
            assert grp.triples <= graph_triples
        done += 1


def test_backward_compatibility_randomized():
    rng = random.Random(31)
    done = 0
    while done < 60:
        inst = _random_instance(rng)
        if inst is None:
            continue
        triples, star, omega = inst
        pattern = star.patterns[0]
        g = build_graph(triples)
        a = select_triple_pattern(g, pattern, omega)
        b = select_star(g, StarPattern(pattern.subject, (pattern,)), omega)
        assert a == b
        done += 1


def test_restriction_property(g0):
    base = {g.mapping for g in select_star(g0, star_s2())}
    omega = [Mapping({"a": ex("X")}), Mapping({"p2": ex("carol")})]
    restricted = select_star(g0, star_s2(), omega)
    assert {g.mapping for g in restricted} <= base
    for g in restricted:
        assert any(g.mapping.extends(b) for b in omega)


def test_selector_rejects_duplicate_bindings():
    with pytest.raises(ValueError, match="distinct"):
        TriplePatternSelector(tp("?p", "country", "Norway"), (Mapping(), Mapping()))
    with pytest.raises(ValueError, match="distinct"):
        StarPatternSelector(star_s2(), (Mapping({"a": ex("X")}), Mapping({"a": ex("X")})))


def test_make_fragment_counts(g0):
    frag = make_fragment("/ds", StarPatternSelector(star_s2()), g0)
    assert frag.cnt == 2 and len(frag.groups) == 2

    frag = make_fragment("/ds", TriplePatternSelector(tp("?x", "nonexistent", "?y")), g0)
    assert frag.cnt == 0 and frag.groups == ()

    frag = make_fragment("/ds", StarPatternSelector(star_s1()), g0)
    assert frag.cnt == 1


def test_fragment_controls_and_uri(g0):
    frag = make_fragment("/ds", StarPatternSelector(star_s2()), g0)
    assert frag.controls["collection"] == "/ds"
    assert frag.controls["fragment"] == frag.uri
    assert "fragmentTemplate" in frag.controls


def _many_group_fragment(total: int):
    triples = [
        Triple(iri(f"http://r/s{i}"), iri("http://r/p"), lit(str(i))) for i in range(total)
    ]
    g = build_graph(triples)
    return make_fragment("/ds", TriplePatternSelector(tp("?s", iri("http://r/p"), "?o")), g)


def tp_helper(s, p, o):
    return TriplePattern(s, p, o)


def test_paginate_arithmetic():
    frag = _many_group_fragment(120)
    p1 = paginate(frag, 1, 50)
    p2 = paginate(frag, 2, 50)
    p3 = paginate(frag, 3, 50)
    assert (len(p1.groups), p1.has_next) == (50, True)
    assert (len(p2.groups), p2.has_next) == (50, True)
    assert (len(p3.groups), p3.has_next) == (20, False)
    assert p1.cnt == p2.cnt == p3.cnt == 120
    assert "nextPage" in p1.controls and "nextPage" not in p3.controls
    assert p1.page_uri != p1.fragment_uri


def test_paginate_empty_fragment(g0):
    frag = make_fragment("/ds", TriplePatternSelector(tp("?x", "nonexistent", "?y")), g0)
    page = paginate(frag, 1, 50)
    assert page.groups == () and page.cnt == 0 and not page.has_next


def test_paginate_exact_boundary():
    frag = _many_group_fragment(50)
    page = paginate(frag, 1, 50)
    assert len(page.groups) == 50 and not page.has_next


def test_paginate_beyond_last_page():
    frag = _many_group_fragment(10)
    page = paginate(frag, 5, 50)
    assert page.groups == () and not page.has_next and page.cnt == 10


def test_page_partition_reconstructs_fragment():
    rng = random.Random(7)
    for total in (0, 1, 49, 50, 51, 137):
        frag = _many_group_fragment(total)
        size = rng.choice([7, 50])
        pages = []
        n = 1
        while True:
            page = paginate(frag, n, size)
            pages.extend(page.groups)
            if not page.has_next:
                break
            n += 1
        assert tuple(pages) == frag.groups
        assert frag.cnt == len(frag.groups)
        assert (frag.cnt == 0) == (frag.groups == ())
