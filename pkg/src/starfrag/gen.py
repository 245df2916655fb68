"""Synthetic dataset and query generation for the benchmark harness.

Entities get a guaranteed country/award/birthDate core plus a few extra
attributes drawn from a twelve-predicate pool with bounded value pools, so
star-shaped joins over shared values always have witnesses. Chain links
(hop0..hop8) make every consecutive-hop path of length up to nine satisfiable.
Every emitted query is verified non-empty against the brute-force evaluator.
"""
from __future__ import annotations

import random
from typing import Sequence

from .oracle import oracle_bgp
from .sparql import parse_sparql_select
from .terms import Term, Triple, TriplePattern, iri, lit, var

NS_ENTITY = "http://ex.org/d/"
NS_PRED = "http://ex.org/p/"
NS_VALUE = "http://ex.org/v/"

CORE_PREDICATES = ("country", "award", "birthDate")
EXTRA_PREDICATES = (
    "occupation",
    "almaMater",
    "residence",
    "party",
    "genre",
    "field",
    "language",
    "instrument",
    "team",
)
HOP_PREDICATES = tuple(f"hop{i}" for i in range(9))
QUERY_LOADS = ("1-star", "2-stars", "3-stars", "paths")
JOIN_PREDICATES = ("occupation", "residence", "genre", "field", "almaMater")


class GenerationError(RuntimeError):
    pass


def _pool_sizes(entities: int) -> dict[str, int]:
    # value pool sizes bound how many entities share one value, which in turn
    # bounds intermediate join sizes for the single-pattern baselines
    extra_pool = max(12, entities // 30)
    return {
        "country": 12,
        "award": max(10, entities // 20),
        "occupation": extra_pool,
        "almaMater": extra_pool,
        "residence": extra_pool,
        "party": extra_pool,
        "genre": extra_pool,
        "field": extra_pool,
        "language": extra_pool,
        "instrument": extra_pool,
        "team": extra_pool,
    }


def generate_dataset(entities: int, seed: int) -> list[Triple]:
    """Deterministic synthetic graph; 3-8 attribute triples per entity plus
    chain links."""
    if entities < 1:
        raise ValueError("entities must be >= 1")
    rng = random.Random(seed)
    pools = _pool_sizes(entities)
    pred = {name: iri(NS_PRED + name) for name in CORE_PREDICATES + EXTRA_PREDICATES + HOP_PREDICATES}
    ents = [iri(f"{NS_ENTITY}e{i}") for i in range(entities)]

    def pool_value(name: str) -> Term:
        return iri(f"{NS_VALUE}{name}{rng.randrange(pools[name])}")

    triples: list[Triple] = []
    for e in ents:
        triples.append(Triple(e, pred["country"], pool_value("country")))
        triples.append(Triple(e, pred["award"], pool_value("award")))
        date = f"19{rng.randrange(100):02d}-{rng.randrange(1, 13):02d}-{rng.randrange(1, 29):02d}"
        triples.append(Triple(e, pred["birthDate"], lit(date)))
        extras = rng.sample(EXTRA_PREDICATES, rng.randint(0, 5))
        for name in extras:
            triples.append(Triple(e, pred[name], pool_value(name)))

    chains = max(1, entities // 12)
    for _ in range(chains):
        nodes = [ents[rng.randrange(entities)] for _ in range(10)]
        for hop in range(9):
            triples.append(Triple(nodes[hop], pred[f"hop{hop}"], nodes[hop + 1]))
    return triples


def _render_term(t: Term) -> str:
    return t.text()


def render_query(distinct: bool, patterns: Sequence[TriplePattern]) -> str:
    lines = ["SELECT DISTINCT * WHERE {" if distinct else "SELECT * WHERE {"]
    for p in patterns:
        lines.append(f"  {_render_term(p.subject)} {_render_term(p.predicate)} {_render_term(p.object)} .")
    lines.append("}")
    return "\n".join(lines) + "\n"


class _GraphView:
    """Per-entity and per-value lookups over the attribute triples."""

    def __init__(self, triples: Sequence[Triple]):
        attr_names = set(CORE_PREDICATES + EXTRA_PREDICATES)
        self.entity_attrs: dict[Term, list[tuple[Term, Term]]] = {}
        self.owners: dict[tuple[Term, Term], list[Term]] = {}
        for t in triples:
            name = t.predicate.lexical.rsplit("/", 1)[-1]
            if name not in attr_names:
                continue
            self.entity_attrs.setdefault(t.subject, []).append((t.predicate, t.object))
            owners = self.owners.setdefault((t.predicate, t.object), [])
            if not owners or owners[-1] != t.subject:
                owners.append(t.subject)
        self.entities = list(self.entity_attrs)

    def shared_values(self, join_pred_name: str) -> list[tuple[Term, Term, list[Term]]]:
        """(predicate, value, owners) combos with at least two owners."""
        out = []
        for (p, v), owners in self.owners.items():
            if p.lexical.endswith("/" + join_pred_name) and len(set(owners)) >= 2:
                out.append((p, v, owners))
        return out


def _star_patterns(
    rng: random.Random,
    view: _GraphView,
    entity: Term,
    root: Term,
    *,
    forced: list[tuple[Term, Term]],
    var_extras: int,
    var_counter: list[int],
) -> list[TriplePattern] | None:
    """Build a star rooted at `root`, witnessed by `entity`.

    Every star gets one constant-object anchor so its cardinality stays
    bounded (country is never an anchor: its values are shared by hundreds
    of entities). `forced` join edges follow, then variable-object extras.
    Anchor-first order keeps brute-force evaluation cheap as well.
    """
    used = {p for p, _ in forced}
    anchors = [
        (p, o)
        for p, o in view.entity_attrs[entity]
        if p not in used and not p.lexical.endswith("/country")
    ]
    if not anchors:
        return None
    p, o = anchors[rng.randrange(len(anchors))]
    patterns = [TriplePattern(root, p, o)]
    used.add(p)
    patterns.extend(TriplePattern(root, p, o) for p, o in forced)
    candidates = [(p, o) for p, o in view.entity_attrs[entity] if p not in used]
    rng.shuffle(candidates)
    for p, _ in candidates[:var_extras]:
        var_counter[0] += 1
        patterns.append(TriplePattern(root, p, var(f"v{var_counter[0]}")))
        used.add(p)
    return patterns


def _gen_star_query(rng: random.Random, view: _GraphView, stars: int) -> list[TriplePattern] | None:
    var_counter = [0]
    if stars == 1:
        entity = view.entities[rng.randrange(len(view.entities))]
        root = var("s")
        patterns = _star_patterns(
            rng, view, entity, root, forced=[], var_extras=rng.randint(1, 3),
            var_counter=var_counter,
        )
        if patterns is None or len(patterns) < 2:
            return None
        return patterns

    # chained multi-star query: star_i and star_{i+1} share one join variable
    patterns: list[TriplePattern] = []
    prev_entity: Term | None = None
    prev_join: tuple[Term, Term] | None = None  # (predicate, join var) for the next star
    for i in range(stars):
        root = var(f"p{i + 1}")
        forced: list[tuple[Term, Term]] = []
        if prev_join is not None:
            forced.append(prev_join)
        if i < stars - 1:
            join_name = JOIN_PREDICATES[rng.randrange(len(JOIN_PREDICATES))]
            combos = view.shared_values(join_name)
            if not combos:
                return None
            if prev_entity is None:
                p, v, owners = combos[rng.randrange(len(combos))]
                owners = list(dict.fromkeys(owners))
                e_here, e_next = rng.sample(owners, 2)
            else:
                # the current star is witnessed by prev_entity; find a join
                # attribute it shares with a different entity
                options = []
                for p, v in view.entity_attrs[prev_entity]:
                    owners = list(dict.fromkeys(view.owners.get((p, v), [])))
                    others = [o for o in owners if o != prev_entity]
                    if others and p.lexical.rsplit("/", 1)[-1] in JOIN_PREDICATES:
                        options.append((p, v, others))
                if not options:
                    return None
                p, v, others = options[rng.randrange(len(options))]
                e_here = prev_entity
                e_next = others[rng.randrange(len(others))]
            join_var = var(f"j{i + 1}")
            forced.append((p, join_var))
            entity = e_here
            prev_join = (p, join_var)
            prev_entity = e_next
        else:
            entity = prev_entity if prev_entity is not None else view.entities[0]
        star = _star_patterns(
            rng, view, entity, root,
            forced=forced,
            var_extras=rng.randint(0, 1),
            var_counter=var_counter,
        )
        if star is None or len(star) < 2:
            return None
        patterns.extend(star)
    return patterns


def _gen_path_query(rng: random.Random) -> list[TriplePattern]:
    length = rng.randint(5, 9)
    start = rng.randint(0, 9 - length)
    patterns = []
    for i in range(length):
        patterns.append(
            TriplePattern(
                var(f"x{i}"),
                iri(NS_PRED + f"hop{start + i}"),
                var(f"x{i + 1}"),
            )
        )
    return patterns


def generate_queries(
    load: str, count: int, triples: Sequence[Triple], seed: int
) -> list[str]:
    """Query texts for one load; each verified non-empty before acceptance."""
    if load == "union":
        rng = random.Random(seed)
        per = [QUERY_LOADS[i % len(QUERY_LOADS)] for i in range(count)]
        out = []
        for i, sub in enumerate(per):
            out.extend(generate_queries(sub, 1, triples, rng.randrange(1 << 30)))
        return out
    if load not in QUERY_LOADS:
        raise GenerationError(f"unknown query load {load!r}")
    rng = random.Random(seed)
    view = _GraphView(triples)
    triples = list(triples)
    queries: list[str] = []
    attempts = 0
    max_attempts = max(60, count * 60)
    from .client import star_decompose  # local import to avoid a cycle

    while len(queries) < count:
        attempts += 1
        if attempts > max_attempts:
            raise GenerationError(
                f"could not generate a non-empty {load!r} query after {max_attempts} attempts"
            )
        if load == "paths":
            patterns = _gen_path_query(rng)
        else:
            stars = {"1-star": 1, "2-stars": 2, "3-stars": 3}[load]
            patterns = _gen_star_query(rng, view, stars)
            if patterns is None:
                continue
        text = render_query(True, patterns)
        query = parse_sparql_select(text)
        decomp = star_decompose(query)
        if load == "paths":
            if any(len(s) != 1 for s in decomp.stars):
                continue
        else:
            multi = [s for s in decomp.stars if len(s) >= 2]
            if len(decomp.stars) != stars or len(multi) != stars:
                continue
        if not oracle_bgp(triples, query.patterns):
            continue
        queries.append(text)
    return queries
