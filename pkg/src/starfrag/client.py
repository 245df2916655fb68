"""Query engine over the fragment protocol.

A SELECT query is decomposed into star-shaped subpatterns sharing a subject,
ordered by probed cardinality, and executed as a left-deep pipeline. Three
execution modes share the machinery:

  spf    — whole stars evaluated server-side, restricted by batched bindings
  brtpf  — individual patterns restricted by batched bindings
  tpf    — individual patterns, one request sequence per upstream binding

Every request is recorded in a per-query log; the number of requests and the
exact request/response body bytes feed the benchmark metrics.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import requests

from . import wire
from .fragments import (
    MAX_OMEGA,
    FragmentPage,
    Selector,
    StarPatternSelector,
    TriplePatternSelector,
    selector_digest,
)
from .sparql import BGPQuery, parse_sparql_select
from .terms import Mapping, StarPattern, Term, TriplePattern, substitute

MODES = ("spf", "brtpf", "tpf")
DEFAULT_TIMEOUT_S = 600.0


class TransportError(RuntimeError):
    """A fragment request failed; `log` holds what was issued before the abort."""

    def __init__(self, message: str, log: "RequestLog | None" = None):
        super().__init__(message)
        self.log = log


class QueryTimeout(Exception):
    pass


@dataclass
class RequestRecord:
    kind: str
    omega: int
    page: int
    request_bytes: int
    response_bytes: int
    started: float
    finished: float


class RequestLog:
    """Append-only record of the requests issued for one query."""

    def __init__(self) -> None:
        self.records: list[RequestRecord] = []

    def add(self, record: RequestRecord) -> None:
        self.records.append(record)

    @property
    def nrs(self) -> int:
        return len(self.records)

    @property
    def ntb(self) -> int:
        return sum(r.request_bytes + r.response_bytes for r in self.records)

    def omega_sizes(self) -> list[int]:
        return [r.omega for r in self.records]

    def __len__(self) -> int:
        return len(self.records)


class HttpTransport:
    """Fragment requests over HTTP; single-pattern unrestricted selectors go
    via GET, everything else as a JSON POST body."""

    def __init__(self, base_url: str, http_timeout: float = 60.0):
        self.base_url = base_url.rstrip("/")
        self.http_timeout = http_timeout
        self.session = requests.Session()

    def fetch(
        self, dataset: str, selector: Selector, page: int
    ) -> tuple[FragmentPage, int, int]:
        url = f"{self.base_url}/{dataset}/fragment"
        try:
            if isinstance(selector, TriplePatternSelector) and not selector.bindings:
                query = wire.build_tp_query(selector.pattern, page)
                resp = self.session.get(f"{url}?{query}", timeout=self.http_timeout)
                request_bytes = 0
            else:
                body = wire.build_post_body(selector, page)
                resp = self.session.post(
                    url,
                    data=body,
                    headers={"Content-Type": "application/json"},
                    timeout=self.http_timeout,
                )
                request_bytes = len(body)
        except requests.RequestException as exc:
            raise TransportError(f"request failed: {exc}") from None
        response_bytes = len(resp.content)
        if resp.status_code != 200:
            raise TransportError(
                f"server returned {resp.status_code}: {resp.text[:300]}"
            )
        page_obj = wire.page_from_json(wire.decode(resp.content))
        return page_obj, request_bytes, response_bytes

    def meta(self, dataset: str) -> dict:
        try:
            resp = self.session.get(
                f"{self.base_url}/{dataset}/meta", timeout=self.http_timeout
            )
        except requests.RequestException as exc:
            raise TransportError(f"request failed: {exc}") from None
        if resp.status_code != 200:
            raise TransportError(f"server returned {resp.status_code}")
        return wire.decode(resp.content)

    def close(self) -> None:
        self.session.close()


class InProcessTransport:
    """Same request/response path as HTTP, minus the sockets.

    Request and response bodies go through the identical wire encoding, so
    logged byte counts match a loopback HTTP run exactly.
    """

    def __init__(self, config):
        from . import server  # local import to keep the dependency one-way

        self._respond = server.respond
        self.config = config

    def fetch(
        self, dataset: str, selector: Selector, page: int
    ) -> tuple[FragmentPage, int, int]:
        if isinstance(selector, TriplePatternSelector) and not selector.bindings:
            query = wire.build_tp_query(selector.pattern, page)
            status, payload = self._respond(
                self.config, "GET", f"/{dataset}/fragment", query, None
            )
            request_bytes = 0
        else:
            body = wire.build_post_body(selector, page)
            status, payload = self._respond(
                self.config, "POST", f"/{dataset}/fragment", "", body
            )
            request_bytes = len(body)
        if status != 200:
            raise TransportError(f"server returned {status}: {payload[:300]!r}")
        return wire.page_from_json(wire.decode(payload)), request_bytes, len(payload)

    def meta(self, dataset: str) -> dict:
        status, payload = self._respond(self.config, "GET", f"/{dataset}/meta", "", None)
        if status != 200:
            raise TransportError(f"server returned {status}")
        return wire.decode(payload)

    def close(self) -> None:
        pass


@dataclass(frozen=True)
class StarDecomposition:
    stars: tuple[StarPattern, ...]


def star_decompose(query: BGPQuery) -> StarDecomposition:
    """Partition the query's patterns into stars, one per distinct subject.

    Duplicate patterns collapse first (a graph pattern is a set); pattern
    order within each star follows query order, and stars appear in order of
    their subject's first occurrence.
    """
    unique: dict[TriplePattern, None] = {}
    for p in query.patterns:
        unique.setdefault(p, None)
    by_subject: dict[Term, list[TriplePattern]] = {}
    for p in unique:
        by_subject.setdefault(p.subject, []).append(p)
    stars = tuple(StarPattern(subj, tuple(pats)) for subj, pats in by_subject.items())
    return StarDecomposition(stars)


@dataclass
class PlanUnit:
    star: StarPattern
    index: int
    estimate: int
    probe: FragmentPage


@dataclass
class QueryPlan:
    units: tuple[PlanUnit, ...]
    mode: str


class Fetcher:
    """Issues fragment requests for one query: logging, paging, page-1 cache,
    and the query deadline all live here."""

    def __init__(
        self,
        transport,
        dataset: str,
        log: RequestLog,
        deadline: float | None = None,
    ):
        self.transport = transport
        self.dataset = dataset
        self.log = log
        self.deadline = deadline
        self._cache: dict[tuple[str, int], FragmentPage] = {}

    def fetch_page(self, selector: Selector, page: int, use_cache: bool = False) -> FragmentPage:
        key = (selector_digest(selector), page)
        if use_cache:
            cached = self._cache.get(key)
            if cached is not None:
                return cached
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise QueryTimeout()
        started = time.monotonic()
        page_obj, request_bytes, response_bytes = self.transport.fetch(
            self.dataset, selector, page
        )
        self.log.add(
            RequestRecord(
                kind=selector.kind,
                omega=len(selector.bindings),
                page=page,
                request_bytes=request_bytes,
                response_bytes=response_bytes,
                started=started,
                finished=time.monotonic(),
            )
        )
        if use_cache:
            self._cache[key] = page_obj
        return page_obj

    def fetch_groups(self, selector: Selector, use_cache: bool = False):
        """All groups of a fragment, following next-page controls."""
        page = self.fetch_page(selector, 1, use_cache=use_cache)
        while True:
            yield from page.groups
            if not page.has_next:
                return
            page = self.fetch_page(selector, page.page + 1, use_cache=False)


def _base_selector(star: StarPattern, mode: str) -> Selector:
    if mode == "spf":
        return StarPatternSelector(star)
    return TriplePatternSelector(star.patterns[0])


def _restricted_selector(star: StarPattern, omega: tuple[Mapping, ...], mode: str) -> Selector:
    if mode == "spf":
        return StarPatternSelector(star, omega)
    return TriplePatternSelector(star.patterns[0], omega)


def probe_and_order(
    stars: Sequence[StarPattern], fetcher: Fetcher, mode: str
) -> QueryPlan:
    """One first-page request per unit; order ascending by reported count,
    ties by original position. Probe pages are cached for reuse."""
    units = []
    for index, star in enumerate(stars):
        page = fetcher.fetch_page(_base_selector(star, mode), 1, use_cache=True)
        units.append(PlanUnit(star=star, index=index, estimate=page.cnt, probe=page))
    units.sort(key=lambda u: (u.estimate, u.index))
    return QueryPlan(tuple(units), mode)


def project_bindings(
    mappings: Iterable[Mapping], star: StarPattern, max_omega: int = MAX_OMEGA
) -> list[tuple[Mapping, ...]]:
    """Restrict mappings to the star's variables, dedupe preserving first
    occurrence, and chunk into batches of at most `max_omega`.

    When nothing projects (no shared variables), a single empty batch is
    returned and the join falls back to a client-side product.
    """
    names = star.variables()
    seen: dict[Mapping, None] = {}
    any_input = False
    for m in mappings:
        any_input = True
        seen.setdefault(m.project(names), None)
    if not any_input:
        return []
    projections = [p for p in seen if len(p) > 0]
    if not projections:
        return [()]
    return [
        tuple(projections[i : i + max_omega])
        for i in range(0, len(projections), max_omega)
    ]


def _stream_unit(unit: PlanUnit, fetcher: Fetcher, mode: str) -> Iterator[Mapping]:
    page = unit.probe
    selector = _base_selector(unit.star, mode)
    while True:
        for group in page.groups:
            yield group.mapping
        if not page.has_next:
            return
        page = fetcher.fetch_page(selector, page.page + 1)


def _join_step(
    upstream: Iterable[Mapping],
    unit: PlanUnit,
    fetcher: Fetcher,
    mode: str,
    max_omega: int,
) -> Iterator[Mapping]:
    rows = list(upstream)
    if not rows:
        return
    star = unit.star
    upstream_vars = rows[0].variables
    shared = [v for v in star.variables() if v in upstream_vars]

    if mode == "tpf":
        pattern = star.patterns[0]
        for m in rows:
            sub = substitute(m, pattern)
            if sub is None:
                continue
            for group in fetcher.fetch_groups(TriplePatternSelector(sub)):
                merged = m.merge(group.mapping)
                if merged is not None:
                    yield merged
        return

    if not shared:
        groups = list(fetcher.fetch_groups(_base_selector(star, mode), use_cache=True))
        for m in rows:
            for group in groups:
                merged = m.merge(group.mapping)
                if merged is not None:
                    yield merged
        return

    by_key: dict[Mapping, list[Mapping]] = {}
    for m in rows:
        by_key.setdefault(m.project(shared), []).append(m)
    for batch in project_bindings(rows, star, max_omega):
        selector = _restricted_selector(star, batch, mode)
        for group in fetcher.fetch_groups(selector):
            key = group.mapping.project(shared)
            for m in by_key.get(key, ()):
                merged = m.merge(group.mapping)
                if merged is not None:
                    yield merged


def execute(
    plan: QueryPlan, fetcher: Fetcher, query: BGPQuery, max_omega: int = MAX_OMEGA
) -> Iterator[Mapping]:
    """Run the pipeline, yielding projected result rows incrementally."""
    units = plan.units
    rows: Iterable[Mapping] = _stream_unit(units[0], fetcher, plan.mode)
    for unit in units[1:-1]:
        rows = list(_join_step(rows, unit, fetcher, plan.mode, max_omega))
        if not rows:
            return
    if len(units) > 1:
        rows = _join_step(rows, units[-1], fetcher, plan.mode, max_omega)

    projection = query.projected()
    seen: set[Mapping] = set()
    for m in rows:
        out = m.project(projection)
        if query.distinct:
            if out in seen:
                continue
            seen.add(out)
        yield out


@dataclass
class ExecutionResult:
    variables: tuple[str, ...]
    rows: list[Mapping]
    log: RequestLog
    qet_s: float
    qrt_s: float
    timed_out: bool = False


def run_query(
    query: BGPQuery | str,
    transport,
    dataset: str,
    mode: str = "spf",
    *,
    max_omega: int = MAX_OMEGA,
    timeout_s: float = DEFAULT_TIMEOUT_S,
) -> ExecutionResult:
    """Parse (if needed), plan, and execute a query in the given mode."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    if isinstance(query, str):
        query = parse_sparql_select(query)
    log = RequestLog()
    started = time.monotonic()
    fetcher = Fetcher(transport, dataset, log, deadline=started + timeout_s)
    if mode == "spf":
        stars = star_decompose(query).stars
    else:
        unique: dict[TriplePattern, None] = {}
        for p in query.patterns:
            unique.setdefault(p, None)
        stars = tuple(StarPattern(p.subject, (p,)) for p in unique)

    rows: list[Mapping] = []
    first_at: float | None = None
    timed_out = False
    try:
        plan = probe_and_order(stars, fetcher, mode)
        for row in execute(plan, fetcher, query, max_omega):
            if first_at is None:
                first_at = time.monotonic()
            rows.append(row)
    except QueryTimeout:
        timed_out = True
    except TransportError as exc:
        raise TransportError(str(exc), log=log) from None
    finished = time.monotonic()
    qet = finished - started
    qrt = (first_at - started) if first_at is not None else qet
    return ExecutionResult(
        variables=query.projected(),
        rows=rows,
        log=log,
        qet_s=qet,
        qrt_s=qrt,
        timed_out=timed_out,
    )


def execute_brtpf(query: BGPQuery | str, transport, dataset: str, **kwargs) -> ExecutionResult:
    return run_query(query, transport, dataset, mode="brtpf", **kwargs)


def execute_tpf(query: BGPQuery | str, transport, dataset: str, **kwargs) -> ExecutionResult:
    return run_query(query, transport, dataset, mode="tpf", **kwargs)
