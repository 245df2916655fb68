"""HTTP fragment server.

Three selector forms are exposed over one or more named datasets: the
single-pattern form via GET query parameters, and the bindings-restricted and
star-shaped forms via a JSON POST body. Handlers are pure functions over
immutable graphs, so any number of requests may run concurrently and
identical requests always produce identical bytes.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any
from urllib.parse import parse_qs, urlsplit

from . import wire
from .fragments import (
    DEFAULT_PAGE_SIZE,
    MAX_OMEGA,
    FragmentPage,
    Selector,
    StarPatternSelector,
    TriplePatternSelector,
    make_fragment,
    paginate,
)
from .graph import Graph
from .terms import Term, TriplePattern, VARIABLE, parse_term

DEFAULT_MAX_STAR_SIZE = 16


@dataclass
class ServerConfig:
    datasets: dict[str, Graph]
    page_size: int = DEFAULT_PAGE_SIZE
    max_omega: int = MAX_OMEGA
    max_star_size: int = DEFAULT_MAX_STAR_SIZE

    def __post_init__(self) -> None:
        if self.page_size < 1:
            raise ValueError("page_size must be >= 1")
        if self.max_omega < 1:
            raise ValueError("max_omega must be >= 1")


class RequestError(Exception):
    """Maps a selector/validation problem onto an HTTP status + message."""

    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


def _bad_request(message: str) -> RequestError:
    return RequestError(400, message)


def _parse_get_term(params: dict[str, list[str]], name: str, default_var: str) -> Term:
    values = params.get(name, [])
    if len(values) > 1:
        raise _bad_request(f"duplicated query parameter {name!r}")
    if not values or values[0] == "":
        return Term(VARIABLE, default_var)
    try:
        return parse_term(values[0])
    except ValueError as exc:
        raise _bad_request(f"bad term in {name!r}: {exc}") from None


def _parse_page(value: Any) -> int:
    try:
        page = int(value)
    except (TypeError, ValueError):
        raise _bad_request(f"bad page number: {value!r}") from None
    if page < 1:
        raise _bad_request("page numbers start at 1")
    return page


def dispatch_selector(
    method: str, params: dict[str, list[str]], body: dict | None
) -> tuple[Selector, int]:
    """Turn a raw request into a selector plus page number.

    GET carries the single-pattern form in query parameters; POST carries a
    JSON body with either selector type and an optional bindings sequence.
    """
    if method == "GET":
        s = _parse_get_term(params, "s", "s")
        p = _parse_get_term(params, "p", "p")
        o = _parse_get_term(params, "o", "o")
        try:
            pattern = TriplePattern(s, p, o)
        except ValueError as exc:
            raise _bad_request(str(exc)) from None
        pages = params.get("page", ["1"])
        if len(pages) > 1:
            raise _bad_request("duplicated query parameter 'page'")
        return TriplePatternSelector(pattern), _parse_page(pages[0])
    if method == "POST":
        if not isinstance(body, dict):
            raise _bad_request("request body must be a JSON object")
        if "selector" not in body:
            raise _bad_request("request body is missing 'selector'")
        try:
            selector = wire.selector_from_json(body["selector"])
        except (wire.WireFormatError, ValueError) as exc:
            raise _bad_request(str(exc)) from None
        return selector, _parse_page(body.get("page", 1))
    raise RequestError(405, f"unsupported method {method}")


def _validate_limits(config: ServerConfig, selector: Selector) -> None:
    n = len(selector.bindings)
    if n > config.max_omega:
        raise _bad_request(
            f"bindings sequence length {n} exceeds maxOmega={config.max_omega}"
        )
    if isinstance(selector, StarPatternSelector):
        size = len(selector.star)
        if size > config.max_star_size:
            raise _bad_request(
                f"star size {size} exceeds maxStarSize={config.max_star_size}"
            )


def handle_fragment_request(
    config: ServerConfig, dataset: str, selector: Selector, page: int
) -> FragmentPage:
    """Evaluate the selector and return the requested page. Stateless."""
    graph = config.datasets.get(dataset)
    if graph is None:
        raise RequestError(404, f"unknown dataset {dataset!r}")
    _validate_limits(config, selector)
    fragment = make_fragment(f"/{dataset}", selector, graph)
    return paginate(fragment, page, config.page_size)


def serialize_page(page: FragmentPage) -> tuple[bytes, int]:
    """Deterministic response body for a page, plus its exact byte count."""
    body = wire.encode(wire.page_to_json(page))
    return body, len(body)


def respond(
    config: ServerConfig, method: str, path: str, query: str, body: bytes | None
) -> tuple[int, bytes]:
    """Core request handling, independent of the HTTP transport."""
    try:
        parts = [p for p in path.split("/") if p]
        if len(parts) != 2:
            raise RequestError(404, f"no such resource: {path}")
        dataset, resource = parts
        if resource == "meta":
            graph = config.datasets.get(dataset)
            if graph is None:
                raise RequestError(404, f"unknown dataset {dataset!r}")
            meta = {
                "tripleCount": len(graph),
                "pageSize": config.page_size,
                "maxOmega": config.max_omega,
            }
            return 200, wire.encode(meta)
        if resource != "fragment":
            raise RequestError(404, f"no such resource: {path}")
        params = parse_qs(query, keep_blank_values=True)
        parsed_body: dict | None = None
        if method == "POST":
            if body is None:
                raise _bad_request("missing request body")
            try:
                parsed_body = wire.decode(body)
            except wire.WireFormatError as exc:
                raise _bad_request(str(exc)) from None
        selector, page_no = dispatch_selector(method, params, parsed_body)
        page = handle_fragment_request(config, dataset, selector, page_no)
        payload, _ = serialize_page(page)
        return 200, payload
    except RequestError as exc:
        return exc.status, wire.encode({"error": exc.message})


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "starfrag"
    # coalesce status+headers+body into one segment; avoids Nagle/delayed-ACK
    # stalls that otherwise add ~40ms to every loopback request
    wbufsize = 64 * 1024
    disable_nagle_algorithm = True

    def _dispatch(self, method: str) -> None:
        split = urlsplit(self.path)
        body = None
        if method == "POST":
            length = int(self.headers.get("Content-Length", 0))
            body = self.rfile.read(length)
        config = self.server.config  # type: ignore[attr-defined]
        status, payload = respond(config, method, split.path, split.query, body)
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def do_GET(self) -> None:  # noqa: N802
        self._dispatch("GET")

    def do_POST(self) -> None:  # noqa: N802
        self._dispatch("POST")

    def log_message(self, fmt: str, *args: Any) -> None:
        pass


class FragmentServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, config: ServerConfig, host: str = "127.0.0.1", port: int = 0):
        super().__init__((host, port), _Handler)
        self.config = config

    @property
    def url(self) -> str:
        host, port = self.server_address[:2]
        return f"http://{host}:{port}"


def start_server(config: ServerConfig, host: str = "127.0.0.1", port: int = 0) -> FragmentServer:
    """Start a server on a background thread; caller owns shutdown()."""
    server = FragmentServer(config, host, port)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server
