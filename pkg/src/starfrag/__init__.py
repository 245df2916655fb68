"""starfrag: a star-shaped fragment interface for RDF graphs.

Ships an HTTP fragment server over an in-memory indexed triple store, a
client query engine that decomposes SELECT queries into subject-sharing star
patterns and joins paged fragments with batched bindings, and a benchmark
harness comparing the star-shaped mode against single-pattern baselines.
"""

from .client import (
    ExecutionResult,
    HttpTransport,
    InProcessTransport,
    RequestLog,
    TransportError,
    execute_brtpf,
    execute_tpf,
    run_query,
    star_decompose,
)
from .fragments import (
    DEFAULT_PAGE_SIZE,
    MAX_OMEGA,
    Fragment,
    FragmentPage,
    StarPatternSelector,
    TripleGroup,
    TriplePatternSelector,
    make_fragment,
    paginate,
    select_star,
    select_triple_pattern,
)
from .graph import Graph, build_graph, match_pattern
from .ntriples import NTriplesParseError, parse_ntriples, serialize_ntriples
from .server import ServerConfig, start_server
from .sparql import BGPQuery, SparqlParseError, UnsupportedFeatureError, parse_sparql_select
from .terms import (
    Mapping,
    StarPattern,
    Term,
    Triple,
    TriplePattern,
    apply_mapping,
    blank,
    iri,
    lit,
    parse_term,
    var,
)

__version__ = "0.1.0"
