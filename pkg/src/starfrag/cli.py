"""Command-line entry points: serve, query, gen-data, gen-queries, bench, oracle."""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .bench import WorkloadConfig, WorkloadQuery, run_workload, summary_table, write_report
from .client import HttpTransport, TransportError, run_query
from .gen import GenerationError, generate_dataset, generate_queries
from .graph import build_graph
from .ntriples import NTriplesParseError, parse_ntriples, serialize_ntriples
from .oracle import oracle_rows
from .server import ServerConfig, start_server
from .sparql import SparqlParseError, parse_sparql_select


class CliError(RuntimeError):
    pass


def _load_graph_file(path: str):
    text = Path(path).read_text(encoding="utf-8")
    return parse_ntriples(text)


def _print_rows(variables, rows, as_json: bool) -> None:
    if as_json:
        payload = {
            "vars": list(variables),
            "rows": [{k: v.text() for k, v in row.items()} for row in rows],
        }
        print(json.dumps(payload, indent=2))
        return
    print("\t".join(variables))
    for row in rows:
        print("\t".join(t.text() if (t := row.get(v)) is not None else "" for v in variables))


def _cmd_serve(args) -> int:
    triples = _load_graph_file(args.data)
    graph = build_graph(triples)
    config = ServerConfig(
        datasets={args.name: graph},
        page_size=args.page_size,
        max_omega=args.max_omega,
    )
    server = start_server(config, host=args.host, port=args.port)
    print(f"serving dataset {args.name!r} ({len(graph)} triples) at {server.url}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


def _cmd_query(args) -> int:
    text = Path(args.query).read_text(encoding="utf-8")
    transport = HttpTransport(args.server)
    try:
        result = run_query(
            text, transport, args.dataset, mode=args.mode, timeout_s=args.timeout
        )
    finally:
        transport.close()
    _print_rows(result.variables, result.rows, args.json)
    if args.stats:
        print(
            f"NRS={result.log.nrs} NTB={result.log.ntb} "
            f"QET_ms={result.qet_s * 1000:.1f} QRT_ms={result.qrt_s * 1000:.1f} "
            f"results={len(result.rows)} timed_out={result.timed_out}",
            file=sys.stderr,
        )
    return 0


def _cmd_gen_data(args) -> int:
    triples = generate_dataset(args.entities, args.seed)
    Path(args.out).write_text(serialize_ntriples(triples), encoding="utf-8")
    print(f"wrote {len(triples)} statements to {args.out}")
    return 0


def _cmd_gen_queries(args) -> int:
    triples = _load_graph_file(args.data)
    queries = generate_queries(args.load, args.count, triples, args.seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i, text in enumerate(queries, start=1):
        path = out_dir / f"{args.load}_q{i:03d}.rq"
        path.write_text(text, encoding="utf-8")
    print(f"wrote {len(queries)} queries to {out_dir}")
    return 0


def _cmd_bench(args) -> int:
    paths = sorted(Path(args.queries).glob("*.rq"))
    if not paths:
        raise CliError(f"no .rq files under {args.queries}")
    queries = []
    for p in paths:
        label = p.stem.rsplit("_q", 1)[0]
        queries.append(WorkloadQuery(qid=p.stem, label=label, text=p.read_text(encoding="utf-8")))
    cfg = WorkloadConfig(
        mode=args.mode,
        clients=args.clients,
        queries=queries,
        server_url=args.server,
        dataset=args.dataset,
        timeout_s=args.timeout,
        label=args.label,
    )
    try:
        report = run_workload(cfg)
    except TransportError as exc:
        raise CliError(f"server unreachable: {exc}") from None
    write_report(report, args.report, args.tsv)
    print(summary_table(report))
    print(f"report written to {args.report}")
    return 0


def _cmd_oracle(args) -> int:
    triples = _load_graph_file(args.data)
    query = parse_sparql_select(Path(args.query).read_text(encoding="utf-8"))
    rows = oracle_rows(triples, query.patterns, query.projected(), query.distinct)
    _print_rows(query.projected(), rows, args.json)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="starfrag")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the fragment server over one dataset")
    p.add_argument("--data", default=os.environ.get("STARFRAG_DATA"), required="STARFRAG_DATA" not in os.environ, help="N-Triples dataset file")
    p.add_argument("--name", default="ds", help="dataset name in URLs")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=int(os.environ.get("STARFRAG_PORT", "8080")))
    p.add_argument("--page-size", type=int, default=int(os.environ.get("STARFRAG_PAGE_SIZE", "50")))
    p.add_argument("--max-omega", type=int, default=int(os.environ.get("STARFRAG_MAX_OMEGA", "30")))
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("query", help="run one query against a fragment server")
    p.add_argument("--server", required=True, help="server base URL")
    p.add_argument("--dataset", default="ds")
    p.add_argument("--mode", choices=("spf", "brtpf", "tpf"), default="spf")
    p.add_argument("--query", required=True, help="file with one SELECT query")
    p.add_argument("--timeout", type=float, default=600.0)
    p.add_argument("--stats", action="store_true", help="print NRS/NTB/QET/QRT to stderr")
    p.add_argument("--json", action="store_true", help="JSON rows instead of TSV")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("gen-data", help="generate a synthetic N-Triples dataset")
    p.add_argument("--entities", type=int, required=True)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_data)

    p = sub.add_parser("gen-queries", help="generate a query load against a dataset")
    p.add_argument("--load", choices=("1-star", "2-stars", "3-stars", "paths", "union"), required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_gen_queries)

    p = sub.add_parser("bench", help="drive concurrent clients and report metrics")
    p.add_argument("--server", required=True)
    p.add_argument("--dataset", default="ds")
    p.add_argument("--mode", choices=("spf", "brtpf", "tpf"), required=True)
    p.add_argument("--clients", type=int, default=1)
    p.add_argument("--queries", required=True, help="directory of .rq files")
    p.add_argument("--timeout", type=float, default=600.0)
    p.add_argument("--report", required=True, help="JSON report output path")
    p.add_argument("--tsv", default=None, help="TSV summary path (default: next to report)")
    p.add_argument("--label", default="")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("oracle", help="brute-force evaluation of a query over a file")
    p.add_argument("--data", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_oracle)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, GenerationError, NTriplesParseError, SparqlParseError, TransportError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
