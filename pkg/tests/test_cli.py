from __future__ import annotations

import json

import pytest

from starfrag.cli import main

from .conftest import G0_TEXT, LISTING_QUERY


@pytest.fixture()
def g0_file(tmp_path):
    path = tmp_path / "g0.nt"
    path.write_text(G0_TEXT, encoding="utf-8")
    return path


@pytest.fixture()
def query_file(tmp_path):
    path = tmp_path / "q1.rq"
    path.write_text(LISTING_QUERY, encoding="utf-8")
    return path


def test_oracle_command(capsys, g0_file, query_file):
    rc = main(["oracle", "--data", str(g0_file), "--query", str(query_file)])
    assert rc == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].split("\t") == ["p1", "a", "bd1", "p2", "bd2"]
    assert out[1].split("\t") == [
        "<http://ex/alice>",
        "<http://ex/X>",
        '"1970"',
        "<http://ex/bob>",
        '"1980"',
    ]
    assert len(out) == 2


def test_oracle_json_output(capsys, g0_file, query_file):
    rc = main(["oracle", "--data", str(g0_file), "--query", str(query_file), "--json"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["vars"] == ["p1", "a", "bd1", "p2", "bd2"]
    assert payload["rows"] == [
        {
            "p1": "<http://ex/alice>",
            "a": "<http://ex/X>",
            "bd1": '"1970"',
            "p2": "<http://ex/bob>",
            "bd2": '"1980"',
        }
    ]


def test_gen_data_and_queries(capsys, tmp_path):
    data = tmp_path / "data.nt"
    rc = main(["gen-data", "--entities", "120", "--seed", "3", "--out", str(data)])
    assert rc == 0
    assert data.exists()

    out_dir = tmp_path / "queries"
    rc = main(
        [
            "gen-queries", "--load", "2-stars", "--count", "2",
            "--data", str(data), "--seed", "5", "--out-dir", str(out_dir),
        ]
    )
    assert rc == 0
    files = sorted(out_dir.glob("*.rq"))
    assert [f.name for f in files] == ["2-stars_q001.rq", "2-stars_q002.rq"]


def test_query_command_against_server(capsys, g0_server, query_file):
    rc = main(
        [
            "query", "--server", g0_server.url, "--dataset", "ds",
            "--mode", "spf", "--query", str(query_file), "--stats",
        ]
    )
    assert rc == 0
    captured = capsys.readouterr()
    lines = captured.out.splitlines()
    assert lines[0] == "p1\ta\tbd1\tp2\tbd2"
    assert "<http://ex/alice>" in lines[1]
    assert "NRS=3" in captured.err


def test_bench_command(capsys, tmp_path, g0_server, query_file):
    qdir = tmp_path / "qs"
    qdir.mkdir()
    (qdir / "2-stars_q001.rq").write_text(LISTING_QUERY, encoding="utf-8")
    report = tmp_path / "r.json"
    rc = main(
        [
            "bench", "--server", g0_server.url, "--dataset", "ds", "--mode", "spf",
            "--clients", "2", "--queries", str(qdir), "--report", str(report),
        ]
    )
    assert rc == 0
    payload = json.loads(report.read_text())
    assert payload["config"]["clients"] == 2
    assert len(payload["perQuery"]) == 2
    assert report.with_suffix(".tsv").exists()


def test_missing_file_is_structured_error(capsys, tmp_path):
    rc = main(["oracle", "--data", str(tmp_path / "nope.nt"), "--query", str(tmp_path / "nope.rq")])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_bad_query_is_structured_error(capsys, g0_file, tmp_path):
    bad = tmp_path / "bad.rq"
    bad.write_text("SELECT * WHERE { ?x <http://ex/p> ?y } LIMIT 5", encoding="utf-8")
    rc = main(["oracle", "--data", str(g0_file), "--query", str(bad)])
    assert rc == 2
    assert "LIMIT" in capsys.readouterr().err
