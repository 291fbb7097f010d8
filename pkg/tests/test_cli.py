import json

import pytest

from sdl.cli import main, parse_levels
from sdl.distortion import Embedding
from sdl.families import hanoi_graph
from sdl.graph import Multigraph


def run(*argv):
    return main([str(a) for a in argv])


def test_gen_roundtrip(tmp_path):
    out = tmp_path / "g.json"
    assert run("gen", "--family", "hanoi", "--level", 3, "--out", out) == 0
    g = Multigraph.from_json(out.read_text())
    assert g.vertex_count == 27
    assert g == hanoi_graph(3)


def test_gen_from_spec(tmp_path):
    spec = tmp_path / "h.spec"
    spec.write_text("alphabet 3\na = (0 1) [1, 1, a]\nb = (0 2) [1, b, 1]\nc = (1 2) [c, 1, 1]\n")
    out = tmp_path / "g.json"
    assert run("gen", "--spec", spec, "--level", 2, "--out", out) == 0
    assert Multigraph.from_json(out.read_text()) == hanoi_graph(2)


def test_bad_spec_reports_position(tmp_path, capsys):
    spec = tmp_path / "bad.spec"
    spec.write_text("alphabet 2\na = (0 1) [1, q]\n")
    assert run("gen", "--spec", spec, "--level", 2, "--out", tmp_path / "x.json") == 1
    assert "line 2, column 15" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["gen", "--family", "nope", "--level", "2", "--out", "x.json"],
        ["gen", "--family", "hanoi", "--level", "99", "--out", "x.json"],
        ["gen", "--family", "hanoi", "--out", "x.json"],
        ["gen", "--family", "hanoi", "--graph", "a.json", "--level", "2", "--out", "x.json"],
        ["bogus"],
        ["sweep", "--family", "hanoi", "--levels", "3..1", "--out", "x.csv"],
    ],
)
def test_usage_errors_exit_1(argv, tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == 1
    err = capsys.readouterr().err
    assert err.strip().splitlines()[-1].startswith("error:")
    assert not (tmp_path / "x.json").exists()


def test_verify_eq8_bipartite(tmp_path, capsys):
    g = tmp_path / "c4.json"
    run("gen", "--family", "cycle", "--level", 4, "--out", g)
    assert run("verify", "--graph", g, "--ineq", "eq8") == 1
    assert "bipartite-degenerate" in capsys.readouterr().err


def test_verify_passes(tmp_path):
    out = tmp_path / "r.json"
    assert run("verify", "--family", "hanoi", "--level", 3, "--ineq", "thm3", "--out", out) == 0
    reports = json.loads(out.read_text())
    assert len(reports) == 2 and all(r["passed"] for r in reports)
    assert run("verify", "--family", "cycle", "--level", 5, "--ineq", "eq8") == 0
    assert run("verify", "--family", "cycle", "--level", 9, "--ineq", "prop6") == 0
    assert run("verify", "--family", "grigorchuk", "--level", 4, "--ineq", "eq6") == 0


def test_verify_failure_exit_2(monkeypatch):
    from sdl import cli
    from sdl.reports import InequalityReport

    monkeypatch.setattr(cli.ineq, "eq6_check", lambda g: InequalityReport.compare("eq6", "g", {}, 5, 1))
    assert run("verify", "--family", "cycle", "--level", 5, "--ineq", "eq6") == 2


def test_sweep_grigorchuk(tmp_path):
    out = tmp_path / "t.csv"
    assert run("sweep", "--family", "grigorchuk", "--levels", "1..8", "--p", "2", "--eps", "0.5", "--out", out) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 9
    header = lines[0].split(",")
    col = header.index("delta")
    assert [int(l.split(",")[col]) for l in lines[1:]] == [2**n - 1 for n in range(1, 9)]


def test_sweep_json_and_determinism(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["sweep", "--family", "hanoi", "--levels", "1,2,3", "--p", "2,1.5", "--eps", "0.5", "--format", "json"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    data = json.loads(a.read_text())
    assert [r["V"] for r in data["rows"]] == [3, 9, 27]
    assert "lambda_p1.5_eq3" in data["rows"][0]


def test_embed_and_distortion(tmp_path, capsys):
    e = tmp_path / "e.json"
    assert run("embed", "--family", "hanoi", "--level", 2, "--method", "lattice", "--out", e) == 0
    emb = Embedding.from_json(e.read_text())
    assert emb.coords.shape == (9, 2)
    out = tmp_path / "d.json"
    assert run("distortion", "--family", "hanoi", "--level", 2, "--embedding", e, "--out", out) == 0
    assert json.loads(out.read_text())["realized"] == pytest.approx(1.5)
    assert run("embed", "--family", "cycle", "--level", 5, "--method", "lattice", "--out", e) == 1


def test_spectral_and_rho(tmp_path):
    out = tmp_path / "s.json"
    assert run("spectral", "--family", "cycle", "--level", 6, "--p", "2", "--convention", "operator", "--out", out) == 0
    assert json.loads(out.read_text())["results"][0]["lambda"] == pytest.approx(1.0)
    out = tmp_path / "r.json"
    assert run("rho", "--family", "cycle", "--level", 6, "--eps", "0.5", "--method", "exact", "--out", out) == 0
    assert json.loads(out.read_text())["results"][0]["lower"] == pytest.approx(2 / 3)


def test_parse_levels():
    assert parse_levels("1..4") == [1, 2, 3, 4]
    assert parse_levels("2,5") == [2, 5]
