import csv
import json

import pytest

from hypermatch import io as hio
from hypermatch.cli import main
from hypermatch.constructions import build_counterexample6, build_Hk, build_Hprime


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_and_roundtrip(tmp_path, capsys):
    f = tmp_path / "h.txt"
    assert run(capsys, "gen", "--family", "Hk", "--n", "6", "--m", "5", "-o", str(f))[0] == 0
    assert hio.read_hypergraph(f) == build_Hk(6, 5)
    code, out, _ = run(capsys, "gen", "--family", "counterexample6")
    assert code == 0 and hio.loads(out) == build_counterexample6()
    code, out, _ = run(capsys, "gen", "--family", "Hprime", "--n", "3", "--profile", "1,1,1")
    assert hio.loads(out).num_edges == 18


def test_gen_errors(capsys):
    code, _, err = run(capsys, "gen", "--family", "Hk", "--n", "3")
    assert code == 2 and "--m" in err
    code, _, err = run(capsys, "gen", "--family", "H", "--n", "3", "--profile", "4,0,0")
    assert code == 2 and err


@pytest.mark.parametrize("mode", ["exact", "greedy", "local", "auto"])
def test_solve_modes(tmp_path, capsys, mode):
    f = tmp_path / "h.txt"
    hio.write_hypergraph(build_Hprime(6, 2, 2, 2), f)
    code, out, _ = run(capsys, "solve", str(f), "--mode", mode)
    d = json.loads(out)
    assert code == 0
    assert {"status", "matching_size", "matching", "optimal"} <= set(d)
    if mode in ("exact", "auto"):
        assert d["status"] == "perfect" and d["optimal"] and d["matching_size"] == 6


def test_solve_no_pm(tmp_path, capsys):
    f = tmp_path / "c.txt"
    hio.write_hypergraph(build_counterexample6(), f)
    d = json.loads(run(capsys, "solve", str(f))[1])
    assert d["status"] == "no_perfect" and d["optimal"] and d["matching_size"] == 1


def test_solve_missing_file(tmp_path, capsys):
    code, _, err = run(capsys, "solve", str(tmp_path / "nope.txt"))
    assert code == 2 and "error" in err


def test_analyze(tmp_path, capsys):
    f = tmp_path / "h.txt"
    hio.write_hypergraph(build_Hprime(6, 2, 2, 2), f)
    code, out, _ = run(capsys, "analyze", str(f), "--template", "Hprime:2,2,2", "--alpha", "0", "--epsilon", "0.01")
    d = json.loads(out)
    assert code == 0 and d["closeness"]["missing"] == 0 and d["closeness"]["within_epsilon"]
    assert d["goodness"]["bad"] == [[], [], []]
    assert run(capsys, "analyze", str(f), "--template", "Bogus:1")[0] == 2


def test_mgraph(tmp_path, capsys):
    f = tmp_path / "h.txt"
    m = tmp_path / "m.json"
    hio.write_hypergraph(build_Hk(4, 12), f)
    m.write_text(json.dumps({"matching": [[1, 1, 1], [2, 2, 2], [3, 3, 3]]}))
    code, out, _ = run(capsys, "mgraph", str(f), "--matching", str(m), "--s", "0,0,0")
    rows = list(csv.DictReader(out.splitlines()))
    assert code == 0 and rows == [{"a1": "2", "a2": "2", "a3": "2", "count": "3"}]


def test_absorb(tmp_path, capsys):
    f = tmp_path / "h.txt"
    hio.write_hypergraph(build_Hprime(12, 4, 4, 4), f)
    code, out, _ = run(capsys, "absorb", str(f), "--gamma", "0.3", "--seed", "11")
    d = json.loads(out)
    assert code == 0 and d["ok"] and d["coverage_g"] > 0
    code, _, err = run(capsys, "absorb", str(f), "--strict")
    assert code == 2 and "strict" in err


def test_sweep_and_verify(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert run(capsys, "sweep", "--n", "5", "--trials", "2", "--grid", "0,25", "--out", str(out))[0] == 0
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert [r["pm_found"] for r in rows] == ["0", "2"]
    code, text, _ = run(capsys, "verify-thresholds", "--n-max", "8")
    assert code == 0 and json.loads(text)["all_pass"]
    assert run(capsys, "sweep", "--n", "3", "--trials", "1", "--grid", "10")[0] == 2
