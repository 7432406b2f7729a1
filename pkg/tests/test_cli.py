import csv
import io
import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from mapstat.cli import main

GOLDEN = Path(__file__).parent / "golden"


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_decompose_plain_file(tmp_path, capsys):
    f = tmp_path / "m.txt"
    f.write_text("2\n1 1\n")
    code, out, _ = run(["decompose", str(f)], capsys)
    assert code == 0
    rep = json.loads(out)["report"]
    assert len(rep["components"]) == 1
    assert rep["components"][0]["cycle"] == [1]
    assert rep["components"][0]["trees"] == [{"root": 1, "size": 2}]


def test_decompose_json_file_with_members(tmp_path, capsys):
    f = tmp_path / "m.json"
    f.write_text(json.dumps({"n": 5, "images": [2, 3, 1, 1, 1]}))
    code, out, _ = run(["decompose", str(f), "--members"], capsys)
    rep = json.loads(out)["report"]
    assert code == 0
    assert [t["size"] for t in rep["components"][0]["trees"]] == [3, 1, 1]
    assert rep["components"][0]["trees"][0]["members"] == [1, 4, 5]
    assert rep["tree_sizes_desc"] == [3, 1, 1]


@pytest.mark.parametrize("text", ["2\n3 1\n", "3\n1 1\n", "", "x y", '{"n": 2}'])
def test_decompose_data_errors(tmp_path, capsys, text):
    f = tmp_path / "bad.txt"
    f.write_text(text)
    code, _, err = run(["decompose", str(f)], capsys)
    assert code == 1 and "mapstat" in err


def test_missing_file_is_data_error(capsys):
    assert main(["decompose", "/nonexistent/file"]) == 1


def test_bad_flags_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--n", "3", "--bogus"])
    assert exc.value.code == 2
    assert main(["exact", "--n", "9"]) == 2
    assert main(["simulate", "--n", "0"]) == 2


def test_simulate_is_byte_identical(capsys):
    argv = ["simulate", "--n", "2", "--trials", "3000", "--seed", "7"]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    _, c, _ = run(argv + ["--workers", "3"], capsys)
    assert a == b == c
    rep = json.loads(a)
    assert rep["config"]["seed"] == 7 and "workers" not in rep["config"]
    assert rep["version"] and rep["generator"]


def test_seed_env_fallback(capsys, monkeypatch):
    monkeypatch.setenv("MAPSTAT_SEED", "7")
    _, a, _ = run(["simulate", "--n", "4", "--trials", "300"], capsys)
    monkeypatch.delenv("MAPSTAT_SEED")
    _, b, _ = run(["simulate", "--n", "4", "--trials", "300", "--seed", "7"], capsys)
    assert a == b


def test_simulate_report_contents(capsys):
    _, out, _ = run(["simulate", "--grid", "1,5", "--trials", "400", "--seed", "1", "--s-max", "2"], capsys)
    results = json.loads(out)["report"]["results"]
    assert [r["n"] for r in results] == [1, 5]
    assert "pair_conditional" not in results[0]
    r5 = results[1]
    assert len(r5["moments"]["ecdf_mu_r"][0]) == 1001
    assert set(r5["per_s"][0]) == {"s", "conditional", "ratio", "indicator_ratio", "gap", "subgraph_prob"}
    assert set(r5["pair_conditional"]) == {"indicator", "moment_ratio"}


def test_simulate_timing_flag(capsys):
    _, out, _ = run(["simulate", "--n", "3", "--trials", "10", "--seed", "1", "--timing"], capsys)
    assert json.loads(out)["wall_clock_seconds"] >= 0


def test_simulate_csv(capsys):
    _, out, _ = run(["simulate", "--n", "6", "--trials", "500", "--seed", "2", "--format", "csv"], capsys)
    lines = out.splitlines()
    assert lines[0].startswith("# ")
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
    stats = {r["statistic"] for r in rows}
    assert {"mean_mu_over_n", "conditional", "ratio", "subgraph_prob", "pair_indicator"} <= stats


def test_exact_json(capsys, tmp_path):
    out_file = tmp_path / "t.json"
    code, _, _ = run(["exact", "--n", "2", "--out", str(out_file)], capsys)
    rep = json.loads(out_file.read_text())["report"]
    assert code == 0
    assert rep["mean_mu"] == {"num": "7", "den": "4"}
    assert rep["mean_tau"][:2] == [{"num": "3", "den": "2"}, {"num": "1", "den": "2"}]


def test_exact_csv(capsys):
    _, out, _ = run(["exact", "--n", "3", "--format", "csv"], capsys)
    rows = list(csv.DictReader(io.StringIO(out.split("\n", 1)[1])))
    by_stat = {(r["statistic"], r["rank"]): r["value"] for r in rows if r["statistic"] != "mu_dist" and r["statistic"] != "tau_dist"}
    assert by_stat[("mean_mu", "")] == "70/27"
    assert by_stat[("connected_count", "")] == "17"
    dist = [Fraction(r["probability"]) for r in rows if r["statistic"] == "mu_dist" and r["rank"] == "1"]
    assert sum(dist) == 1


def test_series_csv_golden(capsys):
    _, out, _ = run(["series", "--n", "4", "--format", "csv"], capsys)
    # the header carries the numpy version, so only the table is pinned
    want = (GOLDEN / "series_n4.csv").read_text()
    assert out.split("\n", 1)[1] == want.split("\n", 1)[1]
    assert json.loads(out.split("\n", 1)[0][2:])["config"]["mode"] == "rational"


def test_series_json_float(capsys):
    _, out, _ = run(["series", "--n", "70", "--s-max", "1", "--r-max", "1"], capsys)
    rep = json.loads(out)
    assert rep["config"]["mode"] == "float"
    assert rep["report"]["mu_cdf"]["1"][-1] == pytest.approx(1, abs=1e-12)
    assert 0.7 < rep["report"]["mu_mean_over_n"] < 0.8


def test_constants_small_grid(capsys):
    _, out, _ = run(["constants", "--grid", "64,128,256", "--s-max", "2"], capsys)
    rep = json.loads(out)["report"]
    assert rep["p_s_at_most_one"] and rep["p_s_nonincreasing"]
    mu_row = rep["table"][0]
    assert mu_row["stat"] == "mu" and abs(mu_row["limit_estimate"] - 0.7578) < 0.01


def test_constants_csv(capsys):
    _, out, _ = run(["constants", "--grid", "32,64,128", "--s-max", "2", "--format", "csv"], capsys)
    rows = list(csv.DictReader(io.StringIO(out.split("\n", 1)[1])))
    assert [r["stat"] for r in rows] == ["mu", "tau1", "tau2"]


def test_module_entry_point(tmp_path):
    f = tmp_path / "m.txt"
    f.write_text("1\n1\n")
    proc = subprocess.run([sys.executable, "-m", "mapstat", "decompose", str(f)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["report"]["n"] == 1
