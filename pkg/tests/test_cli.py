"""End-to-end CLI tests via click's test runner."""

import json

import pytest
from click.testing import CliRunner

from lampwalk.cli import EXIT_BUDGET, main


@pytest.fixture
def runner():
    return CliRunner()


def read_jsonl(path):
    return [json.loads(line) for line in path.read_text().splitlines()]


def test_animals_command(runner, tmp_path):
    res = runner.invoke(main, ["animals", "--graph", "z2", "--max-size", "3",
                               "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    rows = read_jsonl(tmp_path / "animals.jsonl")
    assert len(rows) == 23  # 1 + 4 + 18
    sizes = sorted({r["size"] for r in rows})
    assert sizes == [1, 2, 3]
    first = rows[0]
    assert set(first) == {"vertices", "boundary", "size", "bsize", "prob",
                          "prob_num", "prob_den"}
    assert first["prob_num"] / first["prob_den"] == pytest.approx(first["prob"])
    assert "size 2: 4" in res.output


def test_moments_config_space(runner, tmp_path):
    res = runner.invoke(main, ["moments", "--graph", "K2", "--method",
                               "config-space", "--n-max", "4",
                               "--mode", "rational", "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    payload = json.loads((tmp_path / "moments_config-space.json").read_text())
    vals = {row["n"]: row for row in payload["moments"]}
    assert vals[2]["value"] == 0.25
    assert (vals[2]["value_num"], vals[2]["value_den"]) == (1, 4)
    assert vals[3]["value"] == 0.0
    assert "timestamp" in payload


def test_moments_methods_agree(runner, tmp_path):
    outs = {}
    for method in ("config-space", "path-sum", "animal-sum"):
        d = tmp_path / method
        res = runner.invoke(main, ["moments", "--graph", "P3", "--root", "b",
                                   "--method", method, "--n-max", "6",
                                   "--out", str(d)])
        assert res.exit_code == 0, res.output
        payload = json.loads((d / f"moments_{method}.json").read_text())
        outs[method] = [row["value"] for row in payload["moments"]]
    assert outs["config-space"] == pytest.approx(outs["path-sum"], abs=1e-12)
    assert outs["config-space"] == pytest.approx(outs["animal-sum"], abs=1e-12)


def test_moments_mc_reproducible(runner, tmp_path):
    args = ["moments", "--graph", "K2", "--method", "mc", "--n-max", "2",
            "--samples", "2000", "--seed", "5"]
    payloads = []
    for sub in ("a", "b"):
        d = tmp_path / sub
        res = runner.invoke(main, args + ["--out", str(d)])
        assert res.exit_code == 0, res.output
        payloads.append(json.loads((d / "moments_mc.json").read_text()))
    assert payloads[0]["moments"] == payloads[1]["moments"]


def test_moments_budget_exit(runner, tmp_path):
    res = runner.invoke(main, ["moments", "--graph", "z2", "--method",
                               "config-space", "--n-max", "20",
                               "--out", str(tmp_path)])
    assert res.exit_code == EXIT_BUDGET


def test_spectrum_command(runner, tmp_path):
    res = runner.invoke(main, ["spectrum", "--graph", "K2", "--max-size", "2",
                               "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    lines = (tmp_path / "measure.csv").read_text().splitlines()
    assert lines[0].startswith("#")
    assert lines[2] == "location,mass"
    rows = [tuple(float(t) for t in ln.split(",")) for ln in lines[3:]]
    assert [r[0] for r in rows] == pytest.approx([-1.0, 0.0, 1.0], abs=1e-12)
    assert [r[1] for r in rows] == pytest.approx([0.125, 0.75, 0.125],
                                                abs=1e-14)
    cdf = (tmp_path / "cdf.csv").read_text().splitlines()
    last = float(cdf[-1].split(",")[1])
    assert last == pytest.approx(1.0, abs=1e-12)


def test_eigenbasis_command(runner, tmp_path):
    res = runner.invoke(main, ["eigenbasis", "--graph", "P3", "--root", "b",
                               "--max-size", "3", "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    rows = read_jsonl(tmp_path / "eigenbasis.jsonl")
    assert rows
    for row in rows:
        assert row["residual"] <= 1e-10
        assert {"animal", "lambda", "vector", "residual"} <= set(row)
        norm_sq = sum(e["re"] ** 2 + e["im"] ** 2 for e in row["vector"])
        assert norm_sq == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("suite", ["theorem1", "intertwine",
                                   "lemma-orthogonality",
                                   "completeness-probe", "eigenbasis"])
def test_verify_suites_pass(runner, tmp_path, suite):
    args = ["verify", "--suite", suite, "--out", str(tmp_path)]
    if suite == "theorem1":
        args += ["--n-max", "6"]
    res = runner.invoke(main, args)
    assert res.exit_code == 0, res.output
    verdict = json.loads((tmp_path / f"verify_{suite}.json").read_text())
    assert verdict["passed"] is True


def test_verify_theorem1_single_graph(runner, tmp_path):
    res = runner.invoke(main, ["verify", "--suite", "theorem1", "--graph",
                               "cycle:4", "--n-max", "4",
                               "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output


def test_usage_errors(runner, tmp_path):
    res = runner.invoke(main, ["animals", "--graph", "K2", "--max-size", "0",
                               "--out", str(tmp_path)])
    assert res.exit_code == 2
    res = runner.invoke(main, ["moments", "--graph", "K2", "--method",
                               "config-space", "--m", "1",
                               "--out", str(tmp_path)])
    assert res.exit_code == 2
    res = runner.invoke(main, ["moments", "--graph", "z2", "--method",
                               "animal-sum", "--out", str(tmp_path)])
    assert res.exit_code == 2  # --max-size required on infinite graphs
    res = runner.invoke(main, ["moments", "--graph", "K2", "--method",
                               "config-space", "--p", "2",
                               "--out", str(tmp_path)])
    assert res.exit_code == 2


def test_out_dir_env_var(runner, tmp_path, monkeypatch):
    monkeypatch.setenv("LAMPWALK_OUT", str(tmp_path / "envout"))
    res = runner.invoke(main, ["animals", "--graph", "K2", "--max-size", "2"])
    assert res.exit_code == 0, res.output
    assert (tmp_path / "envout" / "animals.jsonl").exists()
