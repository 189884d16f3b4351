import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from wordlediff.bayes.fit import read_draws_csv, sampler_config, write_draws_csv
from wordlediff.bayes.sampler import PosteriorChains
from wordlediff.cli import interval_summary, main, percent
from wordlediff.pipeline import ConfigError, RunConfig, load_config, load_run, stream_rng

FAST = ["--chains", "2", "--warmup", "150", "--draws", "100", "--thin", "1", "--profile", "quick"]


def run_cli(*argv):
    return main([str(a) for a in argv])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="module")
def fitted(tmp_path_factory):
    """A small synthetic dataset and a short fit of it."""
    root = tmp_path_factory.mktemp("pipeline")
    assert run_cli("synth", "--days", 30, "--seed", 4, "--out", root / "data") == 0
    assert run_cli("fit", "--dataset", root / "data" / "dataset.csv", "--features", root / "data" / "features.csv",
                   "--seed", 4, "--out", root / "run", *FAST) == 0
    return root


# -- configuration -------------------------------------------------------------


def test_run_config_validation(tmp_path):
    with pytest.raises(ConfigError, match="at least 2"):
        RunConfig(chains=1)
    with pytest.raises(ConfigError):
        RunConfig(warmup=0)
    with pytest.raises(ConfigError, match="exactly 4"):
        RunConfig(predictors=("usage", "vowels"))
    with pytest.raises(ConfigError, match="unknown config"):
        RunConfig.from_dict({"sed": 3})
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({"seed": 9, "lambda": 0.5, "dataset": "d.csv"}))
    cfg = load_config(cfg_file, seed=3)
    assert cfg.seed == 3 and cfg.lam == 0.5
    assert cfg.dataset == str((tmp_path / "d.csv").resolve())
    assert RunConfig.from_dict(cfg.to_dict()) == cfg


def test_stream_rng_scheme():
    expected = np.random.Generator(np.random.PCG64(np.random.SeedSequence(5, spawn_key=(2,)))).random()
    assert stream_rng(5, "predict").random() == expected


def test_sampler_overrides():
    sc = sampler_config("reports", 1, 3, "default", warmup=10, draws=None)
    assert (sc.warmup, sc.draws, sc.chains) == (10, 1000, 3)


def test_draws_csv_round_trip():
    rng = np.random.default_rng(0)
    ch = PosteriorChains(["a", "b[1]"], rng.normal(size=(3, 120, 2)), warmup=7, seed=1, acceptance={})
    buf = io.StringIO()
    write_draws_csv(buf, ch)
    back = read_draws_csv(io.StringIO(buf.getvalue()), warmup=7, seed=1)
    assert back.names == ch.names
    assert np.array_equal(back.draws, ch.draws)
    assert back.rhat is not None


def test_interval_helpers():
    s = interval_summary(np.arange(1001))
    assert s[0] == 500
    assert s[5] <= s[3] <= s[1] <= s[0] <= s[2] <= s[4] <= s[6]
    assert np.array_equal(percent(np.array([1, 2]), np.array([0, 4])), [0.0, 50.0])


# -- commands -----------------------------------------------------------------


def test_config_error_exit_status(tmp_path, fitted):
    assert run_cli("fit", "--dataset", fitted / "data" / "dataset.csv", "--features", fitted / "data" / "features.csv",
                   "--chains", 1, "--out", tmp_path) == 1


def test_usage_error_exit_status():
    with pytest.raises(SystemExit) as exc:
        run_cli("frobnicate")
    assert exc.value.code == 2


def test_ingest(tmp_path, capsys):
    raw = tmp_path / "raw.csv"
    raw.write_text(
        "Date,Contest number,Word,Number of reported results,Number in hard mode,"
        "1 try,2 tries,3 tries,4 tries,5 tries,6 tries,7 or more tries (X)\n"
        "12/16/2022,529,shine,2569,2000,0,5,25,36,24,9,1\n"
        "12/17/2022,530,dwell,21000,2100,0,3,16,36,31,12,2\n"
    )
    assert run_cli("ingest", raw, "--out", tmp_path / "a") == 0
    out = capsys.readouterr().out
    assert "rows: 2" in out and "corrections applied: 1" in out
    first = (tmp_path / "a" / "dataset.csv").read_bytes()
    assert run_cli("ingest", tmp_path / "a" / "dataset.csv", "--out", tmp_path / "b") == 0
    assert (tmp_path / "b" / "dataset.csv").read_bytes() == first
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert run_cli("ingest", empty, "--out", tmp_path / "c") == 1


def test_features_words(tmp_path):
    assert run_cli("features", "--words", "eerie", "--out", tmp_path / "a") == 0
    rows = read_csv(tmp_path / "a" / "features.csv")
    assert len(rows) == 1
    assert rows[0]["vowels"] == "4" and rows[0]["unique_letters"] == "3"
    assert run_cli("features", "--words", "eerie", "--out", tmp_path / "b") == 0
    assert (tmp_path / "a" / "features.csv").read_bytes() == (tmp_path / "b" / "features.csv").read_bytes()
    assert run_cli("features", "--words", "eerie,cr4ne", "--out", tmp_path / "c") == 0
    rows = read_csv(tmp_path / "c" / "features.csv")
    assert rows[1]["error"] and not rows[0]["error"]
    assert run_cli("features", "--words", "cr4ne,ab", "--out", tmp_path / "d") == 1


def test_select(fitted, tmp_path, capsys):
    data = fitted / "data"
    assert run_cli("select", "--dataset", data / "dataset.csv", "--features", data / "features.csv",
                   "--min-hits", 8, "--out", tmp_path) == 0
    assert json.loads(capsys.readouterr().out.strip().splitlines()[-1]) == []
    sel = json.loads((tmp_path / "selection.json").read_text())
    assert sel["lambda"] == 0.1 and len(sel["coefficients"]) == 7
    assert len(read_csv(tmp_path / "coefficients.csv")) == 7


def test_fit_outputs(fitted):
    run = load_run(fitted / "run")
    assert set(run.chains) == {"try", "reports", "hardmoders"}
    assert run.chains["reports"].draws.shape == (2, 100, 17)
    meta = json.loads((fitted / "run" / "config.json").read_text())
    assert meta["config"]["predictors"] == ["unique_letters", "usage", "avg_yellow", "subset_entropy"]
    assert meta["samplers"]["try"]["warmup"] == 150
    diag = json.loads((fitted / "run" / "try" / "diagnostics.json").read_text())
    assert "rhat" in diag["parameters"]["sigma"]


def test_fit_is_deterministic(fitted, tmp_path):
    data = fitted / "data"
    assert run_cli("fit", "--dataset", data / "dataset.csv", "--features", data / "features.csv",
                   "--seed", 4, "--out", tmp_path, *FAST) == 0
    for name in ("try", "reports", "hardmoders"):
        assert (tmp_path / name / "draws.csv").read_bytes() == (fitted / "run" / name / "draws.csv").read_bytes()


def test_predict(fitted, tmp_path, capsys):
    assert run_cli("predict", fitted / "run", "--date", "2022-03-01", "--word", "eerie", "--draws", 500,
                   "--out", tmp_path) == 0
    text = capsys.readouterr().out
    assert "Percentage failed (X)" in text and "Number of reports" in text
    draws = read_csv(tmp_path / "predictive.csv")
    assert len(draws) == 500
    for row in draws:
        counts = [int(row[f"t{k}"]) for k in range(1, 8)]
        assert sum(counts) == int(row["reports"])
        assert 0 <= int(row["hardmoders"]) <= int(row["reports"])
    summary = read_csv(tmp_path / "summary.csv")
    assert len(summary) == 10
    for row in summary:
        v = {k: float(x) for k, x in row.items() if k != "quantity"}
        assert v["lo95"] <= v["lo80"] <= v["lo50"] <= v["median"] <= v["hi50"] <= v["hi80"] <= v["hi95"]


def test_predict_average_over_words_and_bad_date(fitted, tmp_path):
    assert run_cli("predict", fitted / "run", "--date", "2022-02-20", "--draws", 200, "--out", tmp_path) == 0
    assert len(read_csv(tmp_path / "predictive.csv")) == 200
    assert run_cli("predict", fitted / "run", "--date", "2021-12-31", "--out", tmp_path) == 1


def test_predict_monte_carlo_stability(fitted, tmp_path):
    medians = []
    for seed in (1, 2):
        out = tmp_path / str(seed)
        assert run_cli("predict", fitted / "run", "--date", "2022-02-20", "--word", "eerie", "--seed", seed,
                       "--out", out) == 0
        medians.append({r["quantity"]: float(r["median"]) for r in read_csv(out / "summary.csv")})
    for q in ("Number of reports", "Number of hardmoders", "Percentage in 4 guesses"):
        assert abs(medians[0][q] - medians[1][q]) < 0.02 * medians[0][q]


def test_retrodict(fitted, tmp_path, capsys):
    assert run_cli("retrodict", fitted / "run", "--draws", 200, "--out", tmp_path) == 0
    rows = read_csv(tmp_path / "retrodict.csv")
    assert len(rows) == 30
    assert all(int(r["reports_observed"]) >= 0 for r in rows)
    assert "95% interval coverage, tries" in capsys.readouterr().out
    # a single-day dataset
    lines = (fitted / "data" / "dataset.csv").read_text().splitlines()
    one = tmp_path / "one.csv"
    one.write_text("\n".join(lines[:2]) + "\n")
    assert run_cli("retrodict", fitted / "run", "--dataset", one, "--draws", 100, "--out", tmp_path / "one") == 0
    assert len(read_csv(tmp_path / "one" / "retrodict.csv")) == 1


def test_difficulty_direct(fitted, tmp_path):
    assert run_cli("difficulty", "--dataset", fitted / "data" / "dataset.csv", "--out", tmp_path) == 0
    rows = [r for r in read_csv(tmp_path / "difficulty.csv") if not r["error"]]
    assert len(rows) == 30
    hardest = max(rows, key=lambda r: float(r["score"]))
    assert float(hardest["percentile"]) >= 99
    word = rows[0]["word"]
    assert run_cli("difficulty", "--dataset", fitted / "data" / "dataset.csv", "--word", word,
                   "--out", tmp_path / "w") == 0
    assert len(read_csv(tmp_path / "w" / "difficulty.csv")) == 1
    assert run_cli("difficulty", "--dataset", fitted / "data" / "dataset.csv", "--word", "zzzzz",
                   "--out", tmp_path / "x") == 1


def test_difficulty_from_posterior(fitted, tmp_path):
    assert run_cli("difficulty", "--run", fitted / "run", "--word", "eerie", "--draws", 50, "--out", tmp_path) == 0
    rows = read_csv(tmp_path / "difficulty.csv")
    assert len(rows) == 50
    assert all(0 < float(r["score"]) < 1 for r in rows if not r["error"])
    assert run_cli("difficulty", "--run", fitted / "run", "--out", tmp_path) == 1


def test_synth_outputs(fitted):
    info = json.loads((fitted / "data" / "truth.json").read_text())
    assert info["days"] == 30 and info["seed"] == 4
    assert len(read_csv(fitted / "data" / "dataset.csv")) == 30


def test_console_script_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "wordlediff.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "synth" in res.stdout
