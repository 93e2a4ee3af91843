import csv
import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from mixhypo.cli import CSV_HEADER, main
from mixhypo.family import FamilySpec, make_family
from mixhypo.verify import ks_critical, ks_distance

GOLDEN = Path(__file__).parent / "golden"

EVAL_ARGS = ["eval", "--family", "MHW", "--shared", "1", "--vector", "1,0.5",
             "--t", "0.5", "--t", str(math.log(2)), "--t", "2"]
SAMPLE_ARGS = ["sample", "--family", "MHT", "--shared", "1", "--vector", "1,2",
               "--count", "10", "--seed", "42"]


def run(args, tmp_path, name="out.txt"):
    out = tmp_path / name
    code = main(args + ["--output", str(out)])
    return code, (out.read_bytes() if out.exists() else b"")


def rows(data: bytes):
    return list(csv.DictReader(data.decode().splitlines()))


# -- golden files -----------------------------------------------------------------


def test_eval_golden(tmp_path):
    code, first = run(EVAL_ARGS, tmp_path, "a.csv")
    _, second = run(EVAL_ARGS, tmp_path, "b.csv")
    assert code == 0
    assert first == second == (GOLDEN / "eval_mhw.csv").read_bytes()


def test_sample_golden(tmp_path):
    code, first = run(SAMPLE_ARGS, tmp_path, "a.txt")
    _, second = run(SAMPLE_ARGS, tmp_path, "b.txt")
    assert code == 0
    assert first == second == (GOLDEN / "sample_mht.txt").read_bytes()


def test_check_golden_is_stable(tmp_path):
    args = ["check", "--family", "MHE", "--samples", "20000"]
    code, first = run(args, tmp_path, "a.json")
    _, second = run(args, tmp_path, "b.json")
    assert code == 0 and first == second


# -- eval ---------------------------------------------------------------------------


def test_eval_values(tmp_path):
    code, data = run(EVAL_ARGS, tmp_path)
    assert data.decode().splitlines()[0] == CSV_HEADER
    r = rows(data)[1]
    assert float(r["pdf"]) == pytest.approx(0.5, rel=1e-15)
    assert float(r["cdf"]) == pytest.approx(0.25, rel=1e-15)
    assert float(r["reliability"]) == pytest.approx(0.75, rel=1e-15)
    assert float(r["hazard"]) == pytest.approx(2 / 3, rel=1e-14)


def test_eval_single_exponential_is_textbook(tmp_path):
    code, data = run(["eval", "--family", "MHW", "--shared", "1", "--vector", "0.5",
                      "--t-min", "0", "--t-max", "3", "--points", "7"], tmp_path)
    assert code == 0
    for r in rows(data):
        t = float(r["t"])
        assert float(r["pdf"]) == pytest.approx(2 * math.exp(-2 * t), rel=1e-14)
        assert float(r["cdf"]) == pytest.approx(-math.expm1(-2 * t), rel=1e-14, abs=1e-300)
        assert float(r["hazard"]) == pytest.approx(2.0, rel=1e-12)


def test_eval_default_grid(tmp_path):
    code, data = run(["eval", "--family", "MHG", "--shared", "1", "--vector", "0,1"], tmp_path)
    assert code == 0
    r = rows(data)
    assert len(r) == 512
    assert float(r[0]["cdf"]) == pytest.approx(0.001, rel=1e-9)
    assert float(r[-1]["cdf"]) == pytest.approx(0.999, rel=1e-9)


def test_eval_uses_full_precision(tmp_path):
    _, data = run(EVAL_ARGS, tmp_path)
    for line in data.decode().splitlines()[1:]:
        for v in line.split(","):
            assert v == format(float(v), ".17g")


def test_separation_error_exit_code(tmp_path, capsys):
    code, _ = run(["eval", "--family", "MHW", "--shared", "1", "--vector", "1,1", "--t", "1"], tmp_path)
    assert code == 3
    assert "separation" in capsys.readouterr().err


def test_unknown_config_key_is_rejected(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"spec": {"family": "MHW", "shared": 1, "vector": [1, 2]}, "colour": "red"}))
    code, _ = run(["eval", "--config", str(cfg)], tmp_path)
    assert code == 2


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"spec": {"family": "MHW", "shared": 2, "vector": [1, 2]}, "t": [1.0]}))
    _, a = run(["eval", "--config", str(cfg)], tmp_path, "a.csv")
    _, b = run(["eval", "--config", str(cfg), "--shared", "1"], tmp_path, "b.csv")
    pdf = lambda d: float(rows(d)[0]["pdf"])  # noqa: E731
    assert pdf(a) == pytest.approx(float(make_family(FamilySpec("MHW", 2, (1, 2))).pdf(1.0)), rel=1e-15)
    assert pdf(b) == pytest.approx(float(make_family(FamilySpec("MHW", 1, (1, 2))).pdf(1.0)), rel=1e-15)


def test_missing_spec_is_config_error(tmp_path):
    code, _ = run(["eval", "--t", "1"], tmp_path)
    assert code == 2


# -- sample --------------------------------------------------------------------------


def test_sample_requires_seed(tmp_path):
    code, _ = run(SAMPLE_ARGS[:-2], tmp_path)
    assert code == 2


def test_pareto_samples_respect_lower_bound(tmp_path):
    _, data = run(SAMPLE_ARGS[:-4] + ["--count", "1000", "--seed", "1"], tmp_path)
    x = np.array([float(v) for v in data.decode().split()])
    assert x.size == 1000 and x.min() >= 1.0


def test_sample_matches_eval_cdf(tmp_path):
    _, data = run(["sample", "--family", "MHF", "--shared", "3", "--vector", "1,1.5,2",
                   "--count", "100000", "--seed", "8"], tmp_path)
    x = np.array([float(v) for v in data.decode().split()])
    m = make_family(FamilySpec("MHF", 3, (1, 1.5, 2)))
    assert ks_distance(x, m.cdf) < ks_critical(x.size)


# -- fit -----------------------------------------------------------------------------


def test_sample_then_fit_round_trip(tmp_path):
    _, data = run(["sample", "--family", "MHT", "--shared", "1", "--vector", "1,3",
                   "--count", "10000", "--seed", "42"], tmp_path, "x.txt")
    (tmp_path / "x.txt").write_bytes(data)
    code, out = run(["fit", str(tmp_path / "x.txt"), "--family", "MHT", "--method", "mle"], tmp_path, "fit.json")
    assert code == 0
    res = json.loads(out)
    assert list(res) == sorted(res)
    got = np.array([res["params"]["shared"]] + res["params"]["vector"])
    assert np.all(np.abs(got / np.array([1.0, 1.0, 3.0]) - 1) <= 0.10)
    assert res["converged"] is True


def test_fit_reads_comments_and_blank_lines(tmp_path):
    rng = np.random.default_rng(0)
    lines = ["# exponential draws", ""] + [str(float(v)) for v in rng.exponential(2.0, 50)]
    (tmp_path / "d.txt").write_text("\n".join(lines) + "\n")
    code, out = run(["fit", str(tmp_path / "d.txt"), "--family", "MHW", "--method", "mom",
                     "--components", "1", "--fixed-shared", "1"], tmp_path, "fit.json")
    assert code == 0
    assert json.loads(out)["sample_size"] == 50


def test_fit_rejects_non_numeric_line(tmp_path):
    (tmp_path / "d.txt").write_text("1.0\n2.0\nabc\n")
    code, _ = run(["fit", str(tmp_path / "d.txt"), "--family", "MHW", "--method", "mle"], tmp_path)
    assert code == 2


def test_fit_insufficient_data(tmp_path):
    (tmp_path / "d.txt").write_text("1.0\n2.0\n3.0\n")
    code, _ = run(["fit", str(tmp_path / "d.txt"), "--family", "MHW", "--method", "mle",
                   "--components", "3"], tmp_path)
    assert code == 5


def test_fit_moment_box_error_is_config_error(tmp_path):
    (tmp_path / "d.txt").write_text("\n".join(str(1 + i / 10) for i in range(40)) + "\n")
    code, _ = run(["fit", str(tmp_path / "d.txt"), "--family", "MHF", "--method", "mom",
                   "--fixed-shared", "1.5"], tmp_path)
    assert code == 2


# -- check / figures -------------------------------------------------------------------


def test_check_filters_family(tmp_path):
    code, out = run(["check", "--family", "MHE", "--samples", "20000"], tmp_path)
    d = json.loads(out)
    assert code == 0
    assert {c["name"].split("[")[0] for c in d["checks"]} == {"MHE"}


def test_check_negative_tolerance_is_config_error(tmp_path):
    code, _ = run(["check", "--family", "MHE", "--tolerance", "closed_form_rel=-1"], tmp_path)
    assert code == 2


def test_check_failure_exit_code(tmp_path):
    code, _ = run(["check", "--family", "MHW", "--samples", "2000",
                   "--tolerance", "ks_coefficient=1e-6"], tmp_path)
    assert code == 6


def test_figures_written(tmp_path):
    code = main(["figures", "--output", str(tmp_path), "--points", "16"])
    assert code == 0
    files = sorted(p.name for p in tmp_path.glob("figure*.csv"))
    assert files == [f"figure{i}.csv" for i in range(1, 8)]
    header = (tmp_path / "figure3.csv").read_text().splitlines()[0]
    assert header == "curve,family,shared,vector,t,pdf,cdf,reliability,hazard"


def test_bad_log_level(tmp_path, monkeypatch):
    monkeypatch.setenv("MIXHYPO_LOG", "loud")
    code, _ = run(EVAL_ARGS, tmp_path)
    assert code == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "mixhypo.cli"] + EVAL_ARGS,
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.encode() == (GOLDEN / "eval_mhw.csv").read_bytes()
