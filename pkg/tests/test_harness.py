import json
import math
import os

import numpy as np
import pytest

from randchan import cli
from randchan.channel import load_channel_csv, load_gain_csv, normalize_rows
from randchan.distributions import exponential, sample_gain_matrix
from randchan.harness import (
    DesignStudyConfig,
    DesignStudyRecord,
    SweepConfig,
    SweepRecord,
    emit_results,
    load_design_config,
    load_sweep_config,
    run_capacity_sweep,
    run_design_study,
)


def small_sweep_config(**kw):
    base = dict(
        family=exponential(1.0),
        n_values=[8, 16],
        gamma=1.0,
        repeats=2,
        tol=1e-5,
        seed=17,
    )
    base.update(kw)
    return SweepConfig(**base)


def records_equal_modulo_walltime(a, b, tol=0.0):
    assert len(a) == len(b)
    for ra, rb in zip(a, b):
        assert (ra.n, ra.repeat, ra.converged, ra.iterations) == (rb.n, rb.repeat, rb.converged, rb.iterations)
        assert abs(ra.lower_bits - rb.lower_bits) <= tol
        assert abs(ra.upper_bits - rb.upper_bits) <= tol
        assert abs(ra.asymptotic_bits - rb.asymptotic_bits) <= tol


# ------------------------------------------------------------------ sweeps


def test_sweep_shape_contract():
    recs = run_capacity_sweep(small_sweep_config(n_values=[10], repeats=1))
    assert len(recs) == 1
    r = recs[0]
    assert r.n == 10 and r.repeat == 0
    assert r.lower_bits <= r.upper_bits
    assert r.converged and r.upper_bits - r.lower_bits <= 1e-5
    assert r.wall_time_s > 0


def test_sweep_ordering_and_gap():
    recs = run_capacity_sweep(small_sweep_config())
    assert [(r.n, r.repeat) for r in recs] == [(8, 0), (8, 1), (16, 0), (16, 1)]
    for r in recs:
        assert r.lower_bits <= r.upper_bits
        assert r.converged and (r.upper_bits - r.lower_bits) <= 1e-5


def test_sweep_runs_are_independent_of_other_sizes():
    # per-run seeds depend only on (seed, n, repeat)
    both = run_capacity_sweep(small_sweep_config())
    only16 = run_capacity_sweep(small_sweep_config(n_values=[16]))
    records_equal_modulo_walltime([r for r in both if r.n == 16], only16)


def test_sweep_thread_count_does_not_change_results():
    cfg = small_sweep_config()
    records_equal_modulo_walltime(
        run_capacity_sweep(cfg, threads=1), run_capacity_sweep(cfg, threads=4)
    )


def test_sweep_respects_threads_env(monkeypatch):
    cfg = small_sweep_config()
    monkeypatch.setenv("RANDCHAN_THREADS", "3")
    records_equal_modulo_walltime(run_capacity_sweep(cfg), run_capacity_sweep(cfg, threads=1))


def test_sweep_nonconvergence_flagged_not_raised():
    recs = run_capacity_sweep(small_sweep_config(tol=1e-15, max_iter=2))
    assert all(not r.converged for r in recs)
    assert all(r.lower_bits <= r.upper_bits for r in recs)


def test_sweep_scale_free_in_exponential_rate():
    # same seed reuses the same uniforms; rate only rescales the gains
    lo = run_capacity_sweep(small_sweep_config(family=exponential(0.1)))
    hi = run_capacity_sweep(small_sweep_config(family=exponential(10.0)))
    records_equal_modulo_walltime(lo, hi, tol=1e-12)
    g_lo = sample_gain_matrix(exponential(0.1), 16, 1.0, 5).entries
    g_hi = sample_gain_matrix(exponential(10.0), 16, 1.0, 5).entries
    W_lo = normalize_rows(g_lo).entries
    W_hi = normalize_rows(g_hi).entries
    assert np.max(np.abs(W_lo - W_hi)) < 1e-12


def test_sweep_small_alphabet_midpoints_spread():
    # 10x10 channels vary a lot run to run; 5 repeats should span >= 0.05
    cfg = small_sweep_config(family=exponential(0.1), n_values=[10], repeats=5, tol=1e-4, seed=0)
    recs = run_capacity_sweep(cfg)
    mids = np.array([0.5 * (r.lower_bits + r.upper_bits) for r in recs])
    assert mids.max() - mids.min() >= 0.05


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        small_sweep_config(n_values=[])
    with pytest.raises(ValueError):
        small_sweep_config(n_values=[10, 10])
    with pytest.raises(ValueError):
        small_sweep_config(n_values=[20, 10])
    with pytest.raises(ValueError):
        small_sweep_config(repeats=0)
    with pytest.raises(ValueError):
        small_sweep_config(tol=0.0)


# ------------------------------------------------------------- design study


def test_design_study_basic_and_degenerate_flag():
    cfg = DesignStudyConfig(n_values=[12, 24], trials=1, seed=5)
    recs = run_design_study(cfg)
    assert [r.n for r in recs] == [12, 24]
    for r in recs:
        assert r.degenerate_variance
        assert r.optimal_variance == 0.0 and r.suboptimal_variance == 0.0
        assert r.asymptote_bits == pytest.approx(math.log2(3.0) / 2.0, abs=1e-12)
        assert r.optimal_mean >= r.suboptimal_mean - 1e-12


def test_design_study_mean_variance():
    cfg = DesignStudyConfig(n_values=[16], trials=8, seed=5)
    (rec,) = run_design_study(cfg)
    assert not rec.degenerate_variance
    assert rec.optimal_variance > 0.0
    assert 0.0 <= rec.suboptimal_mean <= math.log2(16)


def test_design_study_matches_construction_level():
    # frozen derived oracle: 2000-trial Monte-Carlo mean of the gain at
    # n=100 under the spec'd mutual-information evaluation is 0.75016(40)
    cfg = DesignStudyConfig(n_values=[100], trials=300, seed=909)
    (rec,) = run_design_study(cfg)
    assert rec.suboptimal_mean == pytest.approx(0.75016, abs=0.004)
    assert rec.optimal_mean == pytest.approx(0.75016, abs=0.004)
    assert abs(rec.optimal_mean - rec.suboptimal_mean) < 1e-3


# ------------------------------------------------------------------ emitters


def test_emit_csv_shapes(tmp_path):
    recs = run_capacity_sweep(small_sweep_config(n_values=[10], repeats=1))
    one = tmp_path / "one.csv"
    emit_results(recs, format="csv", path=one)
    lines = one.read_text().splitlines()
    assert len(lines) == 2
    assert lines[0] == "n,repeat,lower_bits,upper_bits,asymptotic_bits,converged,iterations,wall_time_s"

    empty = tmp_path / "empty.csv"
    emit_results([], format="csv", path=empty, record_type=SweepRecord)
    assert empty.read_text().splitlines() == [
        "n,repeat,lower_bits,upper_bits,asymptotic_bits,converged,iterations,wall_time_s"
    ]


def test_emit_requires_record_type_for_empty(tmp_path):
    with pytest.raises(ValueError):
        emit_results([], format="csv", path=tmp_path / "x.csv")
    with pytest.raises(ValueError):
        emit_results([], format="yaml", path=tmp_path / "x.yaml", record_type=SweepRecord)


def test_emit_byte_identical_and_excludes(tmp_path):
    recs = run_capacity_sweep(small_sweep_config())
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_results(recs, format="csv", path=p1, exclude_fields=("wall_time_s",))
    emit_results(recs, format="csv", path=p2, exclude_fields=("wall_time_s",))
    assert p1.read_bytes() == p2.read_bytes()
    assert "wall_time_s" not in p1.read_text().splitlines()[0]

    j1, j2 = tmp_path / "a.json", tmp_path / "b.json"
    emit_results(recs, format="json", path=j1, exclude_fields=("wall_time_s",))
    emit_results(recs, format="json", path=j2, exclude_fields=("wall_time_s",))
    assert j1.read_bytes() == j2.read_bytes()
    payload = json.loads(j1.read_text())
    assert [row["n"] for row in payload] == [8, 8, 16, 16]
    assert set(payload[0]) == {
        "n", "repeat", "lower_bits", "upper_bits", "asymptotic_bits", "converged", "iterations",
    }


def test_emit_float_formatting(tmp_path):
    rec = SweepRecord(
        n=3, repeat=0, lower_bits=1 / 3, upper_bits=2 / 3,
        asymptotic_bits=0.125, converged=True, iterations=7, wall_time_s=0.0,
    )
    path = tmp_path / "fmt.csv"
    emit_results([rec], format="csv", path=path)
    row = path.read_text().splitlines()[1].split(",")
    assert row[2] == "0.333333333333"  # 12 significant digits
    assert row[5] == "true"


# ------------------------------------------------------------------ configs


def test_config_loaders(tmp_path):
    sweep_blob = {
        "family": {"family": "exponential", "params": {"rate": 0.5}},
        "n_values": [4, 8],
        "gamma": 1.5,
        "repeats": 2,
        "tol": 1e-4,
        "seed": 3,
        "out": str(tmp_path / "s.csv"),
    }
    spath = tmp_path / "sweep.json"
    spath.write_text(json.dumps(sweep_blob))
    cfg = load_sweep_config(spath)
    assert cfg.family.family == "exponential" and cfg.gamma == 1.5
    assert cfg.n_values == (4, 8)

    design_blob = {"l1": 1.0, "u1": 10.0, "l2": 0.0, "u2": 2.0, "n_values": [10], "trials": 2, "seed": 1}
    dpath = tmp_path / "design.json"
    dpath.write_text(json.dumps(design_blob))
    dcfg = load_design_config(dpath)
    assert dcfg.trials == 2 and dcfg.n_values == (10,)

    with pytest.raises(OSError):
        load_sweep_config(tmp_path / "missing.json")


# ---------------------------------------------------------------------- CLI


def test_cli_generate_and_capacity_round_trip(tmp_path, capsys):
    out = tmp_path / "V.csv"
    code = cli.main([
        "generate", "--family", "exp", "--param", "rate=0.1",
        "--n", "12", "--gamma", "1.0", "--seed", "42", "--out", str(out),
    ])
    assert code == 0
    gain = load_gain_csv(out)
    ref = sample_gain_matrix(exponential(0.1), 12, 1.0, 42)
    assert np.max(np.abs(gain.entries - ref.entries)) < 1e-12

    wout = tmp_path / "W.csv"
    code = cli.main([
        "generate", "--family", "exp", "--param", "rate=0.1",
        "--n", "12", "--seed", "42", "--out", str(wout), "--normalize",
    ])
    assert code == 0
    W = load_channel_csv(wout)  # loader enforces row-stochasticity

    code = cli.main(["capacity", str(wout), "--tol", "1e-6", "--json"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["converged"]
    assert payload["lower_bits"] <= payload["upper_bits"]
    assert len(payload["input_distribution"]) == W.n


def test_cli_capacity_text_output(tmp_path, capsys):
    path = tmp_path / "bsc.csv"
    path.write_text("0.9,0.1\n0.1,0.9\n")
    code = cli.main(["capacity", str(path), "--tol", "1e-9"])
    assert code == 0
    text = capsys.readouterr().out
    assert "lower" in text and "upper" in text and "gap" in text and "iterations" in text


def test_cli_rate_bound_json(capsys):
    code = cli.main([
        "rate-bound", "--family", "exp", "--param", "rate=1",
        "--n", "50", "--m", "50", "--t", "0.5", "--json",
    ])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["T_defaulted"] is True
    assert payload["a_realized_from_sample"] is True
    assert 0 < payload["capacity_tail"] <= 1.0
    assert payload["capacity_tail_raw"] >= payload["capacity_tail"]
    assert payload["K"] == pytest.approx(5.18870715696, rel=1e-6)


def test_cli_design_csv(tmp_path):
    out = tmp_path / "gains.csv"
    code = cli.main([
        "design", "--l1", "1", "--u1", "10", "--l2", "0", "--u2", "2",
        "--n", "20", "--trials", "3", "--seed", "7", "--mode", "suboptimal",
        "--out", str(out),
    ])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "trial,n,mode,gain_bits"
    assert len(lines) == 4
    assert lines[1].startswith("0,20,suboptimal,")


def test_cli_sweep_exit_codes(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    blob = {
        "family": {"family": "exponential", "params": {"rate": 1.0}},
        "n_values": [6, 12],
        "repeats": 2,
        "tol": 1e-5,
        "seed": 9,
        "out": str(out),
    }
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(blob))
    assert cli.main(["sweep", "--config", str(cfg)]) == 0
    header = out.read_text().splitlines()[0]
    assert "wall_time_s" not in header

    timings = tmp_path / "timings.csv"
    assert cli.main(["sweep", "--config", str(cfg), "--timings", str(timings)]) == 0
    assert "wall_time_s" in timings.read_text().splitlines()[0]

    blob["max_iter"] = 1
    blob["tol"] = 1e-15
    cfg.write_text(json.dumps(blob))
    assert cli.main(["sweep", "--config", str(cfg)]) == 2

    assert cli.main(["sweep", "--config", str(tmp_path / "nope.json")]) == 1
    capsys.readouterr()


def test_cli_design_study(tmp_path):
    out = tmp_path / "study.csv"
    blob = {"l1": 1.0, "u1": 10.0, "l2": 0.0, "u2": 2.0, "n_values": [10, 20], "trials": 2, "seed": 1, "out": str(out)}
    cfg = tmp_path / "dcfg.json"
    cfg.write_text(json.dumps(blob))
    assert cli.main(["design-study", "--config", str(cfg)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("n,trials,optimal_mean,optimal_variance,suboptimal_mean")
    assert len(lines) == 3


def test_cli_usage_errors_exit_1(capsys):
    assert cli.main(["capacity", "does-not-exist.csv"]) == 1
    assert cli.main(["generate", "--family", "nosuch", "--n", "4", "--out", "x.csv"]) == 1
    capsys.readouterr()
