import json
import math

import pytest

import banditlab


def test_oracle_hand_enumeration():
    p, i = banditlab.oracle("sprt", n=3, delta=1.0, t=1)
    assert p == pytest.approx(2 / 3, abs=1e-14)
    assert i == pytest.approx(math.log(3) - 2 / 3 * math.log(2), abs=1e-14)


def test_oracle_rejects_randomized_learner():
    with pytest.raises(banditlab.OracleUnsupported):
        banditlab.oracle("twophase", n=2, delta=0.5, t=2)


def test_estimate_matches_oracle():
    p, i = banditlab.oracle("sprt", n=2, delta=0.5, t=3)
    row = banditlab.estimate("sprt", n=2, delta=0.5, t=3, trials=100000, seed=1, derandomize=True)
    assert abs(row["p_hat"] - p) <= 3 * row["p_se"]
    assert abs(row["i_hat"] - i) <= 3 * row["i_se"]
    assert row["model"] == "standard"
    assert row["t_delta_sq"] == 3 * 0.25


def test_two_phase_has_no_information_column():
    row = banditlab.estimate("twophase", n=16, delta=0.5, t=8, trials=2000, seed=3)
    assert row["model"] == "two_phase"
    assert row["i_hat"] is None
    assert 0.0 <= row["p_hat"] <= 1.0


def test_run_log_matches_stats():
    out = banditlab.run("sprt", n=10, delta=0.3, best_arm=4, t=200, seed=7, index=2)
    assert out["pulls_used"] == len(out["log"]) == sum(out["pulls"])
    disp = [0] * 10
    for arm, reward in out["log"]:
        disp[arm - 1] += 1 if reward else -1
    assert disp == out["displacements"]


def test_posterior_and_divergences():
    w = banditlab.posterior([1, 0, 0], 1 / 3)
    assert w == pytest.approx([0.5, 0.25, 0.25], abs=1e-12)
    assert banditlab.kl_to_uniform(w) == pytest.approx(math.log(3) - 1.5 * math.log(2), abs=1e-12)
    assert banditlab.tv_binomial(1, 0.25, 0.75) == 0.5
    assert banditlab.kl_bernoulli(0.25, 0.75) == pytest.approx(0.5 * math.log(3), abs=1e-12)
    assert banditlab.fano_gap(1.0, math.log(8), 8) == pytest.approx(1.0)
    assert banditlab.hitting_prob_oracle(-1.0, 0.5, 10000) == pytest.approx(1 / 3, abs=1e-6)
    assert banditlab.choose_m_non_interactive(64, 0.5) == 3


def test_sweep_and_csv():
    cfg = {"algorithm": "sprt", "n": [8], "delta": [0.5], "t": [0, 4, 16], "trials": 2000, "seed": 11}
    rows = banditlab.sweep(json.dumps(cfg))
    assert [r["t"] for r in rows] == [0, 4, 16]
    csv = banditlab.sweep_csv(json.dumps(cfg))
    lines = csv.strip().split("\n")
    assert lines[0] == banditlab.CSV_HEADER
    assert len(lines) == 4


def test_sweep_rejects_unknown_keys():
    cfg = {"algorithm": "sprt", "n": 8, "delta": 0.5, "t": [1], "trials": 10, "seed": 1, "typo": True}
    with pytest.raises(ValueError):
        banditlab.sweep(json.dumps(cfg))


def test_slope():
    pts = [(t, 2.0 * t**2) for t in range(10, 101, 10)]
    assert banditlab.fit_loglog_slope(pts, 0, 1e9) == pytest.approx(2.0, abs=1e-9)
