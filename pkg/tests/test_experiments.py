import math

import numpy as np
import pytest

from liftlab import experiments as ex
from liftlab.plotting import plot_curve, plot_sweep
from liftlab.stats.harness import TrialConfig, run_trials, summarize_by_h
from liftlab.stats.inference import harmonic


@pytest.mark.parametrize("h", [1, 5, 60])
def test_cycle_count_distribution(h):
    p = ex.cycle_count_distribution(h)
    assert p.sum() == pytest.approx(1)
    assert p[0] == 0
    assert (np.arange(h + 1) * p).sum() == pytest.approx(harmonic(h))
    assert p[h] == pytest.approx(1 / math.factorial(h))


def test_cycles_small():
    r = ex.cycles_experiment(h=100, samples=2000, seed=3)
    assert r["passed"]
    assert r["expected"] == pytest.approx(harmonic(100))


def test_uniformity_small():
    r = ex.uniformity_experiment(h=100, trials=600, seed=2)
    assert r["draws"] > 1000 and r["passed"]


def test_pale_invariant_small():
    for k, s in [(3, 2), (4, 2), (3, 3)]:
        r = ex.pale_invariant_experiment(k, s, h=2000, trials=20)
        assert r["passed"], r


def test_oracle_agreement_small():
    r = ex.oracle_agreement_experiment(lifts=30)
    assert r["passed"]
    assert sum(r["chromatic_numbers"].values()) == 30


def test_exchangeability_small():
    r = ex.exchangeability_experiment(h=1000, trials=300)
    assert set(r["success_rate"]) == {"lazy", "upfront"}
    assert abs(r["z_cycles"]) < 5


def test_failure_trends_small():
    r = ex.failure_trends(hs=(300, 3000), trials=30)
    assert set(r["checks"]) >= {"FailStep3DoubleRed", "FailStep7Cycle", "MaxChunkBound"}
    assert r["successes_proper"]


def test_plots(tmp_path):
    rows = ex.discrete_gaps_experiment(samples=1000)["rows"]
    assert plot_curve(rows, tmp_path / "a" / "curve.png").stat().st_size > 0
    summaries = summarize_by_h(list(run_trials(TrialConfig(hs=(300, 1000), trials=10))))
    assert plot_sweep(summaries, tmp_path / "sweep.png").stat().st_size > 0
