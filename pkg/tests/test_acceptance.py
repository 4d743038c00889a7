"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -s``; the lines are
also collected into a section at the end of any pytest run that includes it.
"""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from liftlab import build_join_graph, verify_proper
from liftlab import experiments as ex
from liftlab.colouring import Status
from liftlab.colours import Colour
from liftlab.stats.harness import TrialConfig, run_trials

HS = (1000, 10_000, 100_000)
GENERALIZED = [(4, 2), (3, 3)]

# every Success seen by the sweeps below, checked independently of run()
AUDIT = {"successes": 0, "violations": 0}


def report(name, passed, detail):
    line = f"{'PASS' if passed else 'FAIL'} {name}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return passed


def audit(outcome):
    if outcome.status == Status.SUCCESS:
        AUDIT["successes"] += 1
        colours = set(np.unique(outcome.colouring).tolist())
        if not verify_proper(outcome.lift, outcome.colouring) or colours != {Colour.RED, Colour.BLACK, Colour.WHITE}:
            AUDIT["violations"] += 1
    outcome.lift = outcome.colouring = None
    return outcome


_SWEEPS = {}


def sweep(k, s, trials=200):
    if (k, s) not in _SWEEPS:
        config = TrialConfig(k=k, s=s, hs=HS, trials=trials, run_options={"keep_lift": True})
        start = time.perf_counter()
        outs = [audit(o) for o in run_trials(config)]
        _SWEEPS[k, s] = ({h: [o for o in outs if o.h == h] for h in HS}, time.perf_counter() - start)
    return _SWEEPS[k, s]


def test_criterion_1_exact_gap_law():
    start = time.perf_counter()
    r = ex.continuous_gaps_experiment(n=100, samples=10_000, seed=0)
    elapsed = time.perf_counter() - start
    ok = not r["failing_indices"] and elapsed < 5
    assert report(
        "criterion 1 (gap law)",
        ok,
        f"min p over {r['n'] + 1} gap indices = {r['min_p']:.4f} (> 0.01 needed), {elapsed:.2f}s (< 5s)",
    )


def test_criterion_2_cycle_count():
    start = time.perf_counter()
    r = ex.cycles_experiment(h=1000, samples=10_000, seed=0)
    elapsed = time.perf_counter() - start
    ok = abs(r["z"]) <= 3 and elapsed < 10
    assert report(
        "criterion 2 (cycle count)",
        ok,
        f"mean {r['mean']:.4f} vs H_1000 = {r['expected']:.4f}, z = {r['z']:.2f}, {elapsed:.2f}s (< 10s)",
    )


def _pale(k, s, label):
    r = ex.pale_invariant_experiment(k, s, h=10_000, trials=1000, seed=0)
    return report(
        label,
        r["passed"],
        f"G({k},{s}): {r['violations']} violations over {r['trials']} trials completing Phase II "
        f"({r['attempts']} attempted)",
    )


def test_criterion_3_pale_invariant():
    assert _pale(3, 2, "criterion 3 (pale-set invariant)")


def _oracle(k, s, label):
    start = time.perf_counter()
    r = ex.oracle_agreement_experiment(k, s, hs=range(2, 9), lifts=200, seed=0)
    elapsed = time.perf_counter() - start
    ok = r["passed"] and elapsed < 120
    return report(
        label,
        ok,
        f"G({k},{s}): chi counts {r['chromatic_numbers']}, {r['successes']} successes, "
        f"{len(r['disagreements'])} disagreements, {elapsed:.1f}s (< 120s)",
    )


def test_criterion_5_oracle_equivalence():
    assert _oracle(3, 2, "criterion 5 (oracle equivalence)")


def _trends(k, s, label):
    by_h, elapsed = sweep(k, s)
    checks = ex.trend_checks(by_h)
    rates = []
    for st in (Status.DOUBLE_RED, Status.PALE_COLLISION, Status.ADJACENT_REDS, Status.CYCLE):
        rates.append(f"{st.value} " + "/".join(str(sum(o.status == st for o in by_h[h])) for h in HS))
    over = [ex.max_chunk_violations(by_h[h]) for h in HS]
    rates.append("max chunk over bound " + "/".join(f"{e.successes}of{e.count}" if e else "n/a" for e in over))
    bad = [name for name, ok in checks.items() if not ok]
    ok = not bad and elapsed < 15 * 60
    detail = f"G({k},{s}) counts per h {HS}: " + "; ".join(rates) + f"; {elapsed:.0f}s"
    if bad:
        detail += f"; increasing: {', '.join(bad)}"
    return report(label, ok, detail)


def test_criterion_6_failure_trends():
    assert _trends(3, 2, "criterion 6 (failure trends)")


def test_criterion_7_exchangeability():
    r = ex.exchangeability_experiment(h=10_000, trials=10_000, seed=0)
    assert report(
        "criterion 7 (exposure exchangeability)",
        r["passed"],
        f"success {r['success_rate']['lazy']:.4f} vs {r['success_rate']['upfront']:.4f} (z = {r['z_success']:.2f}); "
        f"cycles {r['mean_cycles']['lazy']:.3f} vs {r['mean_cycles']['upfront']:.3f} (z = {r['z_cycles']:.2f})",
    )


def test_criterion_8_discrete_gap_bounds():
    d = ex.discrete_gaps_experiment(n=100, Ns=(1000, 10_000), seed=0)
    s = ex.subset_gaps_experiment(n=100, Ns=(1000, 10_000), seed=0)
    ok = d["passed"] and s["passed"]
    assert report(
        "criterion 8 (discrete gap bounds)",
        ok,
        f"draws: c = {d['c']:.3f}, {len(d['violations'])} violations, coupling ok = {d['coupling_ok']}; "
        f"subsets: c = {s['c']:.3f}, {len(s['violations'])} violations",
    )


@pytest.mark.parametrize("k, s", GENERALIZED)
def test_criterion_9_generalization(k, s):
    label = f"criterion 9 (G({k},{s}))"
    results = [
        _pale(k, s, f"{label} / pale-set invariant"),
        _oracle(k, s, f"{label} / oracle equivalence"),
        _trends(k, s, f"{label} / failure trends"),
    ]
    assert all(results)


def test_criterion_4_one_sided_correctness():
    # runs after the sweeps above; builds them if this test is run alone
    for k, s in [(3, 2)] + GENERALIZED:
        sweep(k, s)
    ok = AUDIT["violations"] == 0
    assert report(
        "criterion 4 (one-sided correctness)",
        ok,
        f"{AUDIT['successes']} Success trials across the sweeps, {AUDIT['violations']} improper or not 3 colours",
    )
