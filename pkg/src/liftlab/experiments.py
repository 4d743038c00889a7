"""Experiments that check the probabilistic claims behind the algorithm.

Every experiment returns a JSON-ready dict with a boolean ``passed`` and,
where there is a curve to draw, ``rows`` of (a, empirical, exact_or_bound, N).
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy import stats as sps

from .base_graph import build_join_graph
from .colouring import Status, run
from .lift import count_cycles, compose, sample_full_permutation
from .oracle import SimpleGraph, chromatic_number
from .stats.gaps import (
    continuous_gap_matrix,
    coupled_gap_matrices,
    discrete_gap_bound,
    fit_offset_constant,
    free_run_length,
    gap_survival_exact,
    subset_gap_bound,
    subset_longest_runs,
)
from .stats.harness import (
    STAGES,
    TrialConfig,
    max_chunk_violations,
    run_trials,
    stage_hazards,
    summarize,
    trial_seed,
)
from .stats.inference import (
    cycle_count_variance,
    harmonic,
    ks_test,
    nonincreasing_within_ci,
    wilson_interval,
)

KS_ALPHA = 0.01
CHI2_ALPHA = 0.01


def cycle_count_distribution(h: int) -> np.ndarray:
    """P[a uniform permutation of h points has c cycles], c = 0..h."""
    # generating function prod_{i<h} (i + x) / (i + 1)
    p = np.zeros(h + 1)
    p[0] = 1.0
    for i in range(h):
        nxt = p * (i / (i + 1))
        nxt[1:] += p[:-1] / (i + 1)
        p = nxt
    return p


def cycles_experiment(h: int = 1000, samples: int = 10_000, seed: int = 0, k: int = 3) -> dict:
    rng = np.random.default_rng(seed)
    counts = np.array(
        [count_cycles(compose([sample_full_permutation(h, rng) for _ in range(k)])) for _ in range(samples)]
    )
    expected = harmonic(h)
    stderr = math.sqrt(cycle_count_variance(h) / samples)
    z = (counts.mean() - expected) / stderr
    dist = cycle_count_distribution(h)
    emp = np.bincount(counts, minlength=h + 1) / samples
    top = int(counts.max())
    return {
        "experiment": "cycles",
        "h": h,
        "k": k,
        "samples": samples,
        "seed": seed,
        "mean": float(counts.mean()),
        "expected": expected,
        "stderr": stderr,
        "z": float(z),
        "passed": bool(abs(z) <= 3),
        "rows": [(c, float(emp[c]), float(dist[c]), None) for c in range(1, top + 1)],
    }


def _survival_cdf(n: int):
    return lambda a: 1.0 - (1.0 - np.clip(a, 0.0, 1.0)) ** n


def continuous_gaps_experiment(n: int = 100, samples: int = 10_000, seed: int = 0) -> dict:
    """KS test of every gap index against 1 - (1 - a)^n.

    ``passed`` uses the Bonferroni-adjusted smallest p-value, so the family of
    n + 1 tests has level 0.01; ``failing_indices`` lists indices whose own
    p-value is at or below 0.01.
    """
    gaps = continuous_gap_matrix(n, samples, np.random.default_rng(seed))
    cdf = _survival_cdf(n)
    pvalues = [ks_test(gaps[:, k], cdf).p_value for k in range(n + 1)]
    mid = n // 2
    two = sps.ks_2samp(gaps[:, 0], gaps[:, mid])
    grid = np.linspace(0.0, min(1.0, 8.0 / n), 41)
    pooled = gaps.ravel()
    rows = [(float(a), float(np.mean(pooled > a)), gap_survival_exact(n, float(a)), None) for a in grid]
    adjusted = float(min(1.0, min(pvalues) * len(pvalues)))
    return {
        "experiment": "gaps-cont",
        "n": n,
        "samples": samples,
        "seed": seed,
        "min_p": float(min(pvalues)),
        "p_value": adjusted,
        "failing_indices": [k for k, p in enumerate(pvalues) if p <= KS_ALPHA],
        "exchangeability_p": float(two.pvalue),
        "passed": bool(adjusted > KS_ALPHA and two.pvalue > KS_ALPHA),
        "rows": rows,
    }


def _threshold_freq(gaps: np.ndarray, a: float, n: int, N: int) -> float:
    return float(np.mean(gaps > a * N / n))


def discrete_gaps_experiment(
    n: int = 100,
    Ns: Sequence[int] = (1000, 10_000),
    calibration: Sequence[float] = (1.0, 3.0, 6.0),
    held_out: Sequence[float] = (2.0, 4.0, 8.0),
    samples: int = 20_000,
    seed: int = 0,
) -> dict:
    """Gap frequencies of n draws from {1..N} against exp(-a + c n / N).

    Frequencies pool all n + 1 gap indices; c is the smallest non-negative
    constant that covers the calibration grid.
    """
    rng = np.random.default_rng(seed)
    coupling_ok = True
    data = {}
    for N in Ns:
        cont, disc = coupled_gap_matrices(n, N, samples, rng)
        coupling_ok &= bool(np.all(disc <= N * cont + 2 + 1e-9))
        data[N] = disc
    calib = [(a, n, N, _threshold_freq(data[N], a, n, N), 1.0) for N in Ns for a in calibration]
    c = fit_offset_constant(calib)
    rows, violations = [], []
    for N in Ns:
        for a in held_out:
            freq = _threshold_freq(data[N], a, n, N)
            bound = discrete_gap_bound(a, n, N, c)
            rows.append((a, freq, bound, N))
            if freq > bound:
                violations.append({"a": a, "N": N, "freq": freq, "bound": bound})
    return {
        "experiment": "gaps-disc",
        "n": n,
        "Ns": list(Ns),
        "samples": samples,
        "seed": seed,
        "c": c,
        "coupling_ok": coupling_ok,
        "violations": violations,
        "passed": coupling_ok and not violations,
        "rows": rows,
    }


def subset_gaps_experiment(
    n: int = 100,
    Ns: Sequence[int] = (1000, 10_000),
    calibration: Sequence[float] = (1.0, 3.0, 6.0),
    held_out: Sequence[float] = (2.0, 4.0, 8.0),
    samples: int = 20_000,
    seed: int = 0,
) -> dict:
    """Frequency of a free run of ceil(aN/n) in a random n-subset vs (n+1)exp(-a + c n/N)."""
    rng = np.random.default_rng(seed)
    runs = {N: subset_longest_runs(n, N, samples, rng) for N in Ns}

    def freq(a, N):
        return float(np.mean(runs[N] >= free_run_length(n, a, N)))

    c = fit_offset_constant([(a, n, N, freq(a, N), n + 1) for N in Ns for a in calibration])
    rows, violations = [], []
    for N in Ns:
        for a in held_out:
            f, bound = freq(a, N), subset_gap_bound(a, n, N, c)
            rows.append((a, f, bound, N))
            if f > bound:
                violations.append({"a": a, "N": N, "freq": f, "bound": bound})
    return {
        "experiment": "subset-gaps",
        "n": n,
        "Ns": list(Ns),
        "samples": samples,
        "seed": seed,
        "c": c,
        "violations": violations,
        "passed": not violations,
        "rows": rows,
    }


def _sweep(k, s, hs, trials, seed, workers, **options):
    config = TrialConfig(k=k, s=s, hs=tuple(hs), trials=trials, master_seed=seed, run_options=options)
    outcomes = list(run_trials(config, workers=workers))
    by_h = {h: [o for o in outcomes if o.h == h] for h in hs}
    return outcomes, by_h


def max_chunk_experiment(k=3, s=2, hs=(1000, 10_000, 100_000), trials=200, seed=0, workers=1) -> dict:
    _, by_h = _sweep(k, s, hs, trials, seed, workers)
    per_h = [max_chunk_violations(by_h[h]) for h in hs]
    measured = [e for e in per_h if e is not None]
    return {
        "experiment": "max-chunk",
        "k": k,
        "s": s,
        "hs": list(hs),
        "trials": trials,
        "seed": seed,
        "violation_freq": [e.to_json() if e else None for e in per_h],
        "passed": nonincreasing_within_ci(measured),
    }


def chunk_cycles_experiment(k=3, s=2, hs=(1000, 10_000, 100_000), trials=200, seed=0, workers=1) -> dict:
    _, by_h = _sweep(k, s, hs, trials, seed, workers)
    per_h = []
    for h in hs:
        ranks = [o.chunk_cycles for o in by_h[h] if o.chunk_cycles is not None]
        per_h.append(wilson_interval(sum(r > 0 for r in ranks), len(ranks)) if ranks else None)
    measured = [e for e in per_h if e is not None]
    return {
        "experiment": "chunk-cycles",
        "k": k,
        "s": s,
        "hs": list(hs),
        "trials": trials,
        "seed": seed,
        "cycle_freq": [e.to_json() if e else None for e in per_h],
        "passed": nonincreasing_within_ci(measured),
    }


def trend_checks(by_h: dict) -> dict[str, bool]:
    """Nonincreasing-within-CI verdict per failure stage and for the chunk bound.

    ``by_h`` maps each h, in increasing order, to its outcomes.  Phase I is
    left out: its cycle-count threshold is a fixed (ln h)^2 and it is not part
    of the trend claim.
    """
    hazards = [stage_hazards(outs) for outs in by_h.values()]
    checks = {}
    for st in STAGES[1:]:
        series = [hz[st.value] for hz in hazards if hz[st.value] is not None]
        checks[st.value] = nonincreasing_within_ci(series)
    bound = [e for e in map(max_chunk_violations, by_h.values()) if e is not None]
    checks["MaxChunkBound"] = nonincreasing_within_ci(bound)
    return checks


def failure_trends(k=3, s=2, hs=(1000, 10_000, 100_000), trials=200, seed=0, workers=1) -> dict:
    """Per-stage failure hazards and chunk-bound violations across h."""
    outcomes, by_h = _sweep(k, s, hs, trials, seed, workers)
    checks = trend_checks({h: by_h[h] for h in sorted(hs)})
    proper = all(_success_is_proper(o) for o in outcomes)
    return {
        "experiment": "failure-trends",
        "k": k,
        "s": s,
        "hs": list(hs),
        "trials": trials,
        "seed": seed,
        "summaries": [summarize(by_h[h]) for h in hs],
        "checks": checks,
        "successes_proper": proper,
        "passed": all(checks.values()) and proper,
    }


def _success_is_proper(o) -> bool:
    # run() already verifies; a Success without a colouring would be a bug
    return o.status != Status.SUCCESS or (o.colouring is not None and len(np.unique(o.colouring)) == 3)


def pale_invariant_experiment(k=3, s=2, h=10_000, trials=1000, seed=0, max_attempts=None) -> dict:
    """Pale-set bookkeeping over ``trials`` trials whose Phase II completes.

    p(t) = s r(0) + (s - 2) t for every t <= T, and the chunk snapshot right
    after P(0) has m = s (k - 2) n: each of the s n pale vertices has k - 1
    uncoloured neighbours and so adds k - 2 chunk-edges (m = 2n for k=3, s=2).
    """
    base = build_join_graph(k, s)
    max_attempts = max_attempts or 20 * trials
    good = violations = attempts = 0
    bad = []
    while good < trials and attempts < max_attempts:
        out = run(base, h, trial_seed(seed, attempts), trace=True)
        attempts += 1
        if out.status in (Status.TOO_MANY_CYCLES, Status.DOUBLE_RED, Status.PALE_COLLISION, Status.ADJACENT_REDS):
            continue
        good += 1
        sizes = out.trace["pale_sizes"]
        expect = [s * out.r0 + (s - 2) * t for t in range(len(sizes))]
        snap = out.trace["snapshot"]
        ok = sizes == expect and snap["m"] == s * (k - 2) * snap["n"] and snap["n"] == out.r0
        if k == 3 and s == 2:
            ok &= out.pT == 2 * out.r0
        if not ok:
            violations += 1
            if len(bad) < 5:
                bad.append({"seed": out.seed, "pale_sizes": sizes[:10], "snapshot": snap})
    return {
        "experiment": "pale-invariant",
        "k": k,
        "s": s,
        "h": h,
        "trials": good,
        "attempts": attempts,
        "violations": violations,
        "examples": bad,
        "passed": good >= trials and violations == 0,
    }


def uniformity_experiment(k=3, s=2, h=200, trials=10_000, seed=0, bins=10) -> dict:
    """Chi-square test that each Phase II draw is uniform over the non-red part of its fibre."""
    base = build_join_graph(k, s)
    observed = np.zeros(bins)
    expected = np.zeros(bins)
    for i in range(trials):
        out = run(base, h, trial_seed(seed, i), trace=True)
        for _, rank, size in out.trace["draws"]:
            observed[rank * bins // size] += 1
            edges = np.ceil(np.arange(bins + 1) * size / bins)
            expected += np.diff(edges) / size
    res = sps.chisquare(observed, expected * observed.sum() / expected.sum())
    return {
        "experiment": "uniformity",
        "h": h,
        "trials": trials,
        "draws": int(observed.sum()),
        "chi2": float(res.statistic),
        "p_value": float(res.pvalue),
        "passed": bool(res.pvalue > CHI2_ALPHA),
    }


def exchangeability_experiment(k=3, s=2, h=10_000, trials=10_000, seed=0) -> dict:
    """Lazy exposure vs upfront sampling: success rate and cycle count within 3 sigma."""
    base = build_join_graph(k, s)
    res = {}
    for schedule, offset in (("lazy", 0), ("upfront", 1)):
        outs = [run(base, h, trial_seed(seed + offset, i), schedule=schedule) for i in range(trials)]
        succ = np.array([o.success for o in outs], dtype=float)
        cyc = np.array([o.cycles for o in outs], dtype=float)
        res[schedule] = (succ, cyc)
    (s1, c1), (s2, c2) = res["lazy"], res["upfront"]
    pooled = (s1.sum() + s2.sum()) / (2 * trials)
    se_succ = math.sqrt(max(pooled * (1 - pooled), 1e-12) * 2 / trials)
    z_succ = (s1.mean() - s2.mean()) / se_succ
    se_cyc = math.sqrt(c1.var(ddof=1) / trials + c2.var(ddof=1) / trials)
    z_cyc = (c1.mean() - c2.mean()) / se_cyc
    return {
        "experiment": "exchangeability",
        "h": h,
        "trials": trials,
        "success_rate": {"lazy": float(s1.mean()), "upfront": float(s2.mean())},
        "mean_cycles": {"lazy": float(c1.mean()), "upfront": float(c2.mean())},
        "z_success": float(z_succ),
        "z_cycles": float(z_cyc),
        "passed": bool(abs(z_succ) <= 3 and abs(z_cyc) <= 3),
    }


def oracle_agreement_experiment(k=3, s=2, hs=range(2, 9), lifts=200, seed=0, cap=5) -> dict:
    """Exact chromatic numbers of small lifts against the algorithm's verdicts."""
    base = build_join_graph(k, s)
    hs = list(hs)
    chis, disagreements, successes = {}, [], 0
    for i in range(lifts):
        h = hs[i % len(hs)]
        out = run(base, h, trial_seed(seed, i), keep_lift=True)
        chi = chromatic_number(SimpleGraph.from_lift(out.lift), cap)
        chis[chi] = chis.get(chi, 0) + 1
        if out.success:
            successes += 1
            if chi is None or chi > 3:
                disagreements.append({"seed": out.seed, "h": h, "chi": chi})
    in_range = all(c in (2, 3, 4) for c in chis)
    return {
        "experiment": "oracle-agreement",
        "lifts": lifts,
        "successes": successes,
        "chromatic_numbers": {str(c): n for c, n in sorted(chis.items(), key=lambda kv: (kv[0] is None, kv[0]))},
        "disagreements": disagreements,
        "passed": in_range and not disagreements,
    }


LEMMAS = {
    "cycles": cycles_experiment,
    "gaps-cont": continuous_gaps_experiment,
    "gaps-disc": discrete_gaps_experiment,
    "subset-gaps": subset_gaps_experiment,
    "max-chunk": max_chunk_experiment,
    "chunk-cycles": chunk_cycles_experiment,
    "uniformity": uniformity_experiment,
}
