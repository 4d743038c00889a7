"""Monte Carlo driver for the colouring algorithm.

Trial i under master seed m uses the integer seed

    SeedSequence([m, i]).generate_state(1, uint64)[0]

so any single trial can be replayed with ``run(base, h, seed)`` and results do
not depend on how trials are spread over worker processes.
"""

from __future__ import annotations

import multiprocessing
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from ..base_graph import build_join_graph
from ..chunk_graph import chunk_size_bound
from ..colouring import Status, TrialOutcome, run
from .inference import EstimateCI, harmonic, wilson_interval

DEFAULT_MAX_WORK = 10**9

STAGES = (
    Status.TOO_MANY_CYCLES,
    Status.DOUBLE_RED,
    Status.PALE_COLLISION,
    Status.ADJACENT_REDS,
    Status.CYCLE,
)


class ResourceCapExceeded(ValueError):
    pass


def trial_seed(master_seed: int, index: int) -> int:
    return int(np.random.SeedSequence([master_seed, index]).generate_state(1, np.uint64)[0])


@dataclass
class TrialConfig:
    k: int = 3
    s: int = 2
    hs: Sequence[int] = (1000,)
    trials: int = 100
    master_seed: int = 0
    schedule: str = "lazy"
    max_work: int = DEFAULT_MAX_WORK
    run_options: dict = field(default_factory=dict)

    def validate(self) -> None:
        build_join_graph(self.k, self.s)
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.hs or min(self.hs) < 1:
            raise ValueError("every h must be >= 1")
        work = sum(self.hs) * self.trials
        if work > self.max_work:
            raise ResourceCapExceeded(f"sum(h) * trials = {work} exceeds the cap {self.max_work}")


def _run_task(task) -> TrialOutcome:
    k, s, h, seed, schedule, options = task
    return run(build_join_graph(k, s), h, seed, schedule=schedule, **options)


def run_trials(config: TrialConfig, workers: int = 1) -> Iterator[TrialOutcome]:
    """Yield one outcome per (h, trial index), h-major, in a fixed order."""
    config.validate()
    tasks = [
        (config.k, config.s, h, trial_seed(config.master_seed, i), config.schedule, config.run_options)
        for h in config.hs
        for i in range(config.trials)
    ]
    if workers <= 1:
        yield from map(_run_task, tasks)
        return
    with multiprocessing.Pool(workers) as pool:
        yield from pool.imap(_run_task, tasks, chunksize=max(1, len(tasks) // (8 * workers)))


def max_chunk_violation(out: TrialOutcome) -> bool | None:
    """Whether the largest chunk beats the chunk-size bound (None if not measured)."""
    if out.max_chunk is None or not out.reds or out.h < 3:
        return None
    return out.max_chunk > chunk_size_bound(out.h, out.reds, out.k)


def stage_hazards(outcomes: Sequence[TrialOutcome]) -> dict[str, EstimateCI | None]:
    """Failures at each stage among the trials that reached that stage."""
    counts = Counter(o.status for o in outcomes)
    hazards = {}
    reached = len(outcomes)
    for st in STAGES:
        failed = counts[st]
        hazards[st.value] = wilson_interval(failed, reached) if reached else None
        reached -= failed
    return hazards


def max_chunk_violations(outcomes: Sequence[TrialOutcome]) -> EstimateCI | None:
    viol = [v for v in map(max_chunk_violation, outcomes) if v is not None]
    return wilson_interval(sum(viol), len(viol)) if viol else None


def summarize(outcomes: Sequence[TrialOutcome]) -> dict:
    """Aggregate outcomes that share h, k and s."""
    if not outcomes:
        raise ValueError("nothing to summarize")
    first = outcomes[0]
    n = len(outcomes)
    counts = {st.value: 0 for st in Status}
    for o in outcomes:
        counts[o.status.value] += 1
    hazards = {key: (e.to_json() if e else None) for key, e in stage_hazards(outcomes).items()}
    viol = max_chunk_violations(outcomes)
    ranks = [o.chunk_cycles for o in outcomes if o.chunk_cycles is not None]
    cycles = [o.cycles for o in outcomes if o.cycles is not None]
    chunks = [o.max_chunk for o in outcomes if o.max_chunk is not None]
    return {
        "h": first.h,
        "k": first.k,
        "s": first.s,
        "trials": n,
        "statuses": counts,
        "success": wilson_interval(counts[Status.SUCCESS.value], n).to_json(),
        "hazards": hazards,
        "mean_cycles": float(np.mean(cycles)) if cycles else None,
        "expected_cycles": harmonic(first.h),
        "mean_max_chunk": float(np.mean(chunks)) if chunks else None,
        "max_chunk_violation": viol.to_json() if viol else None,
        "chunk_cycle_freq": wilson_interval(sum(r > 0 for r in ranks), len(ranks)).to_json() if ranks else None,
    }


def summarize_by_h(outcomes: Sequence[TrialOutcome]) -> list[dict]:
    groups: dict[int, list[TrialOutcome]] = {}
    for o in outcomes:
        groups.setdefault(o.h, []).append(o)
    return [summarize(groups[h]) for h in groups]
