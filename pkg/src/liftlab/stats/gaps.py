"""Spacings of uniform samples, continuous and discrete.

Continuous: n points in [0, 1] with boundary points 0 and 1 give n + 1 gaps,
each with survival function P[gap > a] = (1 - a)^n.  Discrete: n draws with
replacement from {1..N} with boundary values 0 and N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class GapSample:
    n: int
    gaps: np.ndarray
    N: int | None = None

    @property
    def total(self):
        return self.gaps.sum()


def continuous_gap_matrix(n: int, samples: int, rng: np.random.Generator) -> np.ndarray:
    """``samples`` rows of the n + 1 gaps between sorted uniforms on [0, 1]."""
    if n < 1:
        raise ValueError("n must be >= 1")
    pts = np.sort(rng.random((samples, n)), axis=1)
    edges = np.concatenate([np.zeros((samples, 1)), pts, np.ones((samples, 1))], axis=1)
    return np.diff(edges, axis=1)


def sample_continuous_gaps(n: int, rng: np.random.Generator) -> GapSample:
    return GapSample(n, continuous_gap_matrix(n, 1, rng)[0])


def gap_survival_exact(n: int, a: float) -> float:
    """P[S'_{k+1} - S'_k > a] = (1 - a)^n, the same for every gap index k."""
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"a must lie in [0, 1], got {a}")
    return (1.0 - a) ** n


def _discrete_from_draws(draws: np.ndarray, N: int) -> np.ndarray:
    samples = draws.shape[0]
    srt = np.sort(draws, axis=1)
    edges = np.concatenate(
        [np.zeros((samples, 1), np.int64), srt, np.full((samples, 1), N, np.int64)], axis=1
    )
    return np.diff(edges, axis=1)


def discrete_gap_matrix(n: int, N: int, samples: int, rng: np.random.Generator) -> np.ndarray:
    if n < 1 or N < 1:
        raise ValueError("need n >= 1 and N >= 1")
    return _discrete_from_draws(rng.integers(1, N + 1, size=(samples, n)), N)


def sample_discrete_gaps(n: int, N: int, rng: np.random.Generator) -> GapSample:
    return GapSample(n, discrete_gap_matrix(n, N, 1, rng)[0], N)


def coupled_gap_matrices(n: int, N: int, samples: int, rng: np.random.Generator):
    """Continuous gaps and the discrete gaps of Y = ceil(N X) on the same X.

    X is drawn from (0, 1] so that Y always lands in {1..N}.
    """
    x = 1.0 - rng.random((samples, n))
    y = np.ceil(N * x).astype(np.int64)
    order = np.argsort(x, axis=1)
    xs = np.take_along_axis(x, order, axis=1)
    ys = np.take_along_axis(y, order, axis=1)
    cont = np.diff(np.concatenate([np.zeros((samples, 1)), xs, np.ones((samples, 1))], axis=1), axis=1)
    disc = np.diff(
        np.concatenate([np.zeros((samples, 1), np.int64), ys, np.full((samples, 1), N, np.int64)], axis=1),
        axis=1,
    )
    return cont, disc


def discrete_gap_bound(a: float, n: int, N: int, c: float) -> float:
    return math.exp(-a + c * n / N)


def longest_free_run(subset: np.ndarray, N: int) -> int:
    """Longest run of consecutive integers in {1..N} avoiding ``subset``."""
    srt = np.sort(np.asarray(subset))
    edges = np.concatenate([[0], srt, [N + 1]])
    return int(np.max(np.diff(edges)) - 1)


def free_run_length(n: int, a: float, N: int) -> int:
    return math.ceil(a * N / n)


def subset_gap_event(n: int, N: int, a: float, rng: np.random.Generator) -> bool:
    """Whether a uniform n-subset of {1..N} misses ceil(aN/n) consecutive integers."""
    if not 1 <= n <= N:
        raise ValueError("need 1 <= n <= N")
    subset = rng.choice(N, size=n, replace=False) + 1
    return longest_free_run(subset, N) >= free_run_length(n, a, N)


def subset_longest_runs(n: int, N: int, samples: int, rng: np.random.Generator) -> np.ndarray:
    if not 1 <= n <= N:
        raise ValueError("need 1 <= n <= N")
    return np.array([longest_free_run(rng.choice(N, size=n, replace=False) + 1, N) for _ in range(samples)])


def subset_gap_bound(a: float, n: int, N: int, c: float) -> float:
    return (n + 1) * math.exp(-a + c * n / N)


def fit_offset_constant(rows) -> float:
    """Smallest c >= 0 with freq <= scale * exp(-a + c n / N) on every row.

    ``rows`` holds (a, n, N, freq, scale) tuples; rows with freq == 0 impose
    nothing.
    """
    c = 0.0
    for a, n, N, freq, scale in rows:
        if freq > 0:
            c = max(c, (math.log(freq / scale) + a) * N / n)
    return c
