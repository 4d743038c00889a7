"""Random h-lifts stored as one permutation of {0..h-1} per base edge.

An edge tail -> head with permutation sigma joins (tail, j) to (head, sigma[j]).
Lift vertex (x, j) has the flat id x*h + j.

``ExposureState`` reveals the permutations lazily: the cycle edges are sampled
in full up front, the join edges one matched pair at a time, each new partner
drawn uniformly from the partners still free.  ``expose_all`` completes every
permutation uniformly given what has been revealed.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from enum import IntEnum
from typing import Sequence

import numpy as np

from ._kernels import permutation_cycles
from .base_graph import BaseGraph


class ExposureError(ValueError):
    """A pair was requested that the exposure contract does not allow."""


class Side(IntEnum):
    TAIL = 0
    HEAD = 1


def sample_full_permutation(h: int, rng: np.random.Generator) -> np.ndarray:
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    return rng.permutation(h)


def is_permutation(p) -> bool:
    p = np.asarray(p)
    return p.ndim == 1 and np.array_equal(np.sort(p), np.arange(p.size))


def compose(perms: Sequence[np.ndarray]) -> np.ndarray:
    """Return the map j -> perms[-1][...perms[0][j]] (first permutation applied first)."""
    sizes = {len(p) for p in perms}
    if len(sizes) != 1:
        raise ValueError(f"permutations of mismatched sizes: {sorted(sizes)}")
    out = np.arange(sizes.pop())
    for p in perms:
        out = np.asarray(p)[out]
    return out


def inverse(perm: np.ndarray) -> np.ndarray:
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.size, dtype=perm.dtype)
    return inv


def cycle_labels(perm: np.ndarray) -> tuple[int, np.ndarray]:
    """Number of cycles of ``perm`` and a cycle label for every point.

    Cycles are numbered in increasing order of their smallest element.
    """
    n, labels, _ = permutation_cycles(np.ascontiguousarray(perm, dtype=np.int64))
    return n, labels


def compose_cycle_structure(p_list: Sequence[np.ndarray]) -> list[int]:
    """Sorted cycle lengths of the composition of ``p_list``.

    Any cyclic rotation of the factors gives a conjugate permutation, so the
    result does not depend on where the composition starts.
    """
    _, labels = cycle_labels(compose(p_list))
    return sorted(np.bincount(labels).tolist())


def count_cycles(perm: np.ndarray) -> int:
    return cycle_labels(perm)[0]


class _SparsePool:
    """The set {0..h-1} minus removed items, with O(1) uniform draws.

    A virtual array initialised to the identity, stored sparsely so that
    creation costs nothing regardless of h; removal swaps with the last slot.
    """

    __slots__ = ("size", "_at", "_pos")

    def __init__(self, h: int):
        self.size = h
        self._at: dict[int, int] = {}
        self._pos: dict[int, int] = {}

    def _remove_slot(self, slot: int) -> int:
        value = self._at.get(slot, slot)
        last = self.size - 1
        moved = self._at.get(last, last)
        self._at[slot] = moved
        self._pos[moved] = slot
        self._at.pop(last, None)
        self._pos.pop(value, None)
        self.size = last
        return value

    def draw(self, rng: np.random.Generator) -> int:
        return self._remove_slot(int(rng.integers(self.size)))

    def remove(self, value: int) -> None:
        self._remove_slot(self._pos.get(value, value))


class _EdgeExposure:
    __slots__ = ("h", "fwd", "bwd", "hidden", "hidden_inv", "src_pool", "tgt_pool", "full")

    def __init__(self, h: int, full: np.ndarray | None = None, hidden: np.ndarray | None = None):
        self.h = h
        self.full = full
        self.fwd: dict[int, int] = {}
        self.bwd: dict[int, int] = {}
        self.hidden = hidden
        self.hidden_inv = None if hidden is None else inverse(hidden)
        self.src_pool = _SparsePool(h) if hidden is None else None
        self.tgt_pool = _SparsePool(h) if hidden is None else None

    def lookup(self, side: Side, index: int) -> int | None:
        if self.full is not None:
            return int(self.full[index]) if side == Side.TAIL else int(np.flatnonzero(self.full == index)[0])
        table = self.fwd if side == Side.TAIL else self.bwd
        return table.get(index)

    def expose(self, side: Side, index: int, rng: np.random.Generator) -> int:
        if self.full is not None:
            raise ExposureError("edge is already fully exposed")
        table = self.fwd if side == Side.TAIL else self.bwd
        if index in table:
            raise ExposureError(f"{side.name.lower()} {index} is already exposed")
        if self.hidden is not None:
            partner = int(self.hidden[index] if side == Side.TAIL else self.hidden_inv[index])
        elif side == Side.TAIL:
            self.src_pool.remove(index)
            partner = self.tgt_pool.draw(rng)
        else:
            self.tgt_pool.remove(index)
            partner = self.src_pool.draw(rng)
        src, tgt = (index, partner) if side == Side.TAIL else (partner, index)
        self.fwd[src] = tgt
        self.bwd[tgt] = src
        return partner

    def complete(self, rng: np.random.Generator) -> np.ndarray:
        if self.full is not None:
            return self.full
        if self.hidden is not None:
            perm = self.hidden
        else:
            perm = np.full(self.h, -1, dtype=np.int64)
            if self.fwd:
                perm[np.fromiter(self.fwd.keys(), np.int64)] = np.fromiter(self.fwd.values(), np.int64)
            free_src = np.flatnonzero(perm < 0)
            used = np.zeros(self.h, dtype=bool)
            used[perm[perm >= 0]] = True
            perm[free_src] = rng.permutation(np.flatnonzero(~used))
        self.full = perm
        self.fwd = self.bwd = {}
        self.src_pool = self.tgt_pool = None
        return perm


@dataclass(eq=False)
class LiftGraph:
    base: BaseGraph
    h: int
    perms: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.perms) != self.base.n_edges:
            raise ValueError("need one permutation per base edge")
        for p in self.perms:
            if len(p) != self.h:
                raise ValueError("permutation of wrong size")

    @property
    def n_vertices(self) -> int:
        return self.base.n_vertices * self.h

    def vertex(self, x: int, j: int) -> int:
        return x * self.h + j

    def fibre(self, x: int) -> range:
        return range(x * self.h, (x + 1) * self.h)

    def project(self, v: int) -> int:
        return v // self.h

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Endpoints of all h * |E(G)| lift edges, in base-edge order."""
        h = self.h
        idx = np.arange(h)
        tails = [e.tail * h + idx for e in self.base.edges]
        heads = [e.head * h + np.asarray(p) for e, p in zip(self.base.edges, self.perms)]
        return np.concatenate(tails), np.concatenate(heads)

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for u, v in zip(*(a.tolist() for a in self.edge_arrays())):
            adj[u].append(v)
            adj[v].append(u)
        for row in adj:
            row.sort()
        return adj

    def serialize(self) -> str:
        return "".join(
            f"{e}: {' '.join(map(str, np.asarray(p).tolist()))}\n" for e, p in enumerate(self.perms)
        )

    @classmethod
    def parse(cls, base: BaseGraph, text: str) -> "LiftGraph":
        rows: dict[int, np.ndarray] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            if not raw.strip():
                continue
            head, _, body = raw.partition(":")
            try:
                e = int(head)
                perm = np.array([int(t) for t in body.split()], dtype=np.int64)
            except ValueError as exc:
                raise ValueError(f"line {lineno}: malformed permutation line") from exc
            if e in rows:
                raise ValueError(f"line {lineno}: edge {e} given twice")
            if not is_permutation(perm):
                raise ValueError(f"line {lineno}: not a permutation")
            rows[e] = perm
        if sorted(rows) != list(range(base.n_edges)):
            raise ValueError(f"expected permutations for edges 0..{base.n_edges - 1}")
        sizes = {len(p) for p in rows.values()}
        if len(sizes) != 1:
            raise ValueError("permutations have different sizes")
        return cls(base, sizes.pop(), tuple(rows[e] for e in range(base.n_edges)))


def random_lift(base: BaseGraph, h: int, rng: np.random.Generator) -> LiftGraph:
    """A uniform random h-lift: one independent uniform permutation per base edge."""
    return LiftGraph(base, h, tuple(sample_full_permutation(h, rng) for _ in base.edges))


class ExposureState:
    """Partially revealed random h-lift of ``base``.

    With ``schedule="upfront"`` every join permutation is sampled at
    construction and exposure only reads it; the revealed pairs and the final
    lift have the same law as with the default lazy schedule.
    """

    def __init__(self, base: BaseGraph, h: int, rng: np.random.Generator, schedule: str = "lazy"):
        if h < 1:
            raise ValueError(f"h must be >= 1, got {h}")
        if schedule not in ("lazy", "upfront"):
            raise ValueError(f"unknown schedule {schedule!r}")
        self.base = base
        self.h = h
        self.rng = rng
        self.schedule = schedule
        self.transcript: list[tuple[int, int, int, int]] = []
        self._edges: list[_EdgeExposure] = [
            _EdgeExposure(h, full=sample_full_permutation(h, rng)) for _ in range(base.k)
        ]
        for _ in range(base.k * base.s):
            hidden = sample_full_permutation(h, rng) if schedule == "upfront" else None
            self._edges.append(_EdgeExposure(h, hidden=hidden))

    @classmethod
    def from_permutations(cls, base: BaseGraph, perms: Sequence[np.ndarray], rng: np.random.Generator):
        """A state whose hidden permutations are given (testing and replay)."""
        h = len(perms[0])
        state = cls.__new__(cls)
        state.base, state.h, state.rng, state.schedule = base, h, rng, "fixed"
        state.transcript = []
        state._edges = [_EdgeExposure(h, full=np.asarray(p)) for p in perms[: base.k]]
        state._edges += [_EdgeExposure(h, hidden=np.asarray(p)) for p in perms[base.k :]]
        return state

    @property
    def cycle_permutations(self) -> list[np.ndarray]:
        return [self._edges[i].full for i in range(self.base.k)]

    @property
    def complete(self) -> bool:
        return all(e.full is not None for e in self._edges)

    def is_exposed(self, edge: int, side: Side, index: int) -> bool:
        return self._edges[edge].lookup(side, index) is not None

    def partner(self, edge: int, side: Side, index: int) -> int | None:
        return self._edges[edge].lookup(side, index)

    def exposed_pairs(self, edge: int) -> dict[int, int]:
        e = self._edges[edge]
        if e.full is not None:
            return dict(enumerate(e.full.tolist()))
        return dict(e.fwd)

    def expose_pair(self, edge: int, side: Side, index: int) -> int:
        partner = self._edges[edge].expose(Side(side), index, self.rng)
        self.transcript.append((edge, int(side), index, partner))
        return partner

    def expose_all(self) -> LiftGraph:
        perms = tuple(e.complete(self.rng) for e in self._edges)
        return LiftGraph(self.base, self.h, perms)

    def clone(self) -> "ExposureState":
        return copy.deepcopy(self)
