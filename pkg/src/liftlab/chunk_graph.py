"""The chunk multigraph of a partially coloured lift.

Chunks are the connected components of the cycle part of the lift after the
red vertices are removed.  Every non-red stable-side vertex that already has a
red neighbour and still has d >= 2 uncoloured neighbours links the chunks of
those neighbours; it is recorded as d - 1 chunk-edges from the first
neighbour's chunk (a star contracted onto one leaf has the same cycle rank).
For k = 3 these are exactly the pale vertices, one chunk-edge each.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from ._kernels import cycle_part_chunks
from .base_graph import BaseGraph
from .colours import Colour
from .lift import ExposureState, LiftGraph, inverse

RED = Colour.RED


class DisjointSet:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        """Merge the sets of a and b; False if they were already joined."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


@dataclass
class ChunkGraph:
    chunk_ids: list[int]
    sizes: list[int]
    edges: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.sizes)

    @property
    def m(self) -> int:
        return len(self.edges)

    def to_json(self) -> dict:
        return {"chunks": list(self.sizes), "edges": [[a, b] for a, b, _ in self.edges]}


def chunk_labels(base: BaseGraph, h: int, cycle_perms, colour: np.ndarray) -> tuple[int, np.ndarray]:
    """Chunk index of every cycle-side lift vertex (-1 for red ones).

    Chunks are numbered in increasing order of their smallest vertex.
    """
    k = base.k
    perms = np.stack([np.asarray(p, dtype=np.int64) for p in cycle_perms])
    alive = colour[: k * h] != RED
    return cycle_part_chunks(k, h, perms, alive)


def _chunk_graph_from_lift(lift: LiftGraph, colour: np.ndarray, labels=None) -> ChunkGraph:
    base, h = lift.base, lift.h
    k, s = base.k, base.s
    if labels is None:
        n, labels = chunk_labels(base, h, lift.perms[:k], colour)
    else:
        n = int(labels.max()) + 1 if labels.size else 0
    sizes = np.bincount(labels[labels >= 0], minlength=n).tolist()
    chunk_ids = np.full(n, k * h, dtype=np.int64)
    nodes = np.flatnonzero(labels >= 0)
    np.minimum.at(chunk_ids, labels[nodes], nodes)

    # nb[b*h + j, i] = chunk of the neighbour of (y_b, j) in fibre x_i
    nb = np.empty((s * h, k), dtype=np.int64)
    for b in range(s):
        for i in range(k):
            inv = inverse(np.asarray(lift.perms[base.join_edge(i, b)]))
            nb[b * h : (b + 1) * h, i] = labels[i * h + inv]
    n_red = (nb < 0).sum(axis=1)
    s_colour = colour[k * h :]
    linking = np.flatnonzero((s_colour != RED) & (n_red >= 1) & (k - n_red >= 2))
    edges = []
    for row in linking.tolist():
        ends = [c for c in nb[row].tolist() if c >= 0]
        for c in ends[1:]:
            edges.append((ends[0], c, k * h + row))
    return ChunkGraph(chunk_ids.tolist(), sizes, edges)


def extract_chunks(state: ExposureState | LiftGraph, colour: np.ndarray, labels=None) -> ChunkGraph:
    """Chunk graph for ``colour`` on the lift behind ``state``.

    Needs every edge exposed; an incomplete state is completed on a copy, so
    the caller's state and random stream are left untouched.  ``labels`` may
    pass in a precomputed ``chunk_labels`` result for the same red set.
    """
    if isinstance(state, LiftGraph):
        return _chunk_graph_from_lift(state, colour, labels)
    if not state.complete:
        state = state.clone()
    return _chunk_graph_from_lift(state.expose_all(), colour)


def cycle_rank(H: ChunkGraph) -> int:
    """m - n + (number of components): the number of independent cycles."""
    dsu = DisjointSet(H.n)
    merged = sum(dsu.union(a, b) for a, b, _ in H.edges)
    return H.m - merged


def has_cycle(H: ChunkGraph) -> bool:
    dsu = DisjointSet(H.n)
    for a, b, _ in H.edges:
        if a == b or not dsu.union(a, b):
            return True
    return False


def max_chunk_size(H: ChunkGraph) -> int:
    return max(H.sizes, default=0)


def chunk_size_bound(h: int, n: int, k: int = 3) -> float:
    """2k(omega + ln n) h / n with omega = ln ln h; equals 6(...) for k = 3."""
    return 2 * k * (math.log(math.log(h)) + math.log(n)) * h / n
