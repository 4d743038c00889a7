"""Base graphs G(k, s): a k-cycle joined to a stable set of size s.

Vertices are indexed 0..k+s-1, cycle vertices first.  Edge indices are fixed:
cycle edges x_i -> x_{i+1 mod k} occupy 0..k-1, then join edges x_i -> y_j in
lexicographic (i, j) order, so the join edge (i, j) has index k + i*s + j.
Vertex names in text formats are 1-based (x1..xk, y1..ys).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import NamedTuple


class BaseGraphError(ValueError):
    """Invalid parameters or a graph that is not of the form G(k, s)."""


class EdgeListError(BaseGraphError):
    pass


class Edge(NamedTuple):
    tail: int
    head: int
    index: int


@dataclass(frozen=True)
class BaseGraph:
    k: int
    s: int
    edges: tuple[Edge, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.k < 3 or self.s < 1:
            raise BaseGraphError(f"need k >= 3 and s >= 1, got k={self.k}, s={self.s}")
        k, s = self.k, self.s
        edges = [Edge(i, (i + 1) % k, i) for i in range(k)]
        for i in range(k):
            for j in range(s):
                edges.append(Edge(i, k + j, len(edges)))
        object.__setattr__(self, "edges", tuple(edges))

    @property
    def n_vertices(self) -> int:
        return self.k + self.s

    @property
    def n_edges(self) -> int:
        return self.k + self.k * self.s

    @property
    def vertices(self) -> tuple[str, ...]:
        return tuple(self.label(v) for v in range(self.n_vertices))

    @property
    def cycle_vertices(self) -> range:
        return range(self.k)

    @property
    def stable_vertices(self) -> range:
        return range(self.k, self.k + self.s)

    def is_cycle_vertex(self, v: int) -> bool:
        return v < self.k

    def label(self, v: int) -> str:
        if v < self.k:
            return f"x{v + 1}"
        return f"y{v - self.k + 1}"

    def cycle_edge(self, i: int) -> int:
        return i % self.k

    def join_edge(self, i: int, j: int) -> int:
        """Index of the edge x_i -> y_j (both 0-based within their part)."""
        return self.k + i * self.s + j

    def incident_edges(self, v: int) -> list[int]:
        return [e.index for e in self.edges if v in (e.tail, e.head)]

    def neighbours(self, v: int) -> list[int]:
        out = []
        for e in self.edges:
            if e.tail == v:
                out.append(e.head)
            elif e.head == v:
                out.append(e.tail)
        return sorted(out)

    def degree(self, v: int) -> int:
        return len(self.incident_edges(v))

    def to_edge_list(self) -> str:
        return "".join(f"{self.label(e.tail)} {self.label(e.head)}\n" for e in self.edges)


def build_join_graph(k: int, s: int) -> BaseGraph:
    return BaseGraph(k, s)


_NAME = re.compile(r"^([xy])([1-9][0-9]*)$")


def parse_edge_list(text: str) -> BaseGraph:
    """Rebuild a BaseGraph from "tail head" lines.

    Blank lines and lines starting with '#' are ignored.  The undirected edge
    set must equal that of some G(k, s) under the canonical labelling.
    """
    pairs: set[frozenset[str]] = set()
    xs: set[int] = set()
    ys: set[int] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListError(f"line {lineno}: expected 'tail head', got {raw!r}")
        for name in parts:
            m = _NAME.match(name)
            if m is None:
                raise EdgeListError(f"line {lineno}: bad vertex name {name!r}")
            (xs if m.group(1) == "x" else ys).add(int(m.group(2)))
        if parts[0] == parts[1]:
            raise EdgeListError(f"line {lineno}: loop at {parts[0]}")
        pair = frozenset(parts)
        if pair in pairs:
            raise EdgeListError(f"line {lineno}: duplicate edge {parts[0]}-{parts[1]}")
        pairs.add(pair)

    if any(all(n.startswith("y") for n in p) for p in pairs):
        raise BaseGraphError("stable set is not independent")
    k, s = max(xs, default=0), max(ys, default=0)
    if k < 3 or s < 1:
        raise BaseGraphError(f"not of G(k, s) shape: k={k}, s={s}")
    g = BaseGraph(k, s)
    expected = {frozenset((g.label(e.tail), g.label(e.head))) for e in g.edges}
    if pairs != expected:
        missing = len(expected - pairs)
        extra = len(pairs - expected)
        raise BaseGraphError(
            f"edge set is not G({k}, {s}): {missing} missing, {extra} unexpected"
        )
    return g
