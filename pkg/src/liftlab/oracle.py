"""Exact graph colouring by backtracking, for lifts small enough to search.

The search picks the uncoloured vertex with the most distinct neighbour
colours (ties: most uncoloured neighbours, then lowest index) and only opens
one new colour at a time, so colour permutations are never explored twice.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lift import LiftGraph

DEFAULT_VERTEX_CAP = 60


@dataclass(frozen=True)
class SimpleGraph:
    n: int
    adj: tuple[tuple[int, ...], ...]

    @classmethod
    def from_edges(cls, n: int, edges) -> "SimpleGraph":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs))

    @classmethod
    def from_lift(cls, lift: LiftGraph) -> "SimpleGraph":
        us, vs = lift.edge_arrays()
        return cls.from_edges(lift.n_vertices, zip(us.tolist(), vs.tolist()))

    @property
    def n_edges(self) -> int:
        return sum(len(a) for a in self.adj) // 2


def parse_edges(text: str) -> SimpleGraph:
    """Generic edge list: one "u v" pair of 0-based integers per line."""
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            u, v = (int(t) for t in line.split())
        except ValueError as exc:
            raise ValueError(f"line {lineno}: expected two integers") from exc
        edges.append((u, v))
    n = 1 + max((max(e) for e in edges), default=-1)
    return SimpleGraph.from_edges(n, edges)


def find_colouring(g: SimpleGraph, q: int) -> list[int] | None:
    """A proper colouring with colours 0..q-1, or None if none exists."""
    if q < 1:
        raise ValueError("q must be >= 1")
    n, adj = g.n, g.adj
    colour = [-1] * n
    # seen[v][c] = number of coloured neighbours of v with colour c
    seen = [[0] * q for _ in range(n)]
    sat = [0] * n
    free_deg = [len(a) for a in adj]

    def pick() -> int:
        best, key = -1, None
        for v in range(n):
            if colour[v] < 0:
                kv = (sat[v], free_deg[v])
                if key is None or kv > key:
                    best, key = v, kv
        return best

    def assign(v: int, c: int) -> None:
        colour[v] = c
        for w in adj[v]:
            free_deg[w] -= 1
            if seen[w][c] == 0:
                sat[w] += 1
            seen[w][c] += 1

    def unassign(v: int, c: int) -> None:
        colour[v] = -1
        for w in adj[v]:
            free_deg[w] += 1
            seen[w][c] -= 1
            if seen[w][c] == 0:
                sat[w] -= 1

    def search(remaining: int, used: int) -> bool:
        if remaining == 0:
            return True
        v = pick()
        if sat[v] >= q:
            return False
        for c in range(min(used + 1, q)):
            if seen[v][c]:
                continue
            assign(v, c)
            if search(remaining - 1, max(used, c + 1)):
                return True
            unassign(v, c)
        return False

    return list(colour) if search(n, 0) else None


def is_k_colourable(g: SimpleGraph, q: int) -> bool:
    return find_colouring(g, q) is not None


def chromatic_number(g: SimpleGraph, cap: int = 5) -> int | None:
    """Smallest q <= cap admitting a proper q-colouring; None means "> cap"."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    lower = 2 if g.n_edges else 1
    if g.n == 0:
        return 0
    for q in range(lower, cap + 1):
        if is_k_colourable(g, q):
            return q
    return None
