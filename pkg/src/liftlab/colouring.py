"""Three-phase randomized 3-colouring of a random lift of G(k, s).

Phase I cuts every cycle of the cycle part with one red vertex.  Phase II
grows the red set by walking through pale vertices (stable-side vertices with
exactly one red neighbour), which keeps the number of chunk-edges fixed while
the number of chunks grows.  Phase III reveals the rest of the lift, colours
the remaining red-free stable-side vertices red and 2-colours what is left if
it is a forest.

The free choices are pinned: the Phase I red vertex of a cycle is its vertex
in fibre x1 with the smallest index, the pale set is a FIFO queue, and the
edge exposed from a pale vertex is its unexposed edge of lowest index.
Each phase raises ``TrialFailure`` on its fail branch; ``run`` turns that
into a status.
"""

from __future__ import annotations

import bisect
import json
import math
import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from ._kernels import forest_parity, permutation_cycles
from .base_graph import BaseGraph
from .chunk_graph import chunk_labels, cycle_rank, extract_chunks
from .colours import Colour
from .lift import ExposureState, LiftGraph, Side


UNCOLOURED, RED = int(Colour.UNCOLOURED), int(Colour.RED)


class Status(str, Enum):
    SUCCESS = "Success"
    TOO_MANY_CYCLES = "FailPhase1TooManyCycles"
    DOUBLE_RED = "FailStep3DoubleRed"
    PALE_COLLISION = "FailStep43PaleCollision"
    ADJACENT_REDS = "FailAdjacentReds"
    CYCLE = "FailStep7Cycle"


class TrialFailure(Exception):
    def __init__(self, status: Status, detail: str = ""):
        super().__init__(f"{status.value}: {detail}" if detail else status.value)
        self.status = status


class InvariantViolation(AssertionError):
    """An internal consistency check of the algorithm failed."""


def cycle_threshold(h: int) -> float:
    return math.log(h) ** 2


def loop_iterations(h: int) -> int:
    """floor(h ** (1/3)), computed exactly."""
    t = round(h ** (1 / 3))
    while t**3 > h:
        t -= 1
    while (t + 1) ** 3 <= h:
        t += 1
    return t


@dataclass
class ColouringState:
    base: BaseGraph
    h: int
    colour: np.ndarray
    pale: deque = field(default_factory=deque)
    ever_pale: set = field(default_factory=set)
    red_neighbours: dict = field(default_factory=dict)
    reds_by_fibre: list = field(default_factory=list)
    cycles: int = 0
    r0: int = 0
    T: int = 0
    early_stop: bool = False
    chunk_cycles: int | None = None
    chunk_labels: np.ndarray | None = None
    pale_sizes: list = field(default_factory=list)
    draws: list = field(default_factory=list)

    @classmethod
    def fresh(cls, base: BaseGraph, h: int) -> "ColouringState":
        colour = np.zeros(base.n_vertices * h, dtype=np.int8)
        return cls(base, h, colour, reds_by_fibre=[[] for _ in range(base.k)])

    def set_colour(self, v: int, c: int) -> None:
        old = self.colour[v]
        if old != UNCOLOURED and old != c:
            raise InvariantViolation(f"vertex {v} recoloured from {Colour(old).name} to {Colour(c).name}")
        self.colour[v] = c

    def colour_red(self, v: int) -> None:
        self.set_colour(v, RED)
        x, j = divmod(v, self.h)
        bisect.insort(self.reds_by_fibre[x], j)

    @property
    def red_count(self) -> int:
        return sum(len(r) for r in self.reds_by_fibre)


def phase1(state: ExposureState, col: ColouringState) -> list[int]:
    """Colour one vertex red on every cycle of the cycle part; return R(0)."""
    base, h = state.base, state.h
    # a cycle of the lifted k-cycle through (x1, j) returns to x1 at pi(j)
    pi = np.arange(h)
    for p in state.cycle_permutations:
        pi = p[pi]
    n_cycles, _, first = permutation_cycles(pi)
    col.cycles = int(n_cycles)
    if n_cycles > cycle_threshold(h):
        raise TrialFailure(Status.TOO_MANY_CYCLES, f"{n_cycles} cycles > (ln {h})^2")
    reds = first.tolist()
    for j in reds:
        col.colour_red(j)
    col.r0 = len(reds)
    return reds


def _mark_red_neighbour(col: ColouringState, v: int) -> int:
    n = col.red_neighbours.get(v, 0) + 1
    col.red_neighbours[v] = n
    return n


def phase2_setup(state: ExposureState, col: ColouringState, reds: list[int]) -> list[int]:
    """Expose the join edges of R(0); return the initial pale set P(0)."""
    base, h = state.base, state.h
    if not reds:
        raise InvariantViolation("Phase I produced no red vertex")
    for v in reds:
        x, j = divmod(v, h)
        for b in range(base.s):
            p = state.expose_pair(base.join_edge(x, b), Side.TAIL, j)
            w = (base.k + b) * h + p
            if _mark_red_neighbour(col, w) >= 2:
                raise TrialFailure(Status.DOUBLE_RED, f"vertex {w} has two red neighbours")
            col.pale.append(w)
            col.ever_pale.add(w)
    col.pale_sizes = [len(col.pale)]
    return list(col.pale)


def phase2_loop(state: ExposureState, col: ColouringState, *, record_draws: bool = False) -> int:
    """Run the pale-vertex walk; return the number T of completed iterations."""
    base, h = state.base, state.h
    k, s = base.k, base.s
    for _ in range(loop_iterations(h)):
        if not col.pale:
            col.early_stop = True
            break
        v = col.pale.popleft()
        b, jv = divmod(v - k * h, h)
        for i in range(k):
            e = base.join_edge(i, b)
            if not state.is_exposed(e, Side.HEAD, jv):
                break
        else:
            raise InvariantViolation(f"pale vertex {v} has no unexposed edge")
        ju = state.expose_pair(e, Side.HEAD, jv)
        u = i * h + ju
        if col.colour[u] != UNCOLOURED:
            raise InvariantViolation(f"exposed a coloured cycle vertex {u}")
        if record_draws:
            rank = ju - bisect.bisect_left(col.reds_by_fibre[i], ju)
            col.draws.append((i, rank, h - len(col.reds_by_fibre[i])))

        fresh = []
        for b2 in range(s):
            if b2 == b:
                continue
            w = (k + b2) * h + state.expose_pair(base.join_edge(i, b2), Side.TAIL, ju)
            if w in col.ever_pale:
                raise TrialFailure(Status.PALE_COLLISION, f"vertex {w} was already pale")
            fresh.append(w)
        _mark_red_neighbour(col, v)
        for w in fresh:
            _mark_red_neighbour(col, w)
            col.pale.append(w)
            col.ever_pale.add(w)
        col.colour_red(u)
        col.T += 1
        col.pale_sizes.append(len(col.pale))

    for i, p in enumerate(state.cycle_permutations):
        red_here = col.colour[i * h : (i + 1) * h] == RED
        nxt = (i + 1) % k
        red_next = col.colour[nxt * h : (nxt + 1) * h] == RED
        if np.any(red_here & red_next[p]):
            raise TrialFailure(Status.ADJACENT_REDS, f"adjacent reds across cycle edge {i}")
    return col.T


def phase3(state: ExposureState, col: ColouringState) -> LiftGraph:
    """Steps 5-7: expose everything, redden lonely stable-side vertices, 2-colour the rest."""
    base, h = state.base, state.h
    k, s = base.k, base.s
    lift = state.expose_all()
    colour = col.colour

    red = colour == RED
    s_red_count = np.zeros(s * h, dtype=np.int64)
    for i in range(k):
        red_i = np.flatnonzero(red[i * h : (i + 1) * h])
        for b in range(s):
            s_red_count[b * h + lift.perms[base.join_edge(i, b)][red_i]] += 1
    lonely = np.flatnonzero((s_red_count == 0) & (colour[k * h :] == UNCOLOURED))
    colour[k * h + lonely] = RED

    H = extract_chunks(lift, colour, col.chunk_labels)
    us, vs = lift.edge_arrays()
    alive = colour != RED
    keep = alive[us] & alive[vs]
    us, vs = us[keep], vs[keep]
    nodes = np.flatnonzero(alive)
    index = np.full(colour.size, -1, dtype=np.int64)
    index[nodes] = np.arange(nodes.size)
    excess, parity = forest_parity(nodes.size, index[us], index[vs])

    rank = cycle_rank(H)
    col.chunk_cycles = rank
    if rank != excess:
        raise InvariantViolation(f"chunk graph cycle rank {rank} != non-red cycle rank {excess}")
    if excess > 0:
        raise TrialFailure(Status.CYCLE, f"{excess} independent cycles among non-red vertices")

    if np.any(colour[nodes] != Colour.UNCOLOURED):
        raise InvariantViolation("non-red vertex coloured before step 7")
    colour[nodes] = np.where(parity == 0, Colour.BLACK, Colour.WHITE)
    return lift


def verify_proper(lift: LiftGraph, colouring) -> bool:
    colouring = np.asarray(colouring)
    if colouring.shape != (lift.n_vertices,):
        raise ValueError("colouring has the wrong length")
    if np.any(colouring == Colour.UNCOLOURED):
        raise ValueError("colouring leaves vertices uncoloured")
    us, vs = lift.edge_arrays()
    return bool(np.all(colouring[us] != colouring[vs]))


RECORD_KEYS = (
    "seed", "h", "k", "s", "status", "cycles", "r0", "T", "pT",
    "chunks", "max_chunk", "chunk_cycles", "millis",
)


@dataclass
class TrialOutcome:
    seed: int
    h: int
    k: int
    s: int
    status: Status
    cycles: int | None = None
    r0: int | None = None
    T: int | None = None
    pT: int | None = None
    chunks: int | None = None
    max_chunk: int | None = None
    chunk_cycles: int | None = None
    chunk_labels: np.ndarray | None = None
    millis: float | None = None
    colouring: np.ndarray | None = field(default=None, repr=False, compare=False)
    lift: LiftGraph | None = field(default=None, repr=False, compare=False)
    trace: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def success(self) -> bool:
        return self.status == Status.SUCCESS

    @property
    def reds(self) -> int | None:
        """Red cycle-side vertices after Phase II (r(0) + T)."""
        if self.r0 is None or self.T is None:
            return None
        return self.r0 + self.T

    def to_record(self) -> dict:
        rec = {key: getattr(self, key) for key in RECORD_KEYS}
        rec["status"] = self.status.value
        return rec

    def to_json(self) -> str:
        return json.dumps(self.to_record(), separators=(",", ":"))

    @classmethod
    def from_record(cls, rec: dict) -> "TrialOutcome":
        fields = {key: rec[key] for key in RECORD_KEYS}
        fields["status"] = Status(fields["status"])
        return cls(**fields)


def run(
    base: BaseGraph,
    h: int,
    seed,
    *,
    schedule: str = "lazy",
    keep_lift: bool = False,
    trace: bool = False,
    timing: bool = False,
) -> TrialOutcome:
    """One trial of the colouring algorithm on a fresh random h-lift.

    ``seed`` is anything ``numpy.random.default_rng`` accepts.  With
    ``keep_lift`` the realized lift is attached even when the trial fails
    (completing the exposure first); ``trace`` records the pale-set sizes,
    the Phase II draws and a chunk-graph snapshot taken right after P(0).
    """
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    state = ExposureState(base, h, rng, schedule=schedule)
    col = ColouringState.fresh(base, h)
    out = TrialOutcome(seed=seed, h=h, k=base.k, s=base.s, status=Status.SUCCESS)
    try:
        reds = phase1(state, col)
        out.cycles, out.r0 = col.cycles, col.r0
        phase2_setup(state, col, reds)
        if trace:
            snap = extract_chunks(state, col.colour)
            out.trace["snapshot"] = {"n": snap.n, "m": snap.m}
        try:
            phase2_loop(state, col, record_draws=trace)
        finally:
            out.T, out.pT = col.T, len(col.pale)
        n, labels = chunk_labels(base, h, state.cycle_permutations, col.colour)
        col.chunk_labels = labels
        out.chunks = n
        out.max_chunk = int(np.bincount(labels[labels >= 0]).max()) if n else 0
        try:
            lift = phase3(state, col)
        finally:
            out.chunk_cycles = col.chunk_cycles
        out.colouring = col.colour
        if not verify_proper(lift, col.colour):
            raise InvariantViolation("algorithm produced an improper colouring")
        if len(np.unique(col.colour)) != 3:
            raise InvariantViolation("successful colouring does not use exactly 3 colours")
        if keep_lift:
            out.lift = lift
    except TrialFailure as failure:
        out.status = failure.status
        if out.cycles is None:
            out.cycles = col.cycles
        if keep_lift:
            out.lift = state.expose_all()
    if trace:
        out.trace.update(
            pale_sizes=list(col.pale_sizes),
            draws=list(col.draws),
            early_stop=col.early_stop,
            transcript=list(state.transcript),
            colour=col.colour.copy(),
        )
    if timing:
        out.millis = round((time.perf_counter() - start) * 1000, 3)
    return out
