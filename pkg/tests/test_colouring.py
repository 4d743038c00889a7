import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from jsonschema import validate

from liftlab import build_join_graph
from liftlab.chunk_graph import extract_chunks
from liftlab.colouring import (
    RECORD_KEYS,
    ColouringState,
    InvariantViolation,
    Status,
    TrialFailure,
    TrialOutcome,
    cycle_threshold,
    loop_iterations,
    phase1,
    phase2_loop,
    phase2_setup,
    phase3,
    run,
    verify_proper,
)
from liftlab.colours import Colour
from liftlab.lift import ExposureState, random_lift
from liftlab.schema import load_schema
from liftlab.stats.harness import trial_seed


def scan(base, h, n, **kw):
    return [run(base, h, trial_seed(0, i), **kw) for i in range(n)]


@pytest.fixture(scope="module")
def outcomes_1000():
    return scan(build_join_graph(3, 2), 1000, 200, keep_lift=True, trace=True)


def fixed_state(base, perms):
    return ExposureState.from_permutations(base, [np.asarray(p) for p in perms], np.random.default_rng(0))


class TestHelpers:
    @pytest.mark.parametrize("h, t", [(1, 1), (7, 1), (8, 2), (999, 9), (1000, 10), (10**5, 46), (10**6, 100)])
    def test_loop_iterations(self, h, t):
        assert loop_iterations(h) == t

    def test_threshold(self):
        assert cycle_threshold(5) == pytest.approx(2.590, abs=1e-3)
        assert cycle_threshold(1) == 0


class TestPhase1:
    def test_identity_fails(self, k5e):
        perms = [np.arange(5)] * k5e.n_edges
        with pytest.raises(TrialFailure) as err:
            phase1(fixed_state(k5e, perms), ColouringState.fresh(k5e, 5))
        assert err.value.status == Status.TOO_MANY_CYCLES

    def test_single_cycle(self, k5e):
        rot = np.roll(np.arange(5), 1)
        perms = [np.arange(5), rot, np.arange(5)] + [np.arange(5)] * 6
        col = ColouringState.fresh(k5e, 5)
        reds = phase1(fixed_state(k5e, perms), col)
        assert reds == [0] and col.r0 == 1 and col.cycles == 1
        assert col.colour[0] == Colour.RED

    def test_red_is_smallest_in_x1(self, k5e):
        # composition with cycles (0 3) (1 2 4): reds at 0 and 1
        pi = np.array([3, 2, 4, 0, 1])
        perms = [pi, np.arange(5), np.arange(5)] + [np.arange(5)] * 6
        h = 5
        col = ColouringState.fresh(k5e, h)
        # (ln 5)^2 < 2 is false, so two cycles pass
        assert phase1(fixed_state(k5e, perms), col) == [0, 1]

    def test_h1_always_fails(self, k5e):
        for seed in range(5):
            assert run(k5e, 1, seed).status == Status.TOO_MANY_CYCLES


class TestPhase2:
    def test_pale_set_size(self, k5e):
        h = 1000
        for i in range(20):
            state = ExposureState(k5e, h, np.random.default_rng(i))
            col = ColouringState.fresh(k5e, h)
            try:
                reds = phase1(state, col)
            except TrialFailure:
                continue
            assert len(phase2_setup(state, col, reds)) == 2 * len(reds)
            assert all(col.red_neighbours[w] == 1 for w in col.pale)

    def test_double_red_branch(self, k5e):
        # reds in different fibres sharing a stable neighbour under identity joins
        h = 3
        state = fixed_state(k5e, [np.arange(h)] * k5e.n_edges)
        col = ColouringState.fresh(k5e, h)
        for v in (0, h):
            col.colour_red(v)
        with pytest.raises(TrialFailure) as err:
            phase2_setup(state, col, [0, h])
        assert err.value.status == Status.DOUBLE_RED

    def test_empty_red_set_is_internal_error(self, k5e):
        state = ExposureState(k5e, 10, np.random.default_rng(0))
        with pytest.raises(InvariantViolation):
            phase2_setup(state, ColouringState.fresh(k5e, 10), [])

    def test_pale_invariant_s2(self, outcomes_1000):
        checked = 0
        for o in outcomes_1000:
            if o.status in (Status.SUCCESS, Status.CYCLE):
                assert o.trace["pale_sizes"] == [2 * o.r0] * (o.T + 1)
                assert o.trace["snapshot"] == {"n": o.r0, "m": 2 * o.r0}
                assert o.pT == 2 * o.r0
                checked += 1
        assert checked > 100

    def test_failure_branches_reachable(self, outcomes_1000):
        statuses = {o.status for o in outcomes_1000}
        assert {Status.PALE_COLLISION, Status.ADJACENT_REDS, Status.CYCLE, Status.SUCCESS} <= statuses

    def test_chunks_equal_reds(self, outcomes_1000):
        for o in outcomes_1000:
            if o.status in (Status.SUCCESS, Status.CYCLE):
                assert o.chunks == o.r0 + o.T

    def test_s1_early_stop(self):
        base = build_join_graph(3, 1)
        outs = scan(base, 1000, 30, trace=True)
        stopped = [o for o in outs if o.trace.get("early_stop")]
        assert stopped
        for o in stopped:
            assert o.T < loop_iterations(1000)
            sizes = o.trace["pale_sizes"]
            assert sizes == [o.r0 - t for t in range(len(sizes))]

    def test_draw_ranks_in_range(self, outcomes_1000):
        for o in outcomes_1000:
            for fibre, rank, size in o.trace["draws"]:
                assert 0 <= fibre < 3 and 0 <= rank < size <= 1000


class TestPhase3:
    def test_success_is_proper(self, outcomes_1000):
        wins = [o for o in outcomes_1000 if o.success]
        assert wins
        for o in wins:
            assert verify_proper(o.lift, o.colouring)
            assert sorted(np.unique(o.colouring)) == [Colour.RED, Colour.BLACK, Colour.WHITE]

    def test_uncoloured_stable_degree(self, outcomes_1000):
        for o in outcomes_1000:
            if o.status != Status.CYCLE:
                continue
            colour, lift = o.trace["colour"], o.lift
            adj = lift.adjacency()
            for v in range(3 * lift.h, lift.n_vertices):
                if colour[v] == Colour.UNCOLOURED:
                    assert sum(colour[w] == Colour.UNCOLOURED for w in adj[v]) <= 2

    def test_monotone_colouring(self, k5e):
        h = 1000
        for i in range(30):
            state = ExposureState(k5e, h, np.random.default_rng(i))
            col = ColouringState.fresh(k5e, h)
            snaps = []
            try:
                reds = phase1(state, col)
                snaps.append(col.colour.copy())
                phase2_setup(state, col, reds)
                phase2_loop(state, col)
                snaps.append(col.colour.copy())
                phase3(state, col)
            except TrialFailure:
                pass
            snaps.append(col.colour.copy())
            for a, b in zip(snaps, snaps[1:]):
                set_before = a != Colour.UNCOLOURED
                assert np.array_equal(a[set_before], b[set_before])

    def test_recolour_rejected(self, k5e):
        col = ColouringState.fresh(k5e, 4)
        col.colour_red(2)
        with pytest.raises(InvariantViolation):
            col.set_colour(2, Colour.BLACK)


class TestVerifyProper:
    def test_all_red(self, k5e):
        lift = random_lift(k5e, 4, np.random.default_rng(0))
        assert not verify_proper(lift, np.full(lift.n_vertices, Colour.RED))

    def test_flip_one_endpoint(self, outcomes_1000):
        o = next(o for o in outcomes_1000 if o.success)
        bad = o.colouring.copy()
        us, vs = o.lift.edge_arrays()
        bad[us[0]] = bad[vs[0]]
        assert not verify_proper(o.lift, bad)

    def test_uncoloured_rejected(self, k5e):
        lift = random_lift(k5e, 2, np.random.default_rng(0))
        with pytest.raises(ValueError):
            verify_proper(lift, np.zeros(lift.n_vertices, dtype=np.int8))
        with pytest.raises(ValueError):
            verify_proper(lift, np.ones(3))


class TestRun:
    def test_deterministic(self, k5e):
        a, b = run(k5e, 5000, 7), run(k5e, 5000, 7)
        assert a == b and a.to_json() == b.to_json()

    @settings(max_examples=15)
    @given(st.integers(2, 60), st.integers(0, 2**63 - 1))
    def test_fixed_permutations_ignore_rng(self, h, seed):
        base = build_join_graph(3, 2)
        perms = random_lift(base, h, np.random.default_rng(seed)).perms

        def go(rng_seed):
            state = ExposureState.from_permutations(base, perms, np.random.default_rng(rng_seed))
            col = ColouringState.fresh(base, h)
            try:
                reds = phase1(state, col)
                phase2_setup(state, col, reds)
                phase2_loop(state, col)
                phase3(state, col)
                status = Status.SUCCESS
            except TrialFailure as f:
                status = f.status
            return status, col.colour.tobytes(), state.transcript

        assert go(1) == go(2)

    @pytest.mark.parametrize("k, s", [(3, 2), (4, 2), (3, 3), (5, 1)])
    def test_record_schema(self, k, s):
        schema = load_schema("trial")
        for o in scan(build_join_graph(k, s), 300, 5, timing=True):
            rec = json.loads(o.to_json())
            validate(rec, schema)
            assert list(rec) == list(RECORD_KEYS)
            assert rec["millis"] is not None
            assert TrialOutcome.from_record(rec) == o

    def test_millis_null_by_default(self, k5e):
        assert json.loads(run(k5e, 100, 0).to_json())["millis"] is None

    def test_upfront_schedule(self, k5e):
        outs = [run(k5e, 1000, i, schedule="upfront") for i in range(20)]
        assert all(o.status in Status for o in outs)
