import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from liftlab import build_join_graph
from liftlab.colouring import run, verify_proper
from liftlab.lift import LiftGraph, random_lift
from liftlab.oracle import SimpleGraph, chromatic_number, find_colouring, is_k_colourable, parse_edges


def brute_force_colourable(g: SimpleGraph, q: int) -> bool:
    edges = [(u, v) for u in range(g.n) for v in g.adj[u] if u < v]
    return any(all(c[u] != c[v] for u, v in edges) for c in itertools.product(range(q), repeat=g.n))


def base_as_graph(base):
    return SimpleGraph.from_edges(base.n_vertices, [(e.tail, e.head) for e in base.edges])


def cycle(n):
    return SimpleGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


small_graphs = st.integers(1, 7).flatmap(
    lambda n: st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1]), max_size=15).map(
        lambda es: SimpleGraph.from_edges(n, es)
    )
)


def test_k5_minus_edge(k5e):
    g = base_as_graph(k5e)
    assert not is_k_colourable(g, 3)
    assert is_k_colourable(g, 4)
    assert chromatic_number(g) == 4
    assert brute_force_colourable(g, 4) and not brute_force_colourable(g, 3)


def test_odd_cycle():
    assert not is_k_colourable(cycle(7), 2)
    assert is_k_colourable(cycle(7), 3)


@pytest.mark.parametrize("n", [4, 10, 30])
def test_even_cycle(n):
    assert chromatic_number(cycle(n)) == 2


def test_triangle():
    assert chromatic_number(cycle(3)) == 3


def test_identity_two_lift(k5e):
    lift = LiftGraph(k5e, 2, tuple(np.arange(2) for _ in range(k5e.n_edges)))
    assert not is_k_colourable(SimpleGraph.from_lift(lift), 3)


def test_cap():
    k6 = SimpleGraph.from_edges(6, itertools.combinations(range(6), 2))
    assert chromatic_number(k6, cap=5) is None
    assert chromatic_number(k6, cap=6) == 6
    with pytest.raises(ValueError):
        chromatic_number(k6, cap=0)
    with pytest.raises(ValueError):
        is_k_colourable(k6, 0)


def test_empty_and_edgeless():
    assert chromatic_number(SimpleGraph.from_edges(0, [])) == 0
    assert chromatic_number(SimpleGraph.from_edges(3, [])) == 1


@given(small_graphs, st.integers(1, 4))
def test_agrees_with_brute_force(g, q):
    assert is_k_colourable(g, q) == brute_force_colourable(g, q)


@given(small_graphs, st.integers(1, 4))
def test_monotone_and_witness(g, q):
    col = find_colouring(g, q)
    if col is not None:
        assert is_k_colourable(g, q + 1)
        assert all(0 <= c < q for c in col)
        assert all(col[u] != col[v] for u in range(g.n) for v in g.adj[u])


@settings(max_examples=20)
@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_witness_passes_verify_proper(h, seed):
    base = build_join_graph(3, 2)
    lift = random_lift(base, h, np.random.default_rng(seed))
    g = SimpleGraph.from_lift(lift)
    chi = chromatic_number(g)
    assert chi in (2, 3, 4)
    witness = np.asarray(find_colouring(g, chi)) + 1
    assert verify_proper(lift, witness)


def has_odd_cycle(g: SimpleGraph) -> bool:
    side = [-1] * g.n
    for root in range(g.n):
        if side[root] >= 0:
            continue
        side[root], stack = 0, [root]
        while stack:
            u = stack.pop()
            for w in g.adj[u]:
                if side[w] < 0:
                    side[w] = 1 - side[u]
                    stack.append(w)
                elif side[w] == side[u]:
                    return True
    return False


def test_random_four_lifts():
    base = build_join_graph(3, 2)
    for seed in range(30):
        g = SimpleGraph.from_lift(random_lift(base, 4, np.random.default_rng(seed)))
        chi = chromatic_number(g)
        # a lift of K5 - e has maximum degree 4 and contains no K5, so Brooks gives chi <= 4
        assert chi in ((3, 4) if has_odd_cycle(g) else (2,))


def test_success_trials_are_three_colourable():
    # successes are rare at h = 8 (about 1 in 70), so scan until enough are found
    base = build_join_graph(3, 2)
    checked = 0
    for seed in range(3000):
        out = run(base, 8, seed, keep_lift=True)
        if out.success:
            assert chromatic_number(SimpleGraph.from_lift(out.lift)) == 3
            checked += 1
            if checked == 15:
                break
    assert checked == 15


def test_parse_edges():
    g = parse_edges("# square\n0 1\n1 2\n2 3\n3 0\n")
    assert g.n == 4 and g.n_edges == 4
    with pytest.raises(ValueError):
        parse_edges("0 1 2\n")
    with pytest.raises(ValueError):
        parse_edges("1 1\n")
