import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semsim.errors import DegenerateInputError, ParameterError
from semsim.graphs import ConceptGraph, SubstrateSpec, generate_substrate, rewire
from semsim.ideation import random_walk
from semsim.social import (
    _augmented_adj,
    incorporate_trace,
    jaccard,
    run_exposure,
    run_redundancy_instance,
    trace_edges,
)
from semsim.streams import derive_stream


def test_jaccard_hand_values():
    assert jaccard({1, 2}, {1, 2}) == 1.0
    assert jaccard({1, 2}, {3, 4}) == 0.0
    assert jaccard({1, 2, 3}, {2, 3, 4}) == 0.5


def test_jaccard_empty_sets_rejected():
    with pytest.raises(DegenerateInputError):
        jaccard(set(), set())


def test_trace_edges_traversed_vs_induced():
    # walk 0-1-2 on a triangle: traversed misses the closing edge, induced has it
    tri = ConceptGraph(3, [(0, 1), (1, 2), (0, 2)])
    rng = derive_stream(0, ["t"])
    for _ in range(50):
        tr = random_walk(tri, 0, 2, rng)
        if tr.sequence == (0, 1, 2):
            break
    else:
        pytest.skip("walk 0-1-2 not drawn")
    assert trace_edges(tr, tri, "traversed") == frozenset({(0, 1), (1, 2)})
    assert trace_edges(tr, tri, "induced") == {(0, 1), (1, 2), (0, 2)}


def test_trace_edges_bad_mode(ring_100_4):
    tr = random_walk(ring_100_4, 0, 3, derive_stream(0, ["t"]))
    with pytest.raises(ParameterError):
        trace_edges(tr, ring_100_4, "both")


def test_incorporate_is_pure_and_monotone(ring_100_4):
    src = rewire(ring_100_4, 0.5, derive_stream(1, ["s"]))
    rec = rewire(ring_100_4, 0.1, derive_stream(1, ["r"]))
    tr = random_walk(src, 0, 25, derive_stream(1, ["w"]))
    before = frozenset(rec.edges)
    out = incorporate_trace(rec, tr, src)
    assert rec.edges == before  # no mutation
    assert out.edges >= rec.edges
    assert out.edges - rec.edges <= tr.walk_edges


def test_incorporate_noop_returns_same_object(ring_100_4):
    tr = random_walk(ring_100_4, 0, 10, derive_stream(2, ["w"]))
    # all walk edges already present in the recipient (same graph)
    assert incorporate_trace(ring_100_4, tr, ring_100_4) is ring_100_4


def test_incorporate_induced_requires_source(ring_100_4):
    tr = random_walk(ring_100_4, 0, 5, derive_stream(0, ["w"]))
    with pytest.raises(ParameterError):
        incorporate_trace(ring_100_4, tr, None, mode="induced")


def test_augmented_adj_matches_rebuilt_graph(ring_100_4):
    # novel neighbors are appended after the sorted base lists, so compare
    # as sets per node
    extra = {(0, 50), (3, 70), (0, 1)}  # (0,1) already present
    adj = _augmented_adj(ring_100_4, extra)
    rebuilt = ConceptGraph(100, list(ring_100_4.edges) + list(extra))
    assert [sorted(nbrs) for nbrs in adj] == rebuilt.adj
    assert adj[0] == [1, 2, 98, 99, 50]
    # base graph untouched
    assert ring_100_4.adj[0] == [1, 2, 98, 99]


def test_augmented_adj_no_novel_edges_is_identity(ring_100_4):
    assert _augmented_adj(ring_100_4, {(0, 1)}) is ring_100_4.adj


def _pair(seed):
    sub = generate_substrate(SubstrateSpec(60, 4))
    src = rewire(sub, 0.4, derive_stream(seed, ["src"]))
    rec = rewire(sub, 0.05, derive_stream(seed, ["rec"]))
    return src, rec


def test_run_exposure_deterministic():
    src, rec = _pair(1)
    a = run_exposure(src, rec, 5, 15, 4, derive_stream(3, ["e"]))
    b = run_exposure(src, rec, 5, 15, 4, derive_stream(3, ["e"]))
    assert a == b
    assert 0.0 <= a.overlap_mean <= 1.0
    assert a.gain_mean >= 0.0


def test_run_exposure_ablation_gain_is_exactly_zero():
    # round two replays round-one draws, so without incorporation the walk
    # is identical and the gain vanishes
    src, rec = _pair(2)
    out = run_exposure(src, rec, 5, 15, 6, derive_stream(4, ["e"]), incorporate=False)
    assert out.gain_mean == 0.0


def test_run_exposure_ablation_shares_overlap_with_main():
    src, rec = _pair(3)
    main = run_exposure(src, rec, 7, 15, 6, derive_stream(5, ["e"]))
    abl = run_exposure(src, rec, 7, 15, 6, derive_stream(5, ["e"]), incorporate=False)
    assert main.overlap_mean == abl.overlap_mean


def test_run_exposure_validation():
    src, rec = _pair(4)
    with pytest.raises(ParameterError):
        run_exposure(src, rec, 0, 10, 0, derive_stream(0, ["e"]))


def _quad(seed):
    sub = generate_substrate(SubstrateSpec(60, 4))
    mk = lambda tag, p: rewire(sub, p, derive_stream(seed, [tag]))
    return mk("h1", 0.05), mk("h2", 0.05), mk("a", 0.45), mk("b", 0.45)


def test_redundancy_instance_deterministic():
    h1, h2, a, b = _quad(1)
    x = run_redundancy_instance(h1, h2, a, b, 3, 15, derive_stream(6, ["r"]))
    y = run_redundancy_instance(h1, h2, a, b, 3, 15, derive_stream(6, ["r"]))
    assert x == y
    assert x.delta == x.r_triad - x.r_control


def test_redundancy_redundant_traces_give_zero_delta():
    # when both traces carry no novel edges for b, the arms replay the same
    # walks and delta is exactly 0
    h1, _, _, _ = _quad(2)
    inst = run_redundancy_instance(h1, h1, h1, h1, 3, 15, derive_stream(7, ["r"]))
    assert inst.r_triad == inst.r_control
    assert inst.delta == 0.0


def test_redundancy_n_walks_validation():
    h1, h2, a, b = _quad(3)
    with pytest.raises(ParameterError):
        run_redundancy_instance(h1, h2, a, b, 0, 10, derive_stream(0, ["r"]), n_walks=0)


def test_redundancy_delta_positive_on_average():
    # shared inspiration should raise recipient similarity in most instances
    h1, h2, a, b = _quad(4)
    rng = derive_stream(8, ["r"])
    deltas = [
        run_redundancy_instance(h1, h2, a, b, int(rng.integers(60)), 20, rng).delta
        for _ in range(200)
    ]
    assert np.mean(deltas) > 0


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_jaccard_bounds_property(seed):
    rng = np.random.default_rng(seed)
    a = set(rng.integers(0, 30, size=rng.integers(1, 20)).tolist())
    b = set(rng.integers(0, 30, size=rng.integers(1, 20)).tolist())
    j = jaccard(a, b)
    assert 0.0 <= j <= 1.0
    assert jaccard(a, a) == 1.0
