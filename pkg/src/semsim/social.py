"""Social interaction protocols.

Inspiration is trace exchange: a recipient augments its edge set with the
novel associative links from a source's walk trace, then re-walks from the
same prompt. The dyadic protocol measures pre-interaction overlap against
stimulation gain; the matched Triad/Control design measures the redundancy
externality of sharing one inspiration source.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, ParameterError
from .graphs import ConceptGraph
from .ideation import IdeationTrace, random_walk, walk_draws, walk_from_draws, walk_sequence

__all__ = [
    "ExposureRecord",
    "RedundancyInstance",
    "jaccard",
    "trace_edges",
    "incorporate_trace",
    "run_exposure",
    "run_redundancy_instance",
]

# Trace reading: "traversed" = edges the walk actually crossed;
# "induced" = all source-graph edges among the visited nodes.
TRACE_MODES = ("traversed", "induced")


@dataclass(frozen=True)
class ExposureRecord:
    """Iteration-averaged outcome of one (source -> recipient, prompt) exposure."""

    source_id: int
    recipient_id: int
    prompt: int
    overlap_mean: float
    gain_mean: float
    iterations: int


@dataclass(frozen=True)
class RedundancyInstance:
    """One matched Triad/Control comparison."""

    instance_id: int
    source1_id: int
    source2_id: int
    recipient_a_id: int
    recipient_b_id: int
    prompt: int
    r_triad: float
    r_control: float

    @property
    def delta(self) -> float:
        return self.r_triad - self.r_control


def jaccard(a, b) -> float:
    """|a & b| / |a | b| for node sets."""
    if not a and not b:
        raise DegenerateInputError("jaccard undefined for two empty sets")
    a, b = set(a), set(b)
    return len(a & b) / len(a | b)


def trace_edges(trace: IdeationTrace, source: ConceptGraph, mode: str = "traversed"):
    """Edge set a trace contributes, under either trace reading."""
    if mode == "traversed":
        return trace.walk_edges
    if mode == "induced":
        visited = trace.visited
        out = set()
        for u in visited:
            for v in source.adj[u]:
                if u < v and v in visited:
                    out.add((u, v))
        return out
    raise ParameterError(f"trace mode must be one of {TRACE_MODES}, got {mode!r}")


def incorporate_trace(
    recipient: ConceptGraph,
    source_trace: IdeationTrace,
    source: ConceptGraph | None = None,
    mode: str = "traversed",
) -> ConceptGraph:
    """Recipient's graph augmented with the trace's novel edges.

    Pure: returns a new graph, never mutates, never removes edges. The
    "induced" mode needs the source graph to read off induced edges.
    """
    if mode != "traversed" and source is None:
        raise ParameterError("induced mode requires the source graph")
    new = trace_edges(source_trace, source, mode) - recipient.edges
    if not new:
        return recipient
    return ConceptGraph(recipient.n, recipient.edges | new)


def _augmented_adj(graph: ConceptGraph, extra_edges):
    """Copy-on-write adjacency with extra edges appended (hot path).

    Only lists of touched nodes are copied. Appended neighbors follow the
    sorted base lists; extra edges are applied in sorted order so the
    result is canonical.
    """
    novel = sorted(e for e in extra_edges if e not in graph.edges)
    if not novel:
        return graph.adj
    adj = list(graph.adj)
    touched = set()
    for u, v in novel:
        for x, y in ((u, v), (v, u)):
            if x not in touched:
                adj[x] = list(adj[x])
                touched.add(x)
            adj[x].append(y)
    return adj


def run_exposure(
    source: ConceptGraph,
    recipient: ConceptGraph,
    s: int,
    T: int,
    iterations: int,
    rng: np.random.Generator,
    source_id: int = -1,
    recipient_id: int = -1,
    trace_mode: str = "traversed",
    incorporate: bool = True,
) -> ExposureRecord:
    """One ordered exposure, averaged over independent walk iterations.

    Per iteration: source walks; recipient walks independently from the same
    prompt; overlap is the round-one Jaccard similarity; the recipient
    incorporates the source trace's novel edges and re-walks; gain counts
    concepts in round two absent from the recipient's own round one.

    The round-two walk replays the recipient's round-one draws on the
    augmented graph (common random numbers), so gain isolates the effect of
    the incorporated edges rather than re-walk stochasticity. Consequently
    ``incorporate=False`` - the ablation switch - yields gain exactly 0.
    """
    if iterations < 1:
        raise ParameterError(f"iterations must be >= 1, got {iterations}")
    overlaps = np.empty(iterations)
    gains = np.empty(iterations)
    for it in range(iterations):
        src_trace = random_walk(source, s, T, rng)
        draws = walk_draws(T, rng)
        v_rec1 = frozenset(walk_from_draws(recipient.adj, s, draws))
        overlaps[it] = jaccard(src_trace.visited, v_rec1)
        if incorporate:
            adj2 = _augmented_adj(recipient, trace_edges(src_trace, source, trace_mode))
        else:
            adj2 = recipient.adj
        v_rec2 = set(walk_from_draws(adj2, s, draws))
        gains[it] = len(v_rec2 - v_rec1)
    return ExposureRecord(
        source_id=source_id,
        recipient_id=recipient_id,
        prompt=s,
        overlap_mean=float(overlaps.mean()),
        gain_mean=float(gains.mean()),
        iterations=iterations,
    )


def run_redundancy_instance(
    h1: ConceptGraph,
    h2: ConceptGraph,
    a: ConceptGraph,
    b: ConceptGraph,
    s: int,
    T: int,
    rng: np.random.Generator,
    instance_id: int = -1,
    ids: tuple = (-1, -1, -1, -1),
    trace_mode: str = "traversed",
    n_walks: int = 2,
) -> RedundancyInstance:
    """One matched Triad/Control comparison.

    Triad: both recipients incorporate source h1's trace tau1. Control:
    recipient a incorporates tau1, recipient b incorporates an independent
    trace tau2 from h2. Each recipient's round-two visited set is the union
    of n_walks independent length-T walks on the augmented graph. The tau1
    realization and each recipient's round-two walk randomness are shared
    across arms (common random numbers): b's w-th walk in Triad and Control
    consumes the same draws, so the arms differ only in b's inspiration
    source.
    """
    if n_walks < 1:
        raise ParameterError(f"n_walks must be >= 1, got {n_walks}")
    seeds = rng.integers(0, 1 << 62, size=4)
    gen = lambda seed: np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))

    tau1 = random_walk(h1, s, T, gen(seeds[0]))
    tau2 = random_walk(h2, s, T, gen(seeds[1]))
    e1 = trace_edges(tau1, h1, trace_mode)
    e2 = trace_edges(tau2, h2, trace_mode)

    # a incorporates tau1 in both arms; same walk seed, so V_a is arm-invariant
    adj_a = _augmented_adj(a, e1)
    adj_b_triad = _augmented_adj(b, e1)
    adj_b_control = _augmented_adj(b, e2)
    rng_a, rng_b = gen(seeds[2]), gen(seeds[3])
    v_a, v_b_triad, v_b_control = set(), set(), set()
    for _ in range(n_walks):
        v_a.update(walk_sequence(adj_a, s, T, rng_a))
        draws_b = walk_draws(T, rng_b)
        v_b_triad.update(walk_from_draws(adj_b_triad, s, draws_b))
        v_b_control.update(walk_from_draws(adj_b_control, s, draws_b))

    return RedundancyInstance(
        instance_id=instance_id,
        source1_id=ids[0],
        source2_id=ids[1],
        recipient_a_id=ids[2],
        recipient_b_id=ids[3],
        prompt=s,
        r_triad=jaccard(v_a, v_b_triad),
        r_control=jaccard(v_a, v_b_control),
    )
