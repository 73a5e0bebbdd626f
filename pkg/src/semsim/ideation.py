"""Fixed stochastic semantic search.

Every agent ideates the same way: an unbiased length-T random walk from a
prompt node. The walk's visited set is the breadth measure; the traversed
edges are the trace object exchanged in social interaction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .graphs import ConceptGraph

__all__ = [
    "IdeationTrace",
    "BreadthEstimate",
    "random_walk",
    "walk_sequence",
    "breadth",
    "expected_breadth",
    "trace_to_text",
]


@dataclass(frozen=True)
class IdeationTrace:
    """One walk: node sequence, distinct visited nodes, traversed edges."""

    prompt: int
    sequence: tuple
    visited: frozenset
    walk_edges: frozenset


@dataclass(frozen=True)
class BreadthEstimate:
    """Mean breadth over prompts and replicates, with a prompt-bootstrap CI."""

    mean: float
    ci_low: float
    ci_high: float
    prompts_used: int
    replicates_per_prompt: int
    bootstrap_iters: int


def walk_draws(T: int, rng: np.random.Generator) -> list:
    """The raw random draws consumed by one length-T walk.

    Kept separate so a walk can be replayed on a modified graph with common
    random numbers: the same draws on an augmented adjacency isolate the
    effect of the added edges.
    """
    return rng.integers(0, 1 << 62, size=T).tolist()


def walk_from_draws(adj, s: int, draws) -> list:
    """Node sequence of a walk driven by precomputed draws."""
    seq = [s]
    cur = s
    T = len(draws)
    for r in draws:
        nbrs = adj[cur]
        d = len(nbrs)
        if d == 0:
            seq.extend([cur] * (T + 1 - len(seq)))
            break
        cur = nbrs[r % d]
        seq.append(cur)
    return seq


def walk_sequence(adj, s: int, T: int, rng: np.random.Generator) -> list:
    """Raw node sequence of a length-T unbiased walk over adjacency lists.

    At each step the walker moves to a uniformly random neighbor; a degree-0
    node absorbs the walk. Exposed separately so callers that only need the
    sequence (hot loops) skip trace construction.
    """
    if T == 0:
        return [s]
    return walk_from_draws(adj, s, walk_draws(T, rng))


def random_walk(graph: ConceptGraph, s: int, T: int, rng: np.random.Generator) -> IdeationTrace:
    """Length-T random walk from prompt s, with full trace record."""
    if T < 0:
        raise ParameterError(f"walk length must be >= 0, got {T}")
    if not 0 <= s < graph.n:
        raise ParameterError(f"prompt {s} outside node range 0..{graph.n - 1}")
    seq = walk_sequence(graph.adj, s, T, rng)
    edges = set()
    for a, b in zip(seq, seq[1:]):
        if a != b:
            edges.add((a, b) if a < b else (b, a))
    return IdeationTrace(
        prompt=s,
        sequence=tuple(seq),
        visited=frozenset(seq),
        walk_edges=frozenset(edges),
    )


def breadth(trace: IdeationTrace) -> int:
    """Number of distinct concepts visited by the walk."""
    return len(trace.visited)


def expected_breadth(
    graph: ConceptGraph,
    T: int,
    S: int,
    R: int,
    rng: np.random.Generator,
    bootstrap_iters: int = 1000,
) -> BreadthEstimate:
    """Estimate expected breadth by averaging R walks over S sampled prompts.

    Prompts are drawn uniformly with replacement from V. The point estimate is
    the mean of per-prompt means; the 95% CI comes from a percentile bootstrap
    that resamples prompts (i.e. the S per-prompt means) with replacement.
    """
    if S < 1 or R < 1:
        raise ParameterError(f"S and R must be >= 1, got S={S}, R={R}")
    if bootstrap_iters < 100:
        raise ParameterError(f"bootstrap_iters must be >= 100, got {bootstrap_iters}")
    adj = graph.adj
    prompts = rng.integers(0, graph.n, size=S).tolist()
    prompt_means = np.empty(S)
    for idx, s in enumerate(prompts):
        total = 0
        for _ in range(R):
            total += len(set(walk_sequence(adj, s, T, rng)))
        prompt_means[idx] = total / R
    mean = float(prompt_means.mean())
    picks = rng.integers(0, S, size=(bootstrap_iters, S))
    boot_means = prompt_means[picks].mean(axis=1)
    lo, hi = np.percentile(boot_means, [2.5, 97.5])
    return BreadthEstimate(
        mean=mean,
        ci_low=float(lo),
        ci_high=float(hi),
        prompts_used=S,
        replicates_per_prompt=R,
        bootstrap_iters=bootstrap_iters,
    )


def trace_to_text(trace: IdeationTrace) -> str:
    """Debug serialization: ``s; n0,n1,...,nT``."""
    return f"{trace.prompt}; " + ",".join(str(v) for v in trace.sequence)
