"""Semantic concept networks.

Each agent's semantic memory is an unweighted, undirected simple graph on a
fixed node set 0..n-1. A population shares one ring-lattice substrate; agents
are derived from it by Watts-Strogatz edge rewiring, whose probability p acts
as the single generative knob for modular structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, ParameterError

__all__ = [
    "ConceptGraph",
    "SubstrateSpec",
    "AgentSpec",
    "CommunityPartition",
    "generate_substrate",
    "rewire",
    "detect_communities",
    "modularity",
    "agent_modularity",
    "connected_components",
    "save_edge_list",
    "load_edge_list",
]


@dataclass(frozen=True)
class SubstrateSpec:
    """Ring-lattice parameters: n nodes, each tied to its k nearest neighbors."""

    n: int
    k: int

    def validate(self) -> None:
        if self.n < 3:
            raise ParameterError(f"n must be >= 3, got {self.n}")
        if self.k % 2 != 0 or self.k < 2:
            raise ParameterError(f"k must be a positive even integer, got {self.k}")
        if self.k >= self.n:
            raise ParameterError(f"k must be < n, got k={self.k}, n={self.n}")


@dataclass(frozen=True)
class AgentSpec:
    """One agent's generative parameters."""

    agent_id: int
    p: float
    rng_stream: str = ""

    def validate(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ParameterError(f"rewiring probability must be in [0,1], got {self.p}")


class ConceptGraph:
    """Immutable simple undirected graph on nodes 0..n-1.

    ``edges`` is a frozenset of (u, v) tuples with u < v; ``adj`` holds a
    sorted neighbor list per node and is kept exactly consistent with the
    edge set.
    """

    __slots__ = ("n", "edges", "adj")

    def __init__(self, n: int, edges) -> None:
        if n < 1:
            raise ParameterError(f"node count must be positive, got {n}")
        canon = set()
        for u, v in edges:
            if u == v:
                raise ParameterError(f"self-loop on node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ParameterError(f"edge ({u},{v}) outside node range 0..{n - 1}")
            canon.add((u, v) if u < v else (v, u))
        self.n = n
        self.edges = frozenset(canon)
        adj = [[] for _ in range(n)]
        for u, v in canon:
            adj[u].append(v)
            adj[v].append(u)
        for nbrs in adj:
            nbrs.sort()
        self.adj = adj

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def degrees(self) -> np.ndarray:
        return np.array([len(nbrs) for nbrs in self.adj], dtype=np.int64)

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self.edges

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConceptGraph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"ConceptGraph(n={self.n}, m={len(self.edges)})"


@dataclass(frozen=True)
class CommunityPartition:
    """Node -> community assignment with dense community ids 0..C-1."""

    assignment: tuple
    community_count: int

    def __post_init__(self):
        seen = set(self.assignment)
        if seen != set(range(self.community_count)):
            raise ParameterError("community ids must be dense 0..C-1 and all used")

    def members(self) -> list:
        out = [[] for _ in range(self.community_count)]
        for node, cid in enumerate(self.assignment):
            out[cid].append(node)
        return out


def generate_substrate(spec: SubstrateSpec) -> ConceptGraph:
    """Ring lattice: node i adjacent to i+-1 .. i+-k/2 (mod n)."""
    spec.validate()
    n, half = spec.n, spec.k // 2
    edges = [(i, (i + off) % n) for i in range(n) for off in range(1, half + 1)]
    return ConceptGraph(n, edges)


def rewire(substrate: ConceptGraph, p: float, rng: np.random.Generator) -> ConceptGraph:
    """Watts-Strogatz rewiring of a ring lattice.

    Lattice edges are visited in canonical order (near endpoint, then offset).
    With probability p the far endpoint is replaced by a uniformly random node;
    self-loops and duplicate edges are rejected with up to n retries, after
    which the edge is left in place. Edge count is preserved exactly.
    """
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"p must be in [0,1], got {p}")
    n = substrate.n
    half = substrate.edge_count * 2 // (2 * n)  # k/2 for an n*k/2-edge lattice
    adj = [set(nbrs) for nbrs in substrate.adj]
    for i in range(n):
        for off in range(1, half + 1):
            j = (i + off) % n
            if p <= 0.0 or rng.random() >= p:
                continue
            for _ in range(n):
                w = int(rng.integers(n))
                if w != i and w not in adj[i]:
                    adj[i].discard(j)
                    adj[j].discard(i)
                    adj[i].add(w)
                    adj[w].add(i)
                    break
    edges = [(u, v) for u in range(n) for v in adj[u] if u < v]
    return ConceptGraph(n, edges)


def modularity(graph: ConceptGraph, partition: CommunityPartition) -> float:
    """Newman-Girvan modularity Q = sum_c [L_c/m - (d_c/2m)^2]."""
    m = graph.edge_count
    if m == 0:
        raise DegenerateInputError("modularity undefined on an edgeless graph")
    if len(partition.assignment) != graph.n:
        raise ParameterError("partition does not cover the node set")
    assign = partition.assignment
    intra = np.zeros(partition.community_count, dtype=np.int64)
    deg_sum = np.zeros(partition.community_count, dtype=np.int64)
    for u, v in graph.edges:
        if assign[u] == assign[v]:
            intra[assign[u]] += 1
    for node, cid in enumerate(assign):
        deg_sum[cid] += graph.degree(node)
    frac = intra / m
    deg_frac = deg_sum / (2.0 * m)
    return float(np.sum(frac - deg_frac**2))


def detect_communities(graph: ConceptGraph) -> CommunityPartition:
    """Greedy agglomerative modularity maximization (Clauset-Newman-Moore).

    Starts from singletons and repeatedly merges the connected community pair
    with maximal modularity gain until no merge improves Q. The gain of merging
    (c1, c2) is L12/m - d1*d2/(2m^2); we compare the integer numerator
    2m*L12 - d1*d2 so ties are exact, broken toward the lexicographically
    lowest (community-id, community-id) pair.
    """
    m = graph.edge_count
    if m == 0:
        raise DegenerateInputError("community detection needs at least one edge")
    n = graph.n
    # live community state: degree sums and inter-community edge counts
    deg = {c: graph.degree(c) for c in range(n)}
    between: dict = {c: {} for c in range(n)}
    for u, v in graph.edges:
        between[u][v] = between[u].get(v, 0) + 1
        between[v][u] = between[v].get(u, 0) + 1
    members = {c: [c] for c in range(n)}

    while True:
        best_score = 0
        best_pair = None
        for c1 in sorted(between):
            row = between[c1]
            for c2 in sorted(row):
                if c2 <= c1:
                    continue
                score = 2 * m * row[c2] - deg[c1] * deg[c2]
                if score > best_score:
                    best_score = score
                    best_pair = (c1, c2)
        if best_pair is None:
            break
        c1, c2 = best_pair
        # merge c2 into c1
        members[c1].extend(members.pop(c2))
        deg[c1] += deg.pop(c2)
        row2 = between.pop(c2)
        between[c1].pop(c2, None)
        for other, cnt in row2.items():
            if other == c1:
                continue
            between[other].pop(c2, None)
            between[c1][other] = between[c1].get(other, 0) + cnt
            between[other][c1] = between[c1][other]

    comm_lists = sorted(members.values(), key=min)
    assignment = [0] * n
    for cid, nodes in enumerate(comm_lists):
        for node in nodes:
            assignment[node] = cid
    return CommunityPartition(tuple(assignment), len(comm_lists))


def agent_modularity(graph: ConceptGraph) -> float:
    """Q of the detected partition; the per-agent modularity used downstream."""
    return modularity(graph, detect_communities(graph))


def connected_components(graph: ConceptGraph) -> list:
    """Maximal connected components, each sorted, listed by smallest member."""
    seen = [False] * graph.n
    comps = []
    for start in range(graph.n):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        comp = []
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in graph.adj[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        comps.append(sorted(comp))
    comps.sort(key=lambda c: c[0])
    return comps


def save_edge_list(graph: ConceptGraph, path, k: int, p: float, seed) -> None:
    """Write the exchange format: header ``n k p seed``, then sorted ``u v`` lines."""
    with open(path, "w") as fh:
        fh.write(f"{graph.n} {k} {p!r} {seed}\n")
        for u, v in sorted(graph.edges):
            fh.write(f"{u} {v}\n")


def load_edge_list(path):
    """Read the edge-list format; returns (graph, header) with header
    keys n, k, p, seed."""
    with open(path) as fh:
        first = fh.readline().split()
        if len(first) != 4:
            raise ParameterError(f"malformed edge-list header in {path}")
        n, k = int(first[0]), int(first[1])
        header = {"n": n, "k": k, "p": float(first[2]), "seed": first[3]}
        edges = []
        for line in fh:
            if line.strip():
                u, v = line.split()
                edges.append((int(u), int(v)))
    return ConceptGraph(n, edges), header
