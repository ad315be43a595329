import logging
import math
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx

from ETGossip.exceptions import TopologyError
from ETGossip.utils.rng import TOPOLOGY, setup_stream

Edge = Tuple[int, int]


@dataclass(frozen=True)
class Graph:
    """
    Static, undirected, connected communication graph.

    Edges are stored as sorted pairs (i, j) with i < j.
    """
    n: int
    edges: FrozenSet[Edge]
    seed: Optional[int] = None
    _adjacency: Tuple[Tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 2:
            raise TopologyError(f"A gossip graph needs at least 2 nodes, got n={self.n}")
        normalized = set()
        count = 0
        for i, j in self.edges:
            count += 1
            if i == j:
                raise TopologyError(f"Self-loop on node {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise TopologyError(f"Edge ({i}, {j}) references a node outside 0..{self.n - 1}")
            normalized.add((min(i, j), max(i, j)))
        if len(normalized) != count:
            raise TopologyError("Duplicate edge in edge set")
        object.__setattr__(self, "edges", frozenset(normalized))

        adjacency: List[List[int]] = [[] for _ in range(self.n)]
        for i, j in normalized:
            adjacency[i].append(j)
            adjacency[j].append(i)
        object.__setattr__(self, "_adjacency", tuple(tuple(sorted(a)) for a in adjacency))

        if not nx.is_connected(self.to_networkx()):
            raise TopologyError(f"Graph on {self.n} nodes with {len(normalized)} edges is not connected")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def neighbors(self, i: int) -> Tuple[int, ...]:
        return self._adjacency[i]

    def degree(self, i: int) -> int:
        return len(self._adjacency[i])

    def sorted_edges(self) -> List[Edge]:
        return sorted(self.edges)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g


def edge_count_for(n: int, target_sparsity: float) -> int:
    """|E| = round(((1 - s) n^2 - n) / 2), halves rounded up"""
    raw = ((1.0 - target_sparsity) * n * n - n) / 2.0
    return int(math.floor(raw + 0.5 + 1e-9))


def generate_topology(n: int, target_sparsity: float, seed: int, edge_count: Optional[int] = None) -> Graph:
    """
    Sample a connected graph with the edge count implied by a target sparsity.

    A uniform spanning tree of the complete graph is drawn first, then uniformly
    random non-edges are added until the edge count is reached.

    :param n: Node count (>= 2)
    :param target_sparsity: Fraction of zero entries of W aimed for, in [0, 1)
    :param seed: Seed for the topology stream; same (n, s, seed) gives the same graph
    :param edge_count: Explicit |E|, overriding the sparsity formula
    """
    if n < 2:
        raise TopologyError(f"A gossip graph needs at least 2 nodes, got n={n}")
    if edge_count is None:
        if not 0.0 <= target_sparsity < 1.0:
            raise TopologyError(f"Sparsity must lie in [0, 1), got {target_sparsity}")
        m = edge_count_for(n, target_sparsity)
    else:
        m = int(edge_count)
    max_edges = n * (n - 1) // 2
    if m < n - 1:
        raise TopologyError(f"{m} edges cannot connect {n} nodes (need at least {n - 1})")
    if m > max_edges:
        raise TopologyError(f"{m} edges exceed the {max_edges} possible on {n} nodes")

    rng = setup_stream(seed, TOPOLOGY)
    tree = nx.random_spanning_tree(nx.complete_graph(n), weight=None, seed=int(rng.integers(2**31 - 1)))
    edges = {(min(i, j), max(i, j)) for i, j in tree.edges()}

    extra = m - len(edges)
    if extra > 0:
        candidates = sorted((min(i, j), max(i, j)) for i, j in nx.non_edges(tree))
        picked = rng.choice(len(candidates), size=extra, replace=False)
        edges.update(candidates[k] for k in sorted(picked))

    logging.debug(f"Generated topology n={n} |E|={m} seed={seed}")
    return Graph(n=n, edges=frozenset(edges), seed=seed)


def graph_from_edges(n: int, edges: Iterable[Edge], seed: Optional[int] = None) -> Graph:
    return Graph(n=n, edges=frozenset((int(i), int(j)) for i, j in edges), seed=seed)


def realized_sparsity(g: Graph) -> float:
    """Zero entries of a W supported on g (self-loops included) divided by n^2"""
    return (g.n * g.n - g.n - 2 * g.edge_count) / float(g.n * g.n)


def count_full_comm(g: Graph, rounds: int) -> int:
    """Point-to-point transmissions when every node messages every neighbour every round"""
    return 2 * g.edge_count * max(int(rounds), 0)


def star_graph(n: int) -> Graph:
    return graph_from_edges(n, [(0, k) for k in range(1, n)])


def complete_graph(n: int) -> Graph:
    return graph_from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def path_graph(n: int) -> Graph:
    return graph_from_edges(n, [(k, k + 1) for k in range(n - 1)])

