"""
Communication graph model
Undirected simple graphs, groups, the agent-group index, edge connectivity and the Theta vector
"""
from __future__ import annotations

import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import TYPE_CHECKING, Dict, FrozenSet, Iterable, List, Sequence, Tuple

import networkx as nx
import numpy as np
from numpy.typing import NDArray

from .error_handler import EnumerationGuardError, GraphError
from .indices import DEFAULT_INDEX, get_index

if TYPE_CHECKING:
    from .game import ActionTriple


logger = logging.getLogger(__name__)

Edge = Tuple[int, int]

# Exhaustive subset enumeration limit for Theta and per-mask tables
MAX_ENUMERATION_EDGES = 20


def normalize_edge(edge: Sequence[int]) -> Edge:
    """Return an edge as an (i, j) pair with i < j"""
    i, j = int(edge[0]), int(edge[1])
    return (i, j) if i < j else (j, i)


class UnionFind:
    """Disjoint sets with path compression and union by rank"""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.rank = [1] * size

    def find(self, u: int) -> int:
        while self.parent[u] != u:
            self.parent[u] = self.parent[self.parent[u]]
            u = self.parent[u]
        return u

    def union(self, u: int, v: int) -> bool:
        root_u = self.find(u)
        root_v = self.find(v)
        if root_u == root_v:
            return False
        if self.rank[root_u] > self.rank[root_v]:
            self.parent[root_v] = root_u
        elif self.rank[root_u] < self.rank[root_v]:
            self.parent[root_u] = root_v
        else:
            self.parent[root_v] = root_u
            self.rank[root_u] += 1
        return True

    def blocks(self) -> List[FrozenSet[int]]:
        """Return the current classes, each as a frozenset of members"""
        classes: Dict[int, List[int]] = {}
        for item in range(len(self.parent)):
            classes.setdefault(self.find(item), []).append(item)
        return [frozenset(members) for members in classes.values()]


@dataclass(frozen=True)
class Graph:
    """
    Undirected simple graph over agents 0..n-1

    Edges are stored canonically: each pair has i < j and the tuple is sorted,
    so edge position doubles as the bit index used in edge masks.
    """
    n: int
    edges: Tuple[Edge, ...] = ()

    def __post_init__(self):
        if int(self.n) < 1:
            raise GraphError(f"Graph needs at least one agent, got n={self.n}")
        object.__setattr__(self, "n", int(self.n))

        normalized = []
        for raw in self.edges:
            if len(raw) != 2:
                raise GraphError(f"Edge {raw!r} must be a pair of agent ids")
            i, j = normalize_edge(raw)
            if i == j:
                raise GraphError(f"Self-loop on agent {i} is not allowed")
            if i < 0 or j >= self.n:
                raise GraphError(f"Edge ({i}, {j}) references an agent outside 0..{self.n - 1}")
            normalized.append((i, j))

        canonical = tuple(sorted(normalized))
        if len(set(canonical)) != len(canonical):
            dupes = sorted(e for e, count in Counter(canonical).items() if count > 1)
            raise GraphError(f"Duplicate edges: {dupes}")
        object.__setattr__(self, "edges", canonical)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.edges)) - 1

    @cached_property
    def _positions(self) -> Dict[Edge, int]:
        return {edge: pos for pos, edge in enumerate(self.edges)}

    def has_edge(self, edge: Sequence[int]) -> bool:
        return normalize_edge(edge) in self._positions

    def index_of(self, edge: Sequence[int]) -> int:
        """
        Bit index of an edge

        Raises:
            GraphError: If the edge is not part of the graph
        """
        key = normalize_edge(edge)
        try:
            return self._positions[key]
        except KeyError:
            raise GraphError(f"Edge {key} is not in the graph") from None

    def mask_of(self, edges: Iterable[Sequence[int]]) -> int:
        mask = 0
        for edge in edges:
            mask |= 1 << self.index_of(edge)
        return mask

    def edges_of(self, mask: int) -> Tuple[Edge, ...]:
        return tuple(edge for pos, edge in enumerate(self.edges) if mask >> pos & 1)

    def subgraph(self, mask: int) -> "Graph":
        """Spanning subgraph keeping the edges selected by mask"""
        return Graph(self.n, self.edges_of(mask))

    def is_subgraph_of(self, other: "Graph") -> bool:
        return self.n == other.n and all(other.has_edge(e) for e in self.edges)

    def degrees(self) -> NDArray[np.int64]:
        deg = np.zeros(self.n, dtype=np.int64)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    @property
    def max_degree(self) -> int:
        return int(self.degrees().max()) if self.n else 0

    def is_complete(self) -> bool:
        return len(self.edges) == self.n * (self.n - 1) // 2

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    @classmethod
    def from_networkx(cls, g: nx.Graph) -> "Graph":
        """Build a Graph from a networkx graph whose nodes are 0..n-1"""
        return cls(g.number_of_nodes(), tuple(g.edges()))


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty agent blocks covering all agents, ordered by smallest member"""
    blocks: Tuple[FrozenSet[int], ...]

    def __post_init__(self):
        ordered = tuple(sorted((frozenset(b) for b in self.blocks), key=min))
        seen: set = set()
        for block in ordered:
            if not block:
                raise ValueError("Partition blocks must be nonempty")
            if seen & block:
                raise ValueError("Partition blocks must be disjoint")
            seen |= block
        if seen != set(range(len(seen))):
            raise ValueError("Partition blocks must cover agents 0..n-1")
        object.__setattr__(self, "blocks", ordered)

    @property
    def count(self) -> int:
        return len(self.blocks)

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def as_lists(self) -> List[List[int]]:
        return [sorted(b) for b in self.blocks]


@dataclass(frozen=True)
class ThetaVector:
    """Theta_j: the most groups obtainable by removing exactly j edges (1-based j)"""
    values: Tuple[int, ...]

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        if any(b < a for a, b in zip(values, values[1:])):
            raise ValueError(f"Theta must be nondecreasing: {values}")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    def theta(self, j: int) -> int:
        """Theta_j with 1-based j; j <= 0 gives 1, j beyond |E| clamps to |E|"""
        if j <= 0 or not self.values:
            return 1
        return self.values[min(j, len(self.values)) - 1]


def groups(g: Graph) -> Partition:
    """Connected components of g as a Partition"""
    return Partition(tuple(frozenset(c) for c in nx.connected_components(g.to_networkx())))


def is_connected(g: Graph) -> bool:
    return groups(g).count == 1


def agent_group_index(g: Graph) -> int:
    """Sum of squared component sizes minus n squared; 0 iff g is connected"""
    return get_index(DEFAULT_INDEX)(g.n, groups(g).sizes)


def group_index(g: Graph, index_name: str = DEFAULT_INDEX) -> float:
    """Evaluate a registered group index on g"""
    return get_index(index_name)(g.n, groups(g).sizes)


def edge_connectivity(g: Graph) -> int:
    """
    Smallest number of edges whose removal disconnects g

    Removal sets are tried in increasing size; lambda never exceeds the
    minimum degree, so the search stops early.

    Raises:
        GraphError: If g is disconnected or has a single agent
    """
    if g.n < 2:
        raise GraphError("Edge connectivity needs at least two agents")
    if not is_connected(g):
        raise GraphError("Edge connectivity is defined for connected graphs only")

    full = g.full_mask
    for size in range(1, g.edge_count + 1):
        for removed in itertools.combinations(range(g.edge_count), size):
            mask = full
            for pos in removed:
                mask &= ~(1 << pos)
            if _count_groups(g, mask) > 1:
                return size
    # Only reachable for a connected graph without edges, which needs n == 1
    raise GraphError("Graph cannot be disconnected by edge removal")


def _count_groups(g: Graph, mask: int) -> int:
    uf = UnionFind(g.n)
    count = g.n
    for pos, (i, j) in enumerate(g.edges):
        if mask >> pos & 1 and uf.union(i, j):
            count -= 1
    return count


def popcount(values: NDArray[np.int64]) -> NDArray[np.int64]:
    """Number of set bits per entry"""
    values = np.asarray(values, dtype=np.int64)
    counts = np.zeros(values.shape, dtype=np.int64)
    remaining = values.copy()
    while np.any(remaining):
        counts += remaining & 1
        remaining >>= 1
    return counts


@dataclass(frozen=True, eq=False)
class GroupTable:
    """Per-mask group counts and index values for every spanning subgraph of a graph"""
    graph: Graph
    index_name: str
    group_counts: NDArray[np.int64]
    index_values: NDArray[np.float64]


@lru_cache(maxsize=64)
def group_table(
    g: Graph,
    index_name: str = DEFAULT_INDEX,
    max_edges: int = MAX_ENUMERATION_EDGES
) -> GroupTable:
    """
    Group counts and index values indexed by kept-edge mask

    Raises:
        EnumerationGuardError: If g has more than max_edges edges
    """
    if g.edge_count > max_edges:
        raise EnumerationGuardError(
            f"Graph has {g.edge_count} edges; per-mask enumeration is limited to {max_edges}"
        )
    index = get_index(index_name)
    size = 1 << g.edge_count
    counts = np.empty(size, dtype=np.int64)
    values = np.empty(size, dtype=np.float64)
    for mask in range(size):
        uf = UnionFind(g.n)
        for pos, (i, j) in enumerate(g.edges):
            if mask >> pos & 1:
                uf.union(i, j)
        sizes = [len(b) for b in uf.blocks()]
        counts[mask] = len(sizes)
        values[mask] = index(g.n, sizes)
    counts.setflags(write=False)
    values.setflags(write=False)
    logger.debug(f"Built group table for {g.edge_count} edges ({size} masks, index={index_name})")
    return GroupTable(graph=g, index_name=index_name, group_counts=counts, index_values=values)


def theta_vector(g: Graph, max_edges: int = MAX_ENUMERATION_EDGES) -> ThetaVector:
    """
    Theta_j = max number of groups after removing exactly j edges, j = 1..|E|

    Raises:
        GraphError: If g is disconnected
        EnumerationGuardError: If |E| exceeds max_edges
    """
    if not is_connected(g):
        raise GraphError("Theta vector is defined for connected graphs only")
    if g.edge_count > max_edges:
        raise EnumerationGuardError(
            f"Theta enumeration over {g.edge_count} edges exceeds the limit of {max_edges}"
        )
    table = group_table(g, DEFAULT_INDEX, max_edges)
    masks = np.arange(1 << g.edge_count, dtype=np.int64)
    removed = g.edge_count - popcount(masks)
    values = tuple(
        int(table.group_counts[removed == j].max()) for j in range(1, g.edge_count + 1)
    )
    return ThetaVector(values)


def apply_actions(base: Graph, act: "ActionTriple") -> Graph:
    """
    Effective graph after attack and recovery: (V, (E minus attacked) plus recovered)

    Raises:
        GraphError: If the action references an edge not in base
    """
    strong = base.mask_of(act.strong)
    normal = base.mask_of(act.normal)
    recovered = base.mask_of(act.recovered)
    return base.subgraph(base.full_mask & ~strong & ~(normal & ~recovered))


def path_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def complete_graph(n: int) -> Graph:
    return Graph(n, tuple(itertools.combinations(range(n), 2)))
