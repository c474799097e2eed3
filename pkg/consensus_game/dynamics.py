"""
Consensus dynamics
Discrete-time weighted averaging over the effective graph and the state-difference functional
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from numpy.typing import NDArray

from .error_handler import WeightError
from .graph import Edge, Graph, normalize_edge


logger = logging.getLogger(__name__)

StateVector = NDArray[np.float64]


def as_state(x: Sequence[float]) -> StateVector:
    """Validate and copy agent states into a float64 vector"""
    state = np.array(x, dtype=np.float64)
    if state.ndim != 1:
        raise ValueError(f"State must be a 1-D vector, got shape {state.shape}")
    if not np.all(np.isfinite(state)):
        raise ValueError("State entries must be finite")
    return state


@dataclass(frozen=True, eq=False)
class ConsensusWeights:
    """
    Symmetric consensus weights a_ij on the edges of a base graph

    Every base edge carries a positive weight, non-edges carry zero, and each
    agent's weights sum to less than one.
    """
    graph: Graph
    matrix: NDArray[np.float64]

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.float64)
        n = self.graph.n
        if matrix.shape != (n, n):
            raise WeightError(f"Weight matrix must be {n}x{n}, got {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise WeightError("Weights must be finite")
        if not np.allclose(matrix, matrix.T, rtol=0.0, atol=0.0):
            raise WeightError("Weights must be symmetric (a_ij = a_ji)")
        if np.any(np.diag(matrix) != 0.0):
            raise WeightError("Self weights a_ii must be zero")

        adjacency = np.zeros((n, n), dtype=bool)
        for i, j in self.graph.edges:
            adjacency[i, j] = adjacency[j, i] = True
            if matrix[i, j] <= 0.0:
                raise WeightError(f"Weight for edge ({i}, {j}) must be positive")
        if np.any(matrix[~adjacency] != 0.0):
            raise WeightError("Weights are only allowed on base graph edges")
        if np.any(matrix < 0.0):
            raise WeightError("Weights must be nonnegative")

        row_sums = matrix.sum(axis=1)
        if np.any(row_sums >= 1.0):
            worst = int(np.argmax(row_sums))
            raise WeightError(
                f"Weights of agent {worst} sum to {row_sums[worst]:.6g}; each row sum must be < 1"
            )

        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def uniform(cls, graph: Graph, a_hat: float) -> "ConsensusWeights":
        """
        Same weight on every base edge

        Args:
            graph: Base graph
            a_hat: Common weight, must satisfy a_hat < 1/(max degree + 1)

        Raises:
            WeightError: If a_hat is out of range
        """
        limit = 1.0 / (graph.max_degree + 1)
        if not 0.0 < a_hat < limit:
            raise WeightError(
                f"Uniform weight {a_hat} must lie in (0, {limit:.6g}) for max degree {graph.max_degree}"
            )
        matrix = np.zeros((graph.n, graph.n), dtype=np.float64)
        for i, j in graph.edges:
            matrix[i, j] = matrix[j, i] = a_hat
        return cls(graph, matrix)

    @classmethod
    def from_edge_weights(cls, graph: Graph, weights: Mapping[Edge, float]) -> "ConsensusWeights":
        """
        Per-edge weights

        Raises:
            WeightError: If a base edge has no weight or a weight names a non-edge
        """
        matrix = np.zeros((graph.n, graph.n), dtype=np.float64)
        for raw, value in weights.items():
            i, j = normalize_edge(raw)
            if not graph.has_edge((i, j)):
                raise WeightError(f"Weight given for ({i}, {j}) which is not a base edge")
            matrix[i, j] = matrix[j, i] = float(value)
        missing = [e for e in graph.edges if matrix[e[0], e[1]] == 0.0]
        if missing:
            raise WeightError(f"Missing weights for edges {missing}")
        return cls(graph, matrix)

    def edge_weights(self) -> NDArray[np.float64]:
        """Weights in base-edge order"""
        return np.array([self.matrix[i, j] for i, j in self.graph.edges], dtype=np.float64)


def consensus_step(x: Sequence[float], g_eff: Graph, w: ConsensusWeights) -> StateVector:
    """
    One consensus update x_i + sum_j a_ij (x_j - x_i) over the neighbours in g_eff

    Raises:
        WeightError: If g_eff uses an edge that has no weight
    """
    state = as_state(x)
    if state.shape[0] != g_eff.n:
        raise ValueError(f"State has {state.shape[0]} entries but the graph has {g_eff.n} agents")

    active = np.zeros_like(w.matrix)
    for i, j in g_eff.edges:
        weight = w.matrix[i, j]
        if weight <= 0.0:
            raise WeightError(f"No consensus weight for edge ({i}, {j})")
        active[i, j] = active[j, i] = weight
    return state + active @ state - active.sum(axis=1) * state


def state_difference(x_next: Sequence[float]) -> float:
    """
    Quadratic form of the complete-graph Laplacian: n*sum(x^2) - (sum x)^2

    Evaluated in centered form, n * sum((x - mean)^2), which is the same quantity.
    """
    state = np.asarray(x_next, dtype=np.float64)
    if state.size == 0:
        return 0.0
    centered = state - state.mean()
    return float(state.size * np.dot(centered, centered))


def state_difference_graph_laplacian(x_next: Sequence[float], g: Graph) -> float:
    """Sum of squared differences across the edges of g"""
    state = np.asarray(x_next, dtype=np.float64)
    return float(sum((state[i] - state[j]) ** 2 for i, j in g.edges))


class BatchedDynamics:
    """
    Consensus steps for every spanning subgraph of a base graph at once

    Row r of each result corresponds to the effective graph keeping the base
    edges whose bits are set in r.
    """

    def __init__(self, base: Graph, w: ConsensusWeights):
        self.base = base
        self.m = base.edge_count
        self._heads = np.array([i for i, _ in base.edges], dtype=np.int64)
        self._tails = np.array([j for _, j in base.edges], dtype=np.int64)
        self._weights = w.edge_weights()

        incidence = np.zeros((self.m, base.n), dtype=np.float64)
        incidence[np.arange(self.m), self._heads] = 1.0
        incidence[np.arange(self.m), self._tails] = -1.0
        self._incidence = incidence

        masks = np.arange(1 << self.m, dtype=np.int64)
        self._active = ((masks[:, None] >> np.arange(self.m)) & 1).astype(np.float64)

    def step_all(self, x: StateVector) -> NDArray[np.float64]:
        """Next states for all 2^m effective graphs, shape (2^m, n)"""
        flow = self._active * (self._weights * (x[self._tails] - x[self._heads]))
        return x[None, :] + flow @ self._incidence

    @staticmethod
    def state_difference_rows(states: NDArray[np.float64]) -> NDArray[np.float64]:
        centered = states - states.mean(axis=1, keepdims=True)
        return states.shape[1] * np.einsum("ij,ij->i", centered, centered)

    def graph_laplacian_rows(self, states: NDArray[np.float64]) -> NDArray[np.float64]:
        diffs = states[:, self._heads] - states[:, self._tails]
        return np.einsum("ij,ij->i", diffs, diffs)
