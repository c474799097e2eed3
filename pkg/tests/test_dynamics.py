"""
Tests for consensus dynamics and the state-difference functional
"""
import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from consensus_game.dynamics import (
    BatchedDynamics,
    ConsensusWeights,
    as_state,
    consensus_step,
    state_difference,
    state_difference_graph_laplacian,
)
from consensus_game.error_handler import WeightError
from consensus_game.graph import Graph, complete_graph, path_graph
from tests.oracles import random_connected_graph


@pytest.fixture
def path3_weights():
    """Path 0-1-2 with a_01 = 0.1 and a_12 = 0.8"""
    g = path_graph(3)
    return g, ConsensusWeights.from_edge_weights(g, {(0, 1): 0.1, (1, 2): 0.8})


class TestConsensusStep:
    """Tests for one averaging step"""

    def test_full_graph_step(self, path3_weights):
        """Test the full 3-path update from [10, 0, -5]"""
        g, w = path3_weights
        assert np.allclose(consensus_step([10.0, 0.0, -5.0], g, w), [9.0, -3.0, -1.0])

    def test_empty_graph_is_identity(self, path3_weights):
        """Test no edges leaves the state unchanged"""
        _, w = path3_weights
        x = [10.0, 0.0, -5.0]
        assert np.array_equal(consensus_step(x, Graph(3, ()), w), x)

    def test_partial_graph(self, path3_weights):
        """Test only surviving edges average"""
        _, w = path3_weights
        x_next = consensus_step([10.0, 0.0, -5.0], Graph(3, ((1, 2),)), w)
        assert np.allclose(x_next, [10.0, -4.0, -1.0])

    def test_unweighted_edge_rejected(self, path3_weights):
        """Test an effective edge without a weight raises WeightError"""
        _, w = path3_weights
        with pytest.raises(WeightError):
            consensus_step([1.0, 2.0, 3.0], Graph(3, ((0, 2),)), w)

    def test_dimension_mismatch(self, path3_weights):
        """Test a state of the wrong length is rejected"""
        g, w = path3_weights
        with pytest.raises(ValueError):
            consensus_step([1.0, 2.0], g, w)

    def test_non_finite_state_rejected(self):
        """Test NaN entries are rejected"""
        with pytest.raises(ValueError):
            as_state([1.0, float("nan")])

    @given(
        st.lists(st.floats(-100, 100), min_size=4, max_size=4),
        st.integers(0, 7),
        st.floats(-50, 50),
    )
    @settings(max_examples=100, deadline=None)
    def test_sum_conserved_and_shift_invariant(self, x, mask, shift):
        """Test the step preserves the state sum and commutes with shifts"""
        base = path_graph(4)
        w = ConsensusWeights.uniform(base, 0.3)
        g = base.subgraph(mask)
        x_next = consensus_step(x, g, w)
        assert abs(x_next.sum() - sum(x)) <= 1e-9 * max(1.0, sum(abs(v) for v in x))
        shifted = consensus_step([v + shift for v in x], g, w)
        assert np.allclose(shifted, x_next + shift, atol=1e-9)


class TestStateDifference:
    """Tests for the complete-graph and base-graph forms"""

    def test_complete_graph_form(self):
        """Test 3*125 - 25 = 350 and the pairwise-sum form agree"""
        x = [10.0, 0.0, -5.0]
        assert state_difference(x) == pytest.approx(350.0, abs=1e-9)
        pairwise = sum((x[i] - x[j]) ** 2 for i in range(3) for j in range(i + 1, 3))
        assert state_difference(x) == pytest.approx(pairwise, abs=1e-9)

    def test_graph_laplacian_form(self):
        """Test the path-Laplacian values 148 and 125"""
        g = path_graph(3)
        assert state_difference_graph_laplacian([9.0, -3.0, -1.0], g) == pytest.approx(148.0)
        assert state_difference_graph_laplacian([10.0, 0.0, -5.0], g) == pytest.approx(125.0)

    def test_consensus_is_zero(self):
        """Test equal states give zero"""
        assert state_difference([2.5, 2.5, 2.5]) == 0.0

    def test_nonnegative_on_random_states(self):
        """Test the form is nonnegative and shift invariant"""
        rng = np.random.default_rng(3)
        for _ in range(50):
            x = rng.uniform(-10, 10, size=5)
            z = state_difference(x)
            assert z >= 0.0
            assert state_difference(x + 7.0) == pytest.approx(z, rel=1e-9, abs=1e-9)


class TestConsensusWeights:
    """Tests for weight validation"""

    def test_uniform_bound(self):
        """Test the uniform weight must stay below 1/(max degree + 1)"""
        with pytest.raises(WeightError):
            ConsensusWeights.uniform(complete_graph(4), 0.25)
        w = ConsensusWeights.uniform(complete_graph(4), 0.2)
        assert np.allclose(w.matrix.sum(axis=1), 0.6)

    def test_row_sum_rejected(self):
        """Test row sums of one or more are rejected"""
        with pytest.raises(WeightError):
            ConsensusWeights.from_edge_weights(path_graph(3), {(0, 1): 0.5, (1, 2): 0.5})

    def test_missing_weight_rejected(self):
        """Test every base edge needs a weight"""
        with pytest.raises(WeightError, match="Missing"):
            ConsensusWeights.from_edge_weights(path_graph(3), {(0, 1): 0.2})

    def test_non_edge_weight_rejected(self):
        """Test weights on non-edges are rejected"""
        with pytest.raises(WeightError):
            ConsensusWeights.from_edge_weights(path_graph(3), {(0, 1): 0.2, (1, 2): 0.2, (0, 2): 0.1})

    def test_asymmetric_matrix_rejected(self):
        """Test an asymmetric matrix is rejected"""
        matrix = np.array([[0.0, 0.2], [0.1, 0.0]])
        with pytest.raises(WeightError, match="symmetric"):
            ConsensusWeights(path_graph(2), matrix)

    def test_matrix_is_read_only(self):
        """Test the stored matrix cannot be mutated"""
        w = ConsensusWeights.uniform(path_graph(3), 0.2)
        with pytest.raises(ValueError):
            w.matrix[0, 1] = 0.4


class TestBatchedDynamics:
    """Tests for vectorised steps over every spanning subgraph"""

    def test_matches_single_steps(self):
        """Test every row equals the scalar step on the matching subgraph"""
        rng = np.random.default_rng(5)
        for _ in range(10):
            n = int(rng.integers(2, 6))
            g = random_connected_graph(rng, n, 6)
            w = ConsensusWeights.uniform(g, 0.9 / (g.max_degree + 1))
            x = rng.uniform(-1, 1, size=n)
            batched = BatchedDynamics(g, w)
            rows = batched.step_all(x)
            z_rows = batched.state_difference_rows(rows)
            lap_rows = batched.graph_laplacian_rows(rows)
            for mask in range(1 << g.edge_count):
                expected = consensus_step(x, g.subgraph(mask), w)
                assert np.allclose(rows[mask], expected, atol=1e-12)
                assert z_rows[mask] == pytest.approx(state_difference(expected), abs=1e-9)
                assert lap_rows[mask] == pytest.approx(
                    state_difference_graph_laplacian(expected, g), abs=1e-9
                )
