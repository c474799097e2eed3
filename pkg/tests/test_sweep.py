"""
Tests for parameter sweeps
"""
import networkx as nx
import numpy as np
import pytest

from consensus_game.graph import edge_connectivity
from consensus_game.models import ScenarioConfig, SweepAxis, SweepSpec
from consensus_game.scenarios import max_connectivity_graph
from consensus_game.sweep import (
    apply_grid_point,
    axis_overrides,
    expand_grid,
    run_sweep,
    sample_initial_states,
)
from tests.conftest import scenario_payload


def five_agents(edge_count=10, weight=0.18, **sections):
    payload = scenario_payload(
        graph={"n": 5, "edges": [list(e) for e in max_connectivity_graph(5, edge_count).edges]},
        x0=[-1.0, -0.5, 0.0, 0.5, 1.0],
        weights={"uniform": weight},
        **sections,
    )
    return ScenarioConfig.model_validate(payload)


class TestSampling:
    """Tests for seeded initial states"""

    def test_reproducible(self):
        """Test equal seeds give equal samples inside [-1, 1]"""
        first = sample_initial_states(4, 10, 123)
        assert first.shape == (10, 4)
        assert np.array_equal(first, sample_initial_states(4, 10, 123))
        assert np.all((first >= -1.0) & (first <= 1.0))
        assert not np.array_equal(first, sample_initial_states(4, 10, 124))


class TestAxes:
    """Tests for axis overrides"""

    def test_ratio_axis(self, make_scenario):
        """Test the ratio axis sets kappa = rho = ratio * beta_strong"""
        scenario = make_scenario()
        changed = apply_grid_point(scenario, [(SweepAxis(parameter="ratio", values=[1.5]), 1.5)])
        assert changed.attacker.kappa == 3.0
        assert changed.attacker.rho == 3.0

    def test_b_complement(self, make_scenario):
        """Test b follows 1 - a"""
        axis = SweepAxis(parameter="game.a", values=[0.3], b_complement=True)
        assert axis_overrides(make_scenario(), axis, 0.3) == pytest.approx({"game.a": 0.3, "game.b": 0.7})

    def test_integer_axis(self, make_scenario):
        """Test integer parameters reject fractional values"""
        axis = SweepAxis(parameter="game.h", values=[1.5])
        with pytest.raises(ValueError):
            axis_overrides(make_scenario(), axis, 1.5)
        assert axis_overrides(make_scenario(), axis, 3.0) == {"game.h": 3}

    @pytest.mark.parametrize("edge_count", [4, 5, 7, 10])
    def test_edge_count_axis(self, edge_count):
        """Test the edge-count axis rebuilds a maximally connected graph with valid weights"""
        changed = apply_grid_point(five_agents(), [(SweepAxis(parameter="edge_count", values=[edge_count]), edge_count)])
        graph = changed.base_graph()
        assert graph.edge_count == edge_count
        assert edge_connectivity(graph) == nx.edge_connectivity(nx.hnm_harary_graph(5, edge_count))
        assert changed.weights.uniform <= 0.9 / (graph.max_degree + 1)

    def test_edge_count_out_of_range(self):
        """Test impossible edge counts are rejected"""
        with pytest.raises(ValueError):
            max_connectivity_graph(5, 11)


class TestGrid:
    """Tests for grid expansion and execution"""

    def spec(self, **extra):
        payload = {
            "base": scenario_payload(run={"K_max": 3}),
            "axes": [
                {"parameter": "game.a", "values": [0.2, 0.8], "b_complement": True},
                {"parameter": "game.h", "values": [1, 2]},
            ],
        }
        payload.update(extra)
        return SweepSpec.model_validate(payload)

    def test_grid_order(self):
        """Test axis combinations are outermost and samples innermost"""
        points = expand_grid(self.spec(x0_samples={"count": 3, "seed": 1}))
        assert len(points) == 12
        assert [p.index for p in points] == list(range(12))
        assert [p.values for p in points[:4]] == [(0.2, 1), (0.2, 1), (0.2, 1), (0.2, 2)]
        assert [p.sample for p in points[:4]] == [0, 1, 2, 0]
        assert points[0].scenario.game.b == pytest.approx(0.8)

    def test_seed_override(self):
        """Test an explicit seed changes the sampled states"""
        spec = self.spec(x0_samples={"count": 1, "seed": 1})
        default = expand_grid(spec)[0].scenario.x0
        assert expand_grid(spec, seed=1)[0].scenario.x0 == default
        assert expand_grid(spec, seed=2)[0].scenario.x0 != default

    def test_worker_count_independent(self):
        """Test rows are identical for one and two workers"""
        spec = self.spec(x0_samples={"count": 2, "seed": 4})
        serial = run_sweep(spec, workers=1)
        parallel = run_sweep(spec, workers=2)
        assert serial.rows == parallel.rows
        assert serial.columns[:3] == ["index", "game.a", "game.h"]

    def test_summary_means(self):
        """Test per-combination means over samples"""
        result = run_sweep(self.spec(x0_samples={"count": 2, "seed": 4}), workers=1)
        first = result.summary["combinations"][0]
        rows = [r for r in result.rows if r["index"] in (0, 1)]
        assert first["mean_final_z"] == pytest.approx(np.mean([r["final_z"] for r in rows]))
        assert first["values"] == {"game.a": 0.2, "game.h": 1}

    @pytest.mark.slow
    def test_cluster_counts_against_edges_and_recharge(self):
        """Test cluster counts at k = 50 over the strong-recharge ratio and the edge count"""
        ratios = [0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 7.0, 10.0]
        edge_counts = list(range(4, 11))
        spec = SweepSpec.model_validate({
            "base": five_agents(
                edge_count=4,
                weight=0.3,
                attacker={"kappa": 1.0, "rho": 1.0, "beta_normal": 0.9, "beta_strong": 1.0},
                defender={"kappa": 100.0, "rho": 100.0, "beta": 1.0},
                game={"a": 1.0, "b": 0.0, "h": 1, "T": 1},
                run={"K_max": 50, "eps_cluster": 0.05},
            ).model_dump(mode="json"),
            "axes": [
                {"parameter": "ratio", "values": ratios},
                {"parameter": "edge_count", "values": edge_counts},
            ],
        })
        result = run_sweep(spec, workers=2)
        assert all(row["error"] == "" for row in result.rows)
        counts = {(row["ratio"], row["edge_count"]): row["cluster_count"] for row in result.rows}
        connectivity = {e: edge_connectivity(max_connectivity_graph(5, e)) for e in edge_counts}

        for ratio in ratios:
            for e in edge_counts:
                if ratio >= e:
                    assert counts[(ratio, e)] == 5
                if ratio < connectivity[e]:
                    assert counts[(ratio, e)] == 1
            # K5 at ratio n - 1 keeps one agent cut off
            trend = [counts[(ratio, e)] for e in edge_counts if (ratio, e) != (4.0, 10)]
            assert all(fewer <= more for more, fewer in zip(trend, trend[1:]))
        assert counts[(4.0, 10)] == 2
