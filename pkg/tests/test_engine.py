"""
Tests for the rolling-horizon engine
"""
from functools import lru_cache

import numpy as np
import pytest

from consensus_game.engine import (
    RollingHorizonEngine,
    detect_clusters,
    detect_consensus,
    recovery_interval,
    run,
    trajectory_columns,
)
from consensus_game.graph import Graph, complete_graph, path_graph
from consensus_game.models import DefenderParams
from consensus_game.scenarios import cycle_graph, get_scenario
from consensus_game.sweep import sample_initial_states
from tests.oracles import random_connected_graph


class TestDetection:
    """Tests for consensus and cluster detection"""

    def test_consensus(self):
        """Test the spread threshold"""
        assert detect_consensus([0.2, 0.2005, 0.1995], 1e-3)
        assert not detect_consensus([1.0, -1.0], 0.5)

    def test_clusters_chain(self):
        """Test clusters close under chaining"""
        clusters = detect_clusters([0.0, 0.0008, 0.0016, 1.0], 1e-3)
        assert clusters.as_lists() == [[0, 1, 2], [3]]

    def test_isolated_agents(self):
        """Test spaced states form singleton clusters"""
        assert detect_clusters([-1.0, 0.0, 1.0], 1e-3).count == 3

    def test_eps_must_be_positive(self):
        """Test a nonpositive threshold is rejected"""
        with pytest.raises(ValueError):
            detect_clusters([0.0, 1.0], 0.0)


class TestRecoveryInterval:
    """Tests for the recovery window length"""

    @pytest.mark.parametrize("h,edges,rho,expected", [
        (1, 1, 1.0, 1),
        (2, 3, 0.3, 20),
        (2, 3, 0.7, 9),
    ])
    def test_values(self, h, edges, rho, expected):
        """Test window lengths for several defenders"""
        dp = DefenderParams(kappa=max(rho, 1.0), rho=rho, beta=1.0)
        assert recovery_interval(dp, edges, h, 1) == expected

    def test_rejects_zero_edges(self):
        """Test edge_count must be positive"""
        with pytest.raises(ValueError):
            recovery_interval(DefenderParams(kappa=1.0, rho=1.0, beta=1.0), 0, 1, 1)


class TestEngine:
    """Tests for executed trajectories"""

    def test_record_per_step(self, make_scenario):
        """Test K_max records with consecutive k and a passing audit"""
        result = run(make_scenario(run={"K_max": 6}))
        assert [r.k for r in result.records] == list(range(6))
        assert result.audit.energy_ok
        assert result.audit.z_monotone
        assert result.audit.state_sum_conserved

    def test_weak_attacker_never_attacks(self, make_scenario):
        """Test an attacker that cannot pay for one attack leaves every edge alone"""
        scenario = make_scenario(
            attacker={"kappa": 0.1, "rho": 0.1, "beta_normal": 1.0, "beta_strong": 2.0},
            run={"K_max": 5},
        )
        result = run(scenario)
        assert all(r.action.is_empty() for r in result.records)
        assert result.records[-1].cum_strong == 0
        assert result.sum_c == 0

    def test_ample_defender_recovers_everything(self, make_scenario):
        """Test an index-only game with an ample defender recovers every normal attack"""
        scenario = make_scenario(
            defender={"kappa": 100.0, "rho": 100.0, "beta": 1.0},
            game={"a": 0.0, "b": 1.0, "h": 1, "T": 1},
            run={"K_max": 8},
        )
        result = run(scenario)
        for record in result.records:
            assert record.action.recovered == record.action.normal
        assert result.audit.recovery_window_ok

    def test_abundant_attacker_strikes_every_edge(self, make_scenario):
        """Test an attacker whose recharge covers every edge strongly cuts them all"""
        scenario = make_scenario(
            graph=path_graph(3),
            x0=[1.0, 0.5, -1.0],
            attacker={"kappa": 4.5, "rho": 4.5, "beta_normal": 1.0, "beta_strong": 2.0},
            run={"K_max": 6},
        )
        result = run(scenario)
        for record in result.records:
            assert record.action.strong == frozenset({(0, 1), (1, 2)})
        assert result.clusters.count == 3
        assert not result.consensus

    def test_sufficient_recharge_keeps_every_agent_apart(self, make_scenario):
        """Test rho / beta_strong >= |E| keeps all agents in separate clusters"""
        rng = np.random.default_rng(21)
        for _ in range(20):
            n = int(rng.integers(2, 6))
            g = random_connected_graph(rng, n, 6)
            energy = 2.0 * g.edge_count
            scenario = make_scenario(
                graph=g,
                x0=[float(v) for v in np.linspace(-1.0, 1.0, n)],
                weights={"uniform": 0.5 / (g.max_degree + 1)},
                attacker={"kappa": energy, "rho": energy, "beta_normal": 1.0, "beta_strong": 2.0},
                defender={"kappa": 1.0, "rho": 1.0, "beta": 1.0},
                game={"a": 0.5, "b": 0.5, "h": 1, "T": 1},
                run={"K_max": 4},
            )
            result = run(scenario)
            assert all(len(r.action.strong) == g.edge_count for r in result.records)
            assert result.clusters.count == n
            assert result.final_state == pytest.approx(tuple(scenario.x0))

    @pytest.mark.parametrize("graph", [
        cycle_graph(3),
        cycle_graph(4),
        Graph(4, ((0, 1), (0, 2), (0, 3), (1, 2), (2, 3))),
        complete_graph(4),
    ])
    @pytest.mark.parametrize("seed", [5, 6, 7, 8, 9])
    def test_weak_recharge_reaches_consensus(self, make_scenario, graph, seed):
        """Test rho / beta_strong well below the edge connectivity leads to consensus"""
        x0 = sample_initial_states(graph.n, 1, seed)[0]
        edges = graph.edge_count
        scenario = make_scenario(
            graph=graph,
            x0=[float(v) for v in x0],
            weights={"uniform": 0.2},
            attacker={"kappa": 0.2, "rho": 0.2, "beta_normal": 0.5, "beta_strong": 1.0},
            defender={"kappa": 2.0 * edges, "rho": 2.0 * edges, "beta": 1.0},
            game={"a": 1.0, "b": 0.0, "h": 1, "T": 1},
            run={"K_max": 100},
        )
        result = run(scenario)
        assert result.consensus
        assert result.clusters.count == 1
        assert result.audit.cluster_bound_ok

    @pytest.mark.parametrize("a,consensus", [(0.1, True), (0.4, True), (0.5, False), (0.9, False)])
    def test_utility_weight_decides_consensus(self, a, consensus):
        """Test the 4-path preset settles for a <= 0.4 and keeps agent 3 apart for a >= 0.5"""
        scenario = get_scenario("path4_weights").with_overrides({"game.a": a, "game.b": 1.0 - a})
        result = run(scenario)
        assert len(result.records) == 150
        assert result.consensus is consensus
        assert result.audit.energy_ok
        assert result.audit.z_monotone
        if not consensus:
            assert result.clusters.as_lists() == [[0, 1, 2], [3]]

    def test_index_weight_lowers_final_difference(self):
        """Test weighting the group index over the state difference ends with a smaller z"""
        scenario = get_scenario("path4_weights")
        z_state = run(scenario).summary()["final_z"]
        z_index = run(scenario.with_overrides({"game.a": 0.1, "game.b": 0.9})).summary()["final_z"]
        assert z_index < 1e-3 < z_state

    def test_deterministic(self, make_scenario):
        """Test two runs produce identical trajectory rows"""
        scenario = make_scenario(run={"K_max": 8})
        assert run(scenario).trajectory_rows() == run(scenario).trajectory_rows()

    def test_full_plan_applied_when_period_equals_horizon(self, make_scenario):
        """Test T = h executes each window plan unchanged"""
        scenario = make_scenario(game={"h": 2, "T": 2}, run={"K_max": 6})
        result = RollingHorizonEngine(scenario).run()
        assert len(result.plans) == 3
        executed = [r.action for r in result.records]
        planned = [step for plan in result.plans for step in plan.steps]
        assert executed == planned
        assert [r.game_index for r in result.records] == [1, 1, 2, 2, 3, 3]
        assert [r.step_in_game for r in result.records] == [1, 2, 1, 2, 1, 2]

    def test_tail_discarded_with_unit_period(self, make_scenario):
        """Test T = 1 solves one window per step and applies only its first step"""
        result = RollingHorizonEngine(make_scenario(game={"h": 2, "T": 1}, run={"K_max": 4})).run()
        assert len(result.plans) == 4
        assert [r.action for r in result.records] == [p.steps[0] for p in result.plans]
        assert [p.k_start for p in result.plans] == [0, 1, 2, 3]

    def test_truncated_last_window(self, make_scenario):
        """Test a window running past K_max only executes the remaining steps"""
        result = RollingHorizonEngine(make_scenario(game={"h": 2, "T": 2}, run={"K_max": 3})).run()
        assert len(result.records) == 3
        assert result.records[-1].step_in_game == 1

    def test_trajectory_rows(self, make_scenario):
        """Test rows carry every column and exact float text"""
        scenario = make_scenario(run={"K_max": 2})
        result = run(scenario)
        rows = result.trajectory_rows()
        assert list(rows[0].keys()) == trajectory_columns(4)
        assert float(rows[0]["z"]) == result.records[0].z

    def test_summary(self, make_scenario):
        """Test the JSON summary reports verdicts, plans and the audit"""
        result = run(make_scenario(run={"K_max": 3}))
        summary = result.summary()
        assert summary["steps"] == 3
        assert len(summary["plan_values"]) == 3
        assert summary["cumulative_utility_attacker"] == pytest.approx(-summary["cumulative_utility_defender"])
        assert "audit" in summary


@lru_cache(maxsize=None)
def horizon_runs(h, defender_kappa=None):
    """The 3-path horizon preset from 100 seeded initial states"""
    base = get_scenario("path3_horizon")
    results = []
    for x0 in sample_initial_states(3, 100, 0):
        overrides = {"x0": [float(v) for v in x0], "game.h": h}
        if defender_kappa is not None:
            overrides["defender.kappa"] = defender_kappa
        results.append(run(base.with_overrides(overrides)))
    return tuple(results)


@pytest.mark.slow
class TestHorizonLength:
    """Tests for the effect of the horizon length on the 3-path preset"""

    def test_two_step_horizon_attacks_strongly_only(self):
        """Test h = 2 opens with both edges cut strongly and never attacks normally"""
        for result in horizon_runs(2):
            assert len(result.records) == 20
            for record in result.records[:4]:
                assert record.action.strong == frozenset({(0, 1), (1, 2)})
            assert result.records[3].cum_strong == 8
            assert result.records[9].cum_normal == 0
            assert result.records[19].cum_normal == 0
            assert result.audit.energy_ok
            assert result.audit.z_monotone
            assert result.audit.state_sum_conserved

    def test_longer_horizon_never_lowers_utility(self):
        """Test h = 3 earns at least the h = 2 utility from every initial state"""
        two = [r.cumulative_utility_attacker for r in horizon_runs(2)]
        three = [r.cumulative_utility_attacker for r in horizon_runs(3)]
        for u2, u3 in zip(two, three):
            assert u3 >= u2 - 1e-9
        assert np.mean(three) > np.mean(two)
        assert any(r.records[19].cum_normal > 0 for r in horizon_runs(3))

    def test_single_step_horizon_falls_behind(self):
        """Test h = 1 earns less than h = 2 once the defender starts below one recovery"""
        one = horizon_runs(1, defender_kappa=0.5)
        two = horizon_runs(2, defender_kappa=0.5)
        for short, long in zip(one, two):
            assert short.cumulative_utility_attacker <= long.cumulative_utility_attacker + 1e-9
        assert np.mean([r.cumulative_utility_attacker for r in one]) < np.mean(
            [r.cumulative_utility_attacker for r in two]
        )
        assert all(r.records[19].cum_normal == 0 for r in one)
        assert any(r.records[19].cum_normal > 0 for r in two)
