"""
Rolling-horizon simulation engine
Solves a game window every T steps, applies its first T steps and logs the trajectory
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .dynamics import as_state, consensus_step, state_difference
from .energy import EnergyLedger, action_cost, available, charge
from .game import ActionTriple, BackwardInductionSolver, GameConfig, GamePlan, stage_utility
from .graph import Partition, UnionFind, agent_group_index, apply_actions
from .models import DefenderParams, ScenarioConfig


logger = logging.getLogger(__name__)

# Fixed leading CSV columns; state columns x_0..x_{n-1} follow recovered_edges
TRAJECTORY_HEAD = ["k", "strong_edges", "normal_edges", "recovered_edges"]
TRAJECTORY_TAIL = [
    "z",
    "c_after",
    "attacker_available",
    "defender_available",
    "applied_utility_attacker",
    "applied_utility_defender",
    "game_index",
    "step_in_game",
    "attacker_spent",
    "defender_spent",
    "cum_strong",
    "cum_normal",
    "cum_recovered",
]


@dataclass(frozen=True)
class TrajectoryRecord:
    """
    One executed time step

    Availabilities are measured before the step's charges, spends are
    cumulative after them.
    """
    k: int
    game_index: int
    step_in_game: int
    action: ActionTriple
    x_next: Tuple[float, ...]
    z: float
    c_after: int
    attacker_available: float
    defender_available: float
    attacker_spent: float
    defender_spent: float
    applied_utility_attacker: float
    applied_utility_defender: float
    cum_strong: int
    cum_normal: int
    cum_recovered: int

    def to_row(self) -> Dict[str, Any]:
        strong, normal, recovered = self.action.tokens()
        row: Dict[str, Any] = {
            "k": self.k,
            "strong_edges": strong,
            "normal_edges": normal,
            "recovered_edges": recovered,
        }
        for i, value in enumerate(self.x_next):
            row[f"x_{i}"] = repr(float(value))
        row.update({
            "z": repr(self.z),
            "c_after": self.c_after,
            "attacker_available": repr(self.attacker_available),
            "defender_available": repr(self.defender_available),
            "applied_utility_attacker": repr(self.applied_utility_attacker),
            "applied_utility_defender": repr(self.applied_utility_defender),
            "game_index": self.game_index,
            "step_in_game": self.step_in_game,
            "attacker_spent": repr(self.attacker_spent),
            "defender_spent": repr(self.defender_spent),
            "cum_strong": self.cum_strong,
            "cum_normal": self.cum_normal,
            "cum_recovered": self.cum_recovered,
        })
        return row


def trajectory_columns(n: int) -> List[str]:
    return TRAJECTORY_HEAD + [f"x_{i}" for i in range(n)] + TRAJECTORY_TAIL


@dataclass
class SimulationResult:
    """Executed trajectory, solved window plans and the end-of-run verdicts"""
    scenario: ScenarioConfig
    records: List[TrajectoryRecord]
    plans: List[GamePlan]
    consensus: bool
    clusters: Partition
    x0: Tuple[float, ...] = ()
    audit: Optional[Any] = field(default=None, repr=False)

    @property
    def final_state(self) -> Tuple[float, ...]:
        return self.records[-1].x_next if self.records else self.x0

    @property
    def cumulative_utility_attacker(self) -> float:
        return math.fsum(r.applied_utility_attacker for r in self.records)

    @property
    def cumulative_utility_defender(self) -> float:
        return math.fsum(r.applied_utility_defender for r in self.records)

    @property
    def sum_c(self) -> int:
        return sum(r.c_after for r in self.records)

    def trajectory_rows(self) -> List[Dict[str, Any]]:
        return [r.to_row() for r in self.records]

    def summary(self) -> Dict[str, Any]:
        """JSON-ready summary of the run"""
        last = self.records[-1] if self.records else None
        payload: Dict[str, Any] = {
            "name": self.scenario.name,
            "steps": len(self.records),
            "consensus": self.consensus,
            "cluster_count": self.clusters.count,
            "clusters": self.clusters.as_lists(),
            "final_state": list(self.final_state),
            "final_z": last.z if last else state_difference(self.x0),
            "sum_c": self.sum_c,
            "cumulative_utility_attacker": self.cumulative_utility_attacker,
            "cumulative_utility_defender": self.cumulative_utility_defender,
            "cum_strong": last.cum_strong if last else 0,
            "cum_normal": last.cum_normal if last else 0,
            "cum_recovered": last.cum_recovered if last else 0,
            "plan_values": [p.value for p in self.plans],
            "plans": [p.to_dict() for p in self.plans],
        }
        if self.audit is not None:
            payload["audit"] = self.audit.model_dump()
        return payload


def detect_consensus(x: Sequence[float], eps: float) -> bool:
    """True when the spread of the states is at most eps"""
    if eps <= 0:
        raise ValueError("eps must be positive")
    state = np.asarray(x, dtype=np.float64)
    return bool(state.max() - state.min() <= eps)


def detect_clusters(x: Sequence[float], eps: float) -> Partition:
    """
    Group agents whose states are within eps, closed under chaining

    Args:
        x: Agent states
        eps: Pairwise distance threshold

    Returns:
        Partition of agents into clusters
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    state = [float(v) for v in x]
    uf = UnionFind(len(state))
    for i, j in itertools.combinations(range(len(state)), 2):
        if abs(state[i] - state[j]) <= eps:
            uf.union(i, j)
    return Partition(tuple(uf.blocks()))


def recovery_interval(dp: DefenderParams, edge_count: int, h: int, T: int) -> int:
    """
    Window length within which the defender recovers at least once or faces no normal attack

    Returns:
        ceil((h |E| beta - rho) / (rho T) + 1), at least 1
    """
    if edge_count < 1 or h < 1 or T < 1:
        raise ValueError("edge_count, h and T must be positive")
    value = (h * edge_count * dp.beta - dp.rho) / (dp.rho * T) + 1
    # absorb representation error such as 5.7 / 0.3 = 19.000000000000004
    return max(1, math.ceil(value - 1e-9))


class RollingHorizonEngine:
    """
    Executes the repeated attack/recovery game over time

    Features:
    - One exact solve per game window of h steps, every T steps
    - Only the first T steps of each plan are executed; the tail is logged and discarded
    - Energy ledgers charged per executed step
    - Applied utilities recorded per step for both players
    """

    def __init__(self, scenario: ScenarioConfig):
        """
        Initialize engine for a validated scenario

        Args:
            scenario: Scenario configuration

        Raises:
            EnumerationGuardError: If one window is too large to solve exactly
        """
        self.scenario = scenario
        self.graph = scenario.base_graph()
        self.weights = scenario.consensus_weights()
        self.config = GameConfig.from_scenario(scenario)
        self.solver = BackwardInductionSolver(
            self.graph, self.weights, scenario.attacker, scenario.defender, self.config
        )

    def run(self) -> SimulationResult:
        """
        Simulate K_max steps

        Returns:
            SimulationResult with one record per step
        """
        scenario = self.scenario
        ap, dp = scenario.attacker, scenario.defender
        cfg = self.config
        k_max = scenario.run.K_max

        x = as_state(scenario.x0)
        ledger_a = EnergyLedger()
        ledger_d = EnergyLedger()
        records: List[TrajectoryRecord] = []
        plans: List[GamePlan] = []
        cum_strong = cum_normal = cum_recovered = 0

        logger.info(
            f"Starting run '{scenario.name or 'scenario'}': n={self.graph.n}, |E|={self.graph.edge_count}, "
            f"h={cfg.h}, T={cfg.T}, K_max={k_max}, leaves per window={self.solver.leaves}"
        )

        k = 0
        while k < k_max:
            plan = self.solver.solve(x, ledger_a, ledger_d, k)
            plans.append(plan)
            executed = plan.steps[:min(cfg.T, k_max - k)]
            game_index = len(plans)
            logger.info(f"Window {game_index} at k={k}: value={plan.value:.6g}")
            for alpha, step in enumerate(plan.steps, start=1):
                status = "applied" if alpha <= len(executed) else "discarded"
                strong, normal, recovered = step.tokens()
                logger.debug(
                    f"  step {alpha} ({status}): strong=[{strong}] normal=[{normal}] recovered=[{recovered}]"
                )

            for alpha, act in enumerate(executed, start=1):
                avail_a = available(ledger_a, ap, k)
                avail_d = available(ledger_d, dp, k)
                cost_a, cost_d = action_cost(act, ap, dp)
                ledger_a = charge(ledger_a, cost_a, k, ap)
                ledger_d = charge(ledger_d, cost_d, k, dp)

                g_after = apply_actions(self.graph, act)
                x = consensus_step(x, g_after, self.weights)
                utility = stage_utility(x, g_after, cfg, self.graph)

                cum_strong += len(act.strong)
                cum_normal += len(act.normal)
                cum_recovered += len(act.recovered)

                record = TrajectoryRecord(
                    k=k,
                    game_index=game_index,
                    step_in_game=alpha,
                    action=act,
                    x_next=tuple(float(v) for v in x),
                    z=state_difference(x),
                    c_after=agent_group_index(g_after),
                    attacker_available=avail_a,
                    defender_available=avail_d,
                    attacker_spent=ledger_a.spent,
                    defender_spent=ledger_d.spent,
                    applied_utility_attacker=utility,
                    applied_utility_defender=-utility,
                    cum_strong=cum_strong,
                    cum_normal=cum_normal,
                    cum_recovered=cum_recovered,
                )
                records.append(record)
                logger.debug(f"k={k}: z={record.z:.6g}, c={record.c_after}, u={utility:.6g}")
                k += 1

        consensus = detect_consensus(x, scenario.run.eps_consensus)
        clusters = detect_clusters(x, scenario.run.eps_cluster)
        logger.info(
            f"Run finished after {len(records)} steps: consensus={consensus}, clusters={clusters.count}"
        )
        return SimulationResult(
            scenario=scenario,
            records=records,
            plans=plans,
            consensus=consensus,
            clusters=clusters,
            x0=tuple(float(v) for v in scenario.x0),
        )


def run(cfg: ScenarioConfig) -> SimulationResult:
    """Simulate a scenario and audit the resulting trajectory"""
    from .audit import audit_trajectory

    result = RollingHorizonEngine(cfg).run()
    result.audit = audit_trajectory(result)
    return result
