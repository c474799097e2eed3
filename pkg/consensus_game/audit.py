"""
Trajectory audits
Re-derives the run's invariants from the raw log; violations are reported, never raised
"""
import logging
import math
from typing import TYPE_CHECKING, List, Optional

from pydantic import BaseModel, Field

from .dynamics import state_difference
from .energy import ENERGY_EPS, action_cost, supply
from .graph import theta_vector

if TYPE_CHECKING:
    from .engine import SimulationResult


logger = logging.getLogger(__name__)

Z_RELATIVE_TOLERANCE = 1e-9
STATE_SUM_TOLERANCE = 1e-12
LEDGER_TOLERANCE = 1e-9


class AuditReport(BaseModel):
    """Outcome of every trajectory check"""
    energy_ok: bool
    z_monotone: bool
    state_sum_conserved: bool
    recovery_window_ok: bool
    recovery_window: int
    cluster_bound_ok: Optional[bool] = None
    violations: List[str] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def audit_energy(result: "SimulationResult") -> List[str]:
    """Cumulative spend of both players against kappa + rho k, recomputed from the actions"""
    ap, dp = result.scenario.attacker, result.scenario.defender
    problems = []
    spent_a: List[float] = []
    spent_d: List[float] = []
    for record in result.records:
        cost_a, cost_d = action_cost(record.action, ap, dp)
        spent_a.append(cost_a)
        spent_d.append(cost_d)
        total_a = math.fsum(spent_a)
        total_d = math.fsum(spent_d)
        if total_a > supply(ap, record.k) + ENERGY_EPS:
            problems.append(f"k={record.k}: attacker spent {total_a:.6g} > {supply(ap, record.k):.6g}")
        if total_d > supply(dp, record.k) + ENERGY_EPS:
            problems.append(f"k={record.k}: defender spent {total_d:.6g} > {supply(dp, record.k):.6g}")
        if abs(total_a - record.attacker_spent) > LEDGER_TOLERANCE:
            problems.append(f"k={record.k}: attacker ledger {record.attacker_spent!r} != log {total_a!r}")
        if abs(total_d - record.defender_spent) > LEDGER_TOLERANCE:
            problems.append(f"k={record.k}: defender ledger {record.defender_spent!r} != log {total_d!r}")
    return problems


def audit_state_difference(result: "SimulationResult") -> List[str]:
    """z must never grow along the trajectory"""
    problems = []
    previous = state_difference(result.x0)
    for record in result.records:
        if record.z > previous + Z_RELATIVE_TOLERANCE * max(1.0, previous):
            problems.append(f"k={record.k}: z rose from {previous:.12g} to {record.z:.12g}")
        previous = record.z
    return problems


def audit_state_sum(result: "SimulationResult") -> List[str]:
    """Symmetric updates keep the sum of the states fixed, step by step"""
    problems = []
    previous = list(result.x0)
    for record in result.records:
        scale = max(1.0, math.fsum(abs(v) for v in previous))
        drift = abs(math.fsum(record.x_next) - math.fsum(previous))
        if drift > STATE_SUM_TOLERANCE * scale:
            problems.append(f"k={record.k}: state sum drifted by {drift:.3g}")
        previous = list(record.x_next)
    return problems


def audit_recovery_windows(result: "SimulationResult", window: int) -> List[str]:
    """Every run of `window` steps has a recovery or a step without normal attacks"""
    quiet = [bool(r.action.recovered) or not r.action.normal for r in result.records]
    problems = []
    for start in range(0, len(quiet) - window + 1):
        if not any(quiet[start:start + window]):
            problems.append(
                f"k={start}..{start + window - 1}: normal attacks without any recovery"
            )
    return problems


def audit_cluster_bound(result: "SimulationResult") -> Optional[List[str]]:
    """Final cluster count against the Theta and topology-free bounds; None unless b = 0"""
    from .analysis import cluster_upper_bound, topology_free_bound

    scenario = result.scenario
    if scenario.game.b != 0:
        return None
    theta = theta_vector(scenario.base_graph())
    count = result.clusters.count
    problems = []
    theta_bound = cluster_upper_bound(theta, scenario.attacker)
    free_bound = topology_free_bound(scenario.attacker)
    if count > theta_bound:
        problems.append(f"{count} clusters exceed the Theta bound {theta_bound}")
    if count > free_bound:
        problems.append(f"{count} clusters exceed the topology-free bound {free_bound}")
    return problems


def audit_trajectory(result: "SimulationResult") -> AuditReport:
    """
    Run every trajectory check

    Args:
        result: Finished simulation

    Returns:
        AuditReport; violations are also logged as warnings
    """
    from .engine import recovery_interval

    scenario = result.scenario
    window = recovery_interval(
        scenario.defender,
        scenario.base_graph().edge_count,
        scenario.game.h,
        scenario.game.T,
    )

    energy = audit_energy(result)
    z = audit_state_difference(result)
    state_sum = audit_state_sum(result)
    windows = audit_recovery_windows(result, window)
    clusters = audit_cluster_bound(result)

    violations = energy + z + state_sum + windows + (clusters or [])
    for message in violations:
        logger.warning(f"Audit: {message}")

    return AuditReport(
        energy_ok=not energy,
        z_monotone=not z,
        state_sum_conserved=not state_sum,
        recovery_window_ok=not windows,
        recovery_window=window,
        cluster_bound_ok=None if clusters is None else not clusters,
        violations=violations,
    )
