"""
Closed-form consensus conditions and cluster bounds
Cheap checks on the energy parameters and the topology, reported next to simulation outcomes
"""
import logging
from typing import Optional

from pydantic import BaseModel

from .energy import recharge_covers, sustainable_count
from .engine import recovery_interval
from .graph import ThetaVector, edge_connectivity, theta_vector
from .models import AttackerParams, ScenarioConfig


logger = logging.getLogger(__name__)


def _strong_budget(ap: AttackerParams) -> int:
    """Edges the recharge alone can strongly attack every step"""
    return sustainable_count(ap.rho, ap.beta_strong)


def necessary_condition_general(ap: AttackerParams, lam: int) -> bool:
    """
    Necessary condition for the attacker to prevent consensus

    Args:
        ap: Attacker parameters
        lam: Edge connectivity of the base graph

    Returns:
        True if floor(rho / beta_normal) >= lambda
    """
    if lam < 1:
        raise ValueError("Edge connectivity must be at least 1")
    return sustainable_count(ap.rho, ap.beta_normal) >= lam


def necessary_condition_b0(ap: AttackerParams, lam: int) -> bool:
    """Necessary condition when the utility ignores the group index: rho / beta_strong >= lambda"""
    if lam < 1:
        raise ValueError("Edge connectivity must be at least 1")
    return recharge_covers(ap.rho, ap.beta_strong, lam)


def sufficient_condition_prevent(ap: AttackerParams, edge_count: int) -> bool:
    """Recharge covers a strong attack on every edge at every step"""
    if edge_count < 1:
        raise ValueError("edge_count must be at least 1")
    return recharge_covers(ap.rho, ap.beta_strong, edge_count)


def complete_graph_h1_sufficient(ap: AttackerParams, n: int) -> bool:
    """Sufficient condition on a complete graph with h = 1 and b = 0: rho / beta_strong >= n - 1"""
    return recharge_covers(ap.rho, ap.beta_strong, n - 1)


def cluster_upper_bound(theta: ThetaVector, ap: AttackerParams) -> int:
    """
    Most clusters a b = 0 attacker can sustain: Theta at floor(rho / beta_strong)

    The index clamps to |E|; an attacker that cannot sustain a single strong
    attack leaves one cluster.
    """
    return theta.theta(_strong_budget(ap))


def complete_graph_bound(n: int, ap: AttackerParams) -> int:
    """
    Cluster bound on the complete graph K_n

    1 + sum_{j=1}^{n-1} min(1, floor(2 rho / (j beta_strong (2n - j - 1))))
    """
    if n < 2:
        raise ValueError("complete_graph_bound needs n >= 2")
    total = 1
    for j in range(1, n):
        # isolating j agents of K_n removes j (2n - j - 1) / 2 edges
        fires = sustainable_count(2 * ap.rho, j * ap.beta_strong * (2 * n - j - 1))
        total += min(1, fires)
    return total


def topology_free_bound(ap: AttackerParams) -> int:
    return _strong_budget(ap) + 1


class ConditionReport(BaseModel):
    """All closed-form checks for one scenario"""
    edge_connectivity: int
    edge_count: int
    theta: list
    necessary_general: bool
    necessary_b0: bool
    sufficient_all_edges: bool
    complete_graph_h1_sufficient: Optional[bool] = None
    cluster_bound_theta: int
    cluster_bound_topology_free: int
    complete_graph_bound: Optional[int] = None
    recovery_interval: int

    class Config:
        json_schema_extra = {
            "example": {
                "edge_connectivity": 1,
                "edge_count": 3,
                "theta": [2, 3, 4],
                "necessary_general": True,
                "necessary_b0": True,
                "sufficient_all_edges": False,
                "complete_graph_h1_sufficient": None,
                "cluster_bound_theta": 2,
                "cluster_bound_topology_free": 2,
                "complete_graph_bound": None,
                "recovery_interval": 20
            }
        }


def build_report(cfg: ScenarioConfig) -> ConditionReport:
    """
    Evaluate every condition and bound for a scenario

    Complete-graph fields are None unless the base graph is complete.

    Raises:
        GraphError: If the base graph has fewer than two agents
        EnumerationGuardError: If the Theta enumeration is too large
    """
    graph = cfg.base_graph()
    ap = cfg.attacker
    lam = edge_connectivity(graph)
    theta = theta_vector(graph)
    complete = graph.is_complete()

    report = ConditionReport(
        edge_connectivity=lam,
        edge_count=graph.edge_count,
        theta=list(theta.values),
        necessary_general=necessary_condition_general(ap, lam),
        necessary_b0=necessary_condition_b0(ap, lam),
        sufficient_all_edges=sufficient_condition_prevent(ap, graph.edge_count),
        complete_graph_h1_sufficient=complete_graph_h1_sufficient(ap, graph.n) if complete else None,
        cluster_bound_theta=cluster_upper_bound(theta, ap),
        cluster_bound_topology_free=topology_free_bound(ap),
        complete_graph_bound=complete_graph_bound(graph.n, ap) if complete else None,
        recovery_interval=recovery_interval(cfg.defender, graph.edge_count, cfg.game.h, cfg.game.T),
    )
    logger.info(
        f"Conditions for '{cfg.name or 'scenario'}': lambda={lam}, "
        f"necessary={report.necessary_general}, sufficient={report.sufficient_all_edges}"
    )
    return report
