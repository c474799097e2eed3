"""
Graph builders and named scenario presets
"""
import logging
from typing import Any, Callable, Dict, List

import networkx as nx

from .graph import Graph, complete_graph, path_graph
from .models import ScenarioConfig


logger = logging.getLogger(__name__)


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("A cycle needs at least 3 agents")
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def star_graph(n: int) -> Graph:
    """Agent 0 joined to every other agent"""
    return Graph(n, tuple((0, i) for i in range(1, n)))


def pendant_triangle_graph() -> Graph:
    """Agent 0 hanging off the triangle 1-2-3"""
    return Graph(4, ((0, 1), (1, 2), (1, 3), (2, 3)))


def max_connectivity_graph(n: int, edge_count: int) -> Graph:
    """
    Graph on n agents with edge_count edges and the largest possible edge connectivity

    Raises:
        ValueError: If edge_count is outside n-1 .. n(n-1)/2
    """
    if not n - 1 <= edge_count <= n * (n - 1) // 2:
        raise ValueError(f"edge_count must lie in {n - 1}..{n * (n - 1) // 2} for n={n}, got {edge_count}")
    return Graph.from_networkx(nx.hnm_harary_graph(n, edge_count))


def graph_payload(g: Graph) -> Dict[str, Any]:
    """Config section for a domain graph"""
    return {"n": g.n, "edges": [list(e) for e in g.edges]}


# Registry of preset builders
_scenario_registry: Dict[str, Callable[[], Dict[str, Any]]] = {}


def register_scenario(name: str, builder: Callable[[], Dict[str, Any]]):
    """Register a preset that builds a raw config payload"""
    _scenario_registry[name] = builder


def get_scenario(name: str) -> ScenarioConfig:
    """
    Build a validated preset by name

    Raises:
        KeyError: If no preset is registered under that name
    """
    try:
        builder = _scenario_registry[name]
    except KeyError:
        raise KeyError(
            f"Unknown scenario '{name}'. Available: {', '.join(get_available_scenarios())}"
        ) from None
    return ScenarioConfig.model_validate(builder())


def get_available_scenarios() -> List[str]:
    """Get list of registered preset names"""
    return sorted(_scenario_registry.keys())


def _weighted_path3() -> Dict[str, Any]:
    # path 0-1-2 where recovering nothing and attacking nothing can beat attacking everything
    return {
        "name": "weighted_path3",
        "graph": graph_payload(path_graph(3)),
        "x0": [10.0, 0.0, -5.0],
        "weights": {"edges": [{"edge": [0, 1], "weight": 0.1}, {"edge": [1, 2], "weight": 0.8}]},
        "attacker": {"kappa": 10.0, "rho": 10.0, "beta_normal": 1.0, "beta_strong": 2.0},
        "defender": {"kappa": 0.01, "rho": 0.01, "beta": 1.0},
        "game": {"a": 1.0, "b": 0.0, "h": 1, "T": 1},
        "run": {"K_max": 1},
        "laplacian_variant": "base_graph",
    }


def _path4_weights() -> Dict[str, Any]:
    # a <= 0.4 settles within K_max; a >= 0.5 keeps agent 3 cut off
    return {
        "name": "path4_weights",
        "graph": graph_payload(path_graph(4)),
        "x0": [1.0, 0.75, 0.75, -1.0],
        "weights": {"uniform": 0.33},
        "attacker": {"kappa": 2.6, "rho": 2.6, "beta_normal": 1.0, "beta_strong": 2.0},
        "defender": {"kappa": 0.8, "rho": 0.3, "beta": 1.0},
        "game": {"a": 0.9, "b": 0.1, "h": 2, "T": 1},
        "run": {"K_max": 150},
    }


def _gap_example() -> Dict[str, Any]:
    return {
        "name": "gap_example",
        "graph": graph_payload(pendant_triangle_graph()),
        "x0": [-5.0, 0.0, -20.0, 10.0],
        "weights": {"uniform": 0.2},
        "attacker": {"kappa": 1.4, "rho": 1.4, "beta_normal": 0.5, "beta_strong": 1.0},
        "defender": {"kappa": 50.0, "rho": 50.0, "beta": 1.0},
        "game": {"a": 1.0, "b": 0.0, "h": 2, "T": 1},
        "run": {"K_max": 20},
    }


def _path3_horizon() -> Dict[str, Any]:
    # defender recharges one recovery per ten steps
    return {
        "name": "path3_horizon",
        "graph": graph_payload(path_graph(3)),
        "x0": [0.6, -0.2, -0.9],
        "weights": {"uniform": 0.3},
        "attacker": {"kappa": 7.0, "rho": 1.1, "beta_normal": 0.5, "beta_strong": 1.0},
        "defender": {"kappa": 2.0, "rho": 0.1, "beta": 1.0},
        "game": {"a": 1.0, "b": 1.0, "h": 2, "T": 1},
        "run": {"K_max": 20},
    }


register_scenario("weighted_path3", _weighted_path3)
register_scenario("path4_weights", _path4_weights)
register_scenario("gap_example", _gap_example)
register_scenario("path3_horizon", _path3_horizon)
