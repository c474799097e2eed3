"""
Test configuration and fixtures
"""
import copy

import pytest

from consensus_game.graph import Graph, path_graph
from consensus_game.models import ScenarioConfig
from consensus_game.settings import reset_settings


BASE_PAYLOAD = {
    "name": "test",
    "graph": {"n": 4, "edges": [[0, 1], [1, 2], [2, 3]]},
    "x0": [1.0, 0.75, 0.75, -1.0],
    "weights": {"uniform": 0.3},
    "attacker": {"kappa": 2.6, "rho": 2.6, "beta_normal": 1.0, "beta_strong": 2.0},
    "defender": {"kappa": 0.8, "rho": 0.3, "beta": 1.0},
    "game": {"a": 0.9, "b": 0.1, "h": 2, "T": 1},
    "run": {"K_max": 10},
}


def scenario_payload(**sections):
    """Base payload with whole sections replaced or updated"""
    payload = copy.deepcopy(BASE_PAYLOAD)
    for key, value in sections.items():
        if isinstance(value, dict) and isinstance(payload.get(key), dict) and key != "weights":
            payload[key].update(value)
        else:
            payload[key] = value
    return payload


@pytest.fixture
def make_scenario():
    """Factory for validated scenarios built from the 4-path base payload"""
    def _make(graph=None, **sections):
        if graph is not None:
            sections["graph"] = {"n": graph.n, "edges": [list(e) for e in graph.edges]}
        return ScenarioConfig.model_validate(scenario_payload(**sections))

    return _make


@pytest.fixture
def path4():
    return path_graph(4)


@pytest.fixture
def pendant_triangle():
    """Agent 0 hanging off the triangle 1-2-3"""
    return Graph(4, ((0, 1), (1, 2), (1, 3), (2, 3)))


@pytest.fixture(autouse=True)
def fresh_settings():
    """Re-read environment settings in every test"""
    reset_settings()
    yield
    reset_settings()
