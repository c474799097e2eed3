"""
Validators for scenario and sweep configuration
Cross-field checks that need the domain model, reported with dotted field paths
"""
import math
from typing import TYPE_CHECKING, List

from .error_handler import ConsensusGameError, FieldError, GraphError, WeightError
from .indices import get_available_indices

if TYPE_CHECKING:
    from .models import ScenarioConfig, SweepSpec


# Upper end of the agent count the exhaustive solver is meant for
MAX_AGENTS = 12


def validate_graph_edges(n: int, edges: list) -> List[FieldError]:
    """
    Check edge pairs for range, self-loops and duplicates

    Args:
        n: Agent count
        edges: Edge pairs, 0-indexed

    Returns:
        One FieldError per offending edge
    """
    errors = []
    seen = {}
    for pos, (i, j) in enumerate(edges):
        path = f"graph.edges[{pos}]"
        if i == j:
            errors.append(FieldError(path=path, message=f"self-loop on agent {i}"))
            continue
        if not (0 <= i < n and 0 <= j < n):
            errors.append(FieldError(path=path, message=f"agent id outside 0..{n - 1}"))
            continue
        key = (min(i, j), max(i, j))
        if key in seen:
            errors.append(FieldError(path=path, message=f"duplicate of graph.edges[{seen[key]}]"))
        else:
            seen[key] = pos
    return errors


def validate_initial_state(n: int, x0: list) -> List[FieldError]:
    """Check that x0 has one finite entry per agent"""
    errors = []
    if len(x0) != n:
        errors.append(FieldError(path="x0", message=f"expected {n} entries, got {len(x0)}"))
    for pos, value in enumerate(x0):
        if not math.isfinite(value):
            errors.append(FieldError(path=f"x0[{pos}]", message="must be finite"))
    return errors


def scenario_errors(cfg: "ScenarioConfig") -> List[FieldError]:
    """
    Validate everything that spans more than one field of a scenario

    Args:
        cfg: Scenario whose individual fields already passed validation

    Returns:
        List of FieldError (empty when valid)
    """
    from .graph import is_connected

    errors = validate_graph_edges(cfg.graph.n, cfg.graph.edges)
    errors += validate_initial_state(cfg.graph.n, cfg.x0)

    if cfg.graph.n > MAX_AGENTS:
        errors.append(FieldError(
            path="graph.n", message=f"at most {MAX_AGENTS} agents are supported by the exact solver"
        ))

    if cfg.game.group_index not in get_available_indices():
        errors.append(FieldError(
            path="game.group_index",
            message=f"unknown index; available: {', '.join(get_available_indices())}"
        ))

    if errors:
        return errors

    try:
        graph = cfg.base_graph()
    except GraphError as e:
        return [FieldError(path="graph.edges", message=str(e))]

    if graph.n > 1 and not is_connected(graph):
        errors.append(FieldError(path="graph", message="base graph must be connected"))
    if graph.edge_count == 0 and graph.n > 1:
        errors.append(FieldError(path="graph.edges", message="base graph needs at least one edge"))

    if cfg.weights.edges is not None:
        for pos, item in enumerate(cfg.weights.edges):
            if not graph.has_edge(item.edge):
                errors.append(FieldError(
                    path=f"weights.edges[{pos}].edge", message=f"{tuple(item.edge)} is not a base edge"
                ))

    if not errors:
        try:
            cfg.consensus_weights()
        except WeightError as e:
            path = "weights.uniform" if cfg.weights.uniform is not None else "weights.edges"
            errors.append(FieldError(path=path, message=str(e)))
        except ConsensusGameError as e:
            errors.append(FieldError(path="weights", message=str(e)))

    return errors


def sweep_errors(spec: "SweepSpec") -> List[FieldError]:
    """
    Validate that every grid point of a sweep yields a valid scenario

    Args:
        spec: Sweep specification

    Returns:
        List of FieldError (empty when valid)
    """
    from .sweep import expand_axis_value

    errors = []
    names = [axis.parameter for axis in spec.axes]
    if len(set(names)) != len(names):
        errors.append(FieldError(path="axes", message="each parameter may be swept once"))

    for a_pos, axis in enumerate(spec.axes):
        for v_pos, value in enumerate(axis.values):
            try:
                expand_axis_value(spec.base, axis, value)
            except ConsensusGameError as e:
                errors.append(FieldError(path=f"axes[{a_pos}].values[{v_pos}]", message=str(e)))
            except (ValueError, TypeError, KeyError) as e:
                errors.append(FieldError(path=f"axes[{a_pos}].values[{v_pos}]", message=str(e)))
    return errors
