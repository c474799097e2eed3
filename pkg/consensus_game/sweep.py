"""
Parameter sweeps
Expands a SweepSpec into grid points, simulates them in a process pool and aggregates per point
"""
import itertools
import logging
import multiprocessing
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .error_handler import ConsensusGameError, ErrorHandler
from .models import ScenarioConfig, SweepAxis, SweepSpec
from .scenarios import max_connectivity_graph
from .settings import get_settings


logger = logging.getLogger(__name__)

INTEGER_PARAMETERS = {"game.h", "game.T", "run.K_max", "game.max_tree_leaves"}

# Uniform weights on a regenerated graph stay below this share of 1/(max degree + 1)
EDGE_COUNT_WEIGHT_SHARE = 0.9

METRIC_COLUMNS = [
    "final_z",
    "sum_c",
    "cluster_count",
    "consensus",
    "cumulative_utility_attacker",
    "cumulative_utility_defender",
    "cum_strong",
    "cum_normal",
    "cum_recovered",
    "audit_ok",
]


def sample_initial_states(n: int, count: int, seed: int) -> np.ndarray:
    """
    Initial states uniform on [-1, 1], one row of n agents per sample

    Drawn with numpy's default_rng (PCG64) so sequences are reproducible from the seed.
    """
    rng = np.random.default_rng(seed)
    return rng.uniform(-1.0, 1.0, size=(count, n))


def _as_int(parameter: str, value: float) -> int:
    if float(value) != int(value):
        raise ValueError(f"{parameter} needs integer values, got {value}")
    return int(value)


def axis_overrides(base: ScenarioConfig, axis: SweepAxis, value: float) -> Dict[str, Any]:
    """
    Dotted-path overrides for one axis value

    Raises:
        ValueError: If the value does not fit the axis
    """
    if axis.parameter == "ratio":
        energy = value * base.attacker.beta_strong
        return {"attacker.kappa": energy, "attacker.rho": energy}

    if axis.parameter == "edge_count":
        graph = max_connectivity_graph(base.graph.n, _as_int("edge_count", value))
        overrides: Dict[str, Any] = {
            "graph.edges": [list(e) for e in graph.edges],
            "graph.one_indexed": False,
        }
        if base.weights.uniform is not None:
            limit = EDGE_COUNT_WEIGHT_SHARE / (graph.max_degree + 1)
            overrides["weights.uniform"] = min(base.weights.uniform, limit)
        return overrides

    if axis.parameter in INTEGER_PARAMETERS:
        overrides = {axis.parameter: _as_int(axis.parameter, value)}
    else:
        overrides = {axis.parameter: float(value)}
    if axis.b_complement:
        overrides["game.b"] = 1.0 - float(value)
    return overrides


def apply_grid_point(base: ScenarioConfig, point: Sequence[Tuple[SweepAxis, float]]) -> ScenarioConfig:
    """Scenario for one combination of axis values, fully re-validated"""
    overrides: Dict[str, Any] = {}
    for axis, value in point:
        overrides.update(axis_overrides(base, axis, value))
    return base.with_overrides(overrides)


def expand_axis_value(base: ScenarioConfig, axis: SweepAxis, value: float) -> ScenarioConfig:
    """Scenario with a single axis set to value"""
    return apply_grid_point(base, [(axis, value)])


@dataclass(frozen=True)
class GridPoint:
    """One simulation of a sweep"""
    index: int
    combo: int
    values: Tuple[float, ...]
    sample: Optional[int]
    scenario: ScenarioConfig


def expand_grid(spec: SweepSpec, seed: Optional[int] = None) -> List[GridPoint]:
    """
    Cartesian product of the axes times the initial-state samples

    Args:
        spec: Sweep specification
        seed: Overrides the sampling seed

    Returns:
        Grid points in index order, axis combinations outermost
    """
    samples = None
    if spec.x0_samples is not None:
        sampling_seed = spec.x0_samples.seed if seed is None else seed
        samples = sample_initial_states(spec.base.graph.n, spec.x0_samples.count, sampling_seed)
    elif seed is not None:
        logger.warning("--seed given but the sweep has no x0_samples; the seed is ignored")

    combos = list(itertools.product(*(axis.values for axis in spec.axes)))
    points = []
    for combo_pos, combo in enumerate(combos):
        scenario = apply_grid_point(spec.base, list(zip(spec.axes, combo)))
        if samples is None:
            points.append(GridPoint(len(points), combo_pos, tuple(combo), None, scenario))
            continue
        for sample_pos, x0 in enumerate(samples):
            points.append(GridPoint(
                len(points),
                combo_pos,
                tuple(combo),
                sample_pos,
                scenario.with_overrides({"x0": [float(v) for v in x0]}),
            ))
    return points


def _sweep_worker(args: Dict[str, Any]) -> Dict[str, Any]:
    """
    Module-level worker for the process pool

    Runs one grid point and returns a flat metrics row.
    """
    from .engine import run

    index = args["index"]
    try:
        scenario = ScenarioConfig.model_validate(args["scenario"])
        result = run(scenario)
        summary = result.summary()
        return {
            "index": index,
            "final_z": summary["final_z"],
            "sum_c": summary["sum_c"],
            "cluster_count": summary["cluster_count"],
            "consensus": summary["consensus"],
            "cumulative_utility_attacker": summary["cumulative_utility_attacker"],
            "cumulative_utility_defender": summary["cumulative_utility_defender"],
            "cum_strong": summary["cum_strong"],
            "cum_normal": summary["cum_normal"],
            "cum_recovered": summary["cum_recovered"],
            "audit_ok": result.audit.ok,
            "error": "",
        }
    except ConsensusGameError as e:
        detail = ErrorHandler.handle_exception(e)
        logger.error(f"Sweep point {index} failed: {detail.detail}")
        return {"index": index, "error": f"{detail.error}: {detail.detail}"}


@dataclass
class SweepResult:
    """Rows in grid order plus per-combination means"""
    columns: List[str]
    rows: List[Dict[str, Any]]
    summary: Dict[str, Any]


def _mean(values: List[float]) -> Optional[float]:
    return float(np.mean(values)) if values else None


def summarize(spec: SweepSpec, points: List[GridPoint], rows: List[Dict[str, Any]]) -> Dict[str, Any]:
    """Means over initial-state samples for every axis combination"""
    by_combo: Dict[int, List[Dict[str, Any]]] = {}
    for point, row in zip(points, rows):
        by_combo.setdefault(point.combo, []).append(row)

    combos = []
    for combo_pos, combo_rows in sorted(by_combo.items()):
        point = next(p for p in points if p.combo == combo_pos)
        ok = [r for r in combo_rows if not r.get("error")]
        entry: Dict[str, Any] = {
            "combo": combo_pos,
            "values": {axis.parameter: v for axis, v in zip(spec.axes, point.values)},
            "runs": len(combo_rows),
            "failed": len(combo_rows) - len(ok),
        }
        for column in METRIC_COLUMNS:
            if column == "audit_ok":
                continue
            entry[f"mean_{column}"] = _mean([float(r[column]) for r in ok])
        combos.append(entry)

    errors = [r for r in rows if r.get("error")]
    return {
        "name": spec.name,
        "points": len(rows),
        "combinations": combos,
        "errors": ErrorHandler.aggregate_sweep_errors([{"error": r["error"]} for r in errors]),
    }


def run_sweep(spec: SweepSpec, workers: Optional[int] = None, seed: Optional[int] = None) -> SweepResult:
    """
    Simulate every grid point of a sweep

    Args:
        spec: Sweep specification
        workers: Process count (default from settings); 1 runs in-process
        seed: Overrides the initial-state sampling seed

    Returns:
        SweepResult whose rows are ordered by grid index
    """
    points = expand_grid(spec, seed)
    workers = workers or get_settings().max_workers
    worker_args = [
        {"index": p.index, "scenario": p.scenario.model_dump(mode="json")} for p in points
    ]
    logger.info(f"Sweep '{spec.name or 'sweep'}': {len(points)} points, {workers} workers")

    raw: List[Dict[str, Any]] = []
    if workers == 1 or len(points) <= 1:
        for args in worker_args:
            raw.append(_sweep_worker(args))
    else:
        with multiprocessing.Pool(min(workers, len(points))) as pool:
            for i, row in enumerate(pool.imap_unordered(_sweep_worker, worker_args)):
                raw.append(row)
                if (i + 1) % 50 == 0:
                    logger.info(f"  [{i + 1}/{len(points)}] points done")

    # Sort by grid index for reproducibility
    raw.sort(key=lambda r: r["index"])

    axis_columns = [axis.parameter for axis in spec.axes]
    columns = ["index"] + axis_columns + ["sample"] + METRIC_COLUMNS + ["error"]
    rows = []
    for point, metrics in zip(points, raw):
        row: Dict[str, Any] = {"index": point.index, "sample": "" if point.sample is None else point.sample}
        row.update({name: value for name, value in zip(axis_columns, point.values)})
        for column in METRIC_COLUMNS + ["error"]:
            row[column] = metrics.get(column, "")
        rows.append(row)

    return SweepResult(columns=columns, rows=rows, summary=summarize(spec, points, rows))
