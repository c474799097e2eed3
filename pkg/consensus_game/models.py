"""
Pydantic models for scenario and sweep configuration
Field names mirror the model's symbols; JSON is the on-disk format
"""
import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, Field, ValidationError, model_validator

from .error_handler import ConfigValidationError, ErrorHandler


class LaplacianVariant(str, Enum):
    """Which Laplacian the state-difference term uses"""
    COMPLETE = "complete"
    BASE_GRAPH = "base_graph"


class GraphConfig(BaseModel):
    """Base communication graph"""
    n: int = Field(ge=1)
    edges: List[Tuple[int, int]]
    one_indexed: bool = False

    class Config:
        json_schema_extra = {
            "example": {
                "n": 4,
                "edges": [[0, 1], [1, 2], [2, 3]]
            }
        }


class EdgeWeight(BaseModel):
    """Consensus weight of one base edge"""
    edge: Tuple[int, int]
    weight: float = Field(gt=0.0, allow_inf_nan=False)


class WeightsConfig(BaseModel):
    """Consensus weights: a single uniform value or one value per edge"""
    uniform: Optional[float] = Field(None, gt=0.0, lt=1.0, allow_inf_nan=False)
    edges: Optional[List[EdgeWeight]] = None

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.uniform is None) == (self.edges is None):
            raise ValueError("give exactly one of 'uniform' or 'edges'")
        return self

    class Config:
        json_schema_extra = {
            "example": {"uniform": 0.3}
        }


class AttackerParams(BaseModel):
    """Attacker energy parameters: initial stock, recharge rate, per-edge costs"""
    kappa: float = Field(gt=0.0, allow_inf_nan=False)
    rho: float = Field(gt=0.0, allow_inf_nan=False)
    beta_normal: float = Field(gt=0.0, allow_inf_nan=False)
    beta_strong: float = Field(gt=0.0, allow_inf_nan=False)

    @model_validator(mode="after")
    def _check_invariants(self):
        if self.kappa < self.rho:
            raise ValueError(f"kappa ({self.kappa}) must be at least rho ({self.rho})")
        if self.beta_strong <= self.beta_normal:
            raise ValueError(
                f"beta_strong ({self.beta_strong}) must exceed beta_normal ({self.beta_normal})"
            )
        return self

    @property
    def strong_ratio(self) -> float:
        """Recharge rate over strong-attack cost"""
        return self.rho / self.beta_strong

    class Config:
        frozen = True
        json_schema_extra = {
            "example": {"kappa": 2.6, "rho": 2.6, "beta_normal": 1.0, "beta_strong": 2.0}
        }


class DefenderParams(BaseModel):
    """Defender energy parameters: initial stock, recharge rate, per-edge recovery cost"""
    kappa: float = Field(gt=0.0, allow_inf_nan=False)
    rho: float = Field(gt=0.0, allow_inf_nan=False)
    beta: float = Field(gt=0.0, allow_inf_nan=False)

    @model_validator(mode="after")
    def _check_invariants(self):
        if self.kappa < self.rho:
            raise ValueError(f"kappa ({self.kappa}) must be at least rho ({self.rho})")
        return self

    class Config:
        frozen = True
        json_schema_extra = {
            "example": {"kappa": 0.8, "rho": 0.3, "beta": 1.0}
        }


class GameSettings(BaseModel):
    """Utility weights, horizon length, game period and solver options"""
    a: float = Field(ge=0.0, allow_inf_nan=False)
    b: float = Field(ge=0.0, allow_inf_nan=False)
    h: int = Field(1, ge=1)
    T: int = Field(1, ge=1)
    utility_tolerance: float = Field(1e-9, gt=0.0)
    group_index: str = "agent_group"
    prune_attacks: bool = False
    max_tree_leaves: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def _check_period(self):
        if self.T > self.h:
            raise ValueError(f"game period T ({self.T}) must not exceed horizon h ({self.h})")
        return self


class RunSettings(BaseModel):
    """Run length and consensus/cluster thresholds"""
    K_max: int = Field(50, ge=1)
    eps_consensus: float = Field(1e-3, gt=0.0)
    eps_cluster: float = Field(1e-3, gt=0.0)


class X0Sampling(BaseModel):
    """Seeded random initial states, uniform on [-1, 1] per agent"""
    count: int = Field(ge=1)
    seed: int = 0


class ScenarioConfig(BaseModel):
    """Complete description of one simulation"""
    name: Optional[str] = None
    graph: GraphConfig
    x0: List[float]
    weights: WeightsConfig
    attacker: AttackerParams
    defender: DefenderParams
    game: GameSettings
    run: RunSettings = RunSettings()
    laplacian_variant: LaplacianVariant = LaplacianVariant.COMPLETE

    @model_validator(mode="before")
    @classmethod
    def _normalize_input(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)

        # utility_tolerance may be given under run; the solver owns it
        run = data.get("run")
        if isinstance(run, dict) and "utility_tolerance" in run:
            run = dict(run)
            tolerance = run.pop("utility_tolerance")
            game = dict(data.get("game") or {})
            game.setdefault("utility_tolerance", tolerance)
            data["run"] = run
            data["game"] = game

        # 1-indexed agent labels are translated here, once
        graph = data.get("graph")
        if isinstance(graph, dict) and graph.get("one_indexed"):
            graph = dict(graph)
            graph["edges"] = [_shift_edge(e) for e in graph.get("edges", [])]
            graph["one_indexed"] = False
            data["graph"] = graph
            weights = data.get("weights")
            if isinstance(weights, dict) and weights.get("edges"):
                weights = dict(weights)
                weights["edges"] = [
                    {**item, "edge": _shift_edge(item.get("edge", ()))}
                    if isinstance(item, dict) else item
                    for item in weights["edges"]
                ]
                data["weights"] = weights
        return data

    @model_validator(mode="after")
    def _check_semantics(self):
        # Imported here: validators builds domain objects from this model
        from .validators import scenario_errors

        errors = scenario_errors(self)
        if errors:
            raise ConfigValidationError(errors)
        return self

    def base_graph(self):
        """Base graph as a domain object"""
        from .graph import Graph

        return Graph(self.graph.n, tuple(tuple(e) for e in self.graph.edges))

    def consensus_weights(self):
        """Consensus weights as a domain object"""
        from .dynamics import ConsensusWeights

        graph = self.base_graph()
        if self.weights.uniform is not None:
            return ConsensusWeights.uniform(graph, self.weights.uniform)
        return ConsensusWeights.from_edge_weights(
            graph, {tuple(item.edge): item.weight for item in self.weights.edges}
        )

    def with_overrides(self, overrides: Dict[str, Any]) -> "ScenarioConfig":
        """
        Copy with dotted-path overrides applied and fully re-validated

        Args:
            overrides: Mapping such as {"game.a": 0.4, "attacker.rho": 2.0}

        Returns:
            New validated ScenarioConfig
        """
        data = self.model_dump(mode="json")
        for path, value in overrides.items():
            target = data
            parts = path.split(".")
            for part in parts[:-1]:
                target = target.setdefault(part, {})
            target[parts[-1]] = value
        return ScenarioConfig.model_validate(data)

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        """
        Parse and validate a JSON document

        Raises:
            ConfigValidationError: With field paths for every problem found
        """
        try:
            return cls.model_validate_json(text)
        except ValidationError as e:
            raise ErrorHandler.from_validation_error(e) from e

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ScenarioConfig":
        """Load a scenario from a JSON file"""
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)

    class Config:
        json_schema_extra = {
            "example": {
                "name": "path4",
                "graph": {"n": 4, "edges": [[0, 1], [1, 2], [2, 3]]},
                "x0": [1.0, 0.75, 0.75, -1.0],
                "weights": {"uniform": 0.3},
                "attacker": {"kappa": 2.6, "rho": 2.6, "beta_normal": 1.0, "beta_strong": 2.0},
                "defender": {"kappa": 0.8, "rho": 0.3, "beta": 1.0},
                "game": {"a": 0.9, "b": 0.1, "h": 2, "T": 1},
                "run": {"K_max": 50, "eps_consensus": 0.001, "eps_cluster": 0.001},
                "laplacian_variant": "complete"
            }
        }


def _shift_edge(edge: Any) -> Any:
    if isinstance(edge, (list, tuple)) and len(edge) == 2:
        return [edge[0] - 1, edge[1] - 1] if all(isinstance(v, int) for v in edge) else edge
    return edge


# Parameters with special meaning on a sweep axis
SPECIAL_SWEEP_PARAMETERS = {"ratio", "edge_count"}


class SweepAxis(BaseModel):
    """
    One swept parameter

    parameter is either a dotted config path ("game.a", "game.h",
    "attacker.rho", ...) or one of the special axes:
    - ratio: sets attacker kappa = rho = value * beta_strong
    - edge_count: rebuilds the graph as the most edge-connected graph with
      that many edges on the same agents
    """
    parameter: str
    values: List[float] = Field(min_length=1)
    b_complement: bool = False

    @model_validator(mode="after")
    def _check_axis(self):
        if self.parameter not in SPECIAL_SWEEP_PARAMETERS and "." not in self.parameter:
            raise ValueError(
                f"parameter '{self.parameter}' must be a dotted config path or one of "
                f"{sorted(SPECIAL_SWEEP_PARAMETERS)}"
            )
        if any(v != v or v in (float("inf"), float("-inf")) for v in self.values):
            raise ValueError("swept values must be finite")
        if self.b_complement and self.parameter != "game.a":
            raise ValueError("b_complement only applies to the 'game.a' axis")
        return self


class SweepSpec(BaseModel):
    """Base scenario plus up to two swept parameters and optional random initial states"""
    name: Optional[str] = None
    base: ScenarioConfig
    axes: List[SweepAxis] = Field(default_factory=list, max_length=2)
    x0_samples: Optional[X0Sampling] = None

    @model_validator(mode="after")
    def _check_grid(self):
        from .validators import sweep_errors

        errors = sweep_errors(self)
        if errors:
            raise ConfigValidationError(errors)
        return self

    @classmethod
    def from_json(cls, text: str) -> "SweepSpec":
        try:
            return cls.model_validate_json(text)
        except ValidationError as e:
            raise ErrorHandler.from_validation_error(e) from e

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "SweepSpec":
        """Load a sweep specification from a JSON file"""
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)

    class Config:
        json_schema_extra = {
            "example": {
                "base": ScenarioConfig.Config.json_schema_extra["example"],
                "axes": [{"parameter": "game.a", "values": [0.1, 0.5, 0.9], "b_complement": True}],
                "x0_samples": None
            }
        }


def dump_json(payload: Any) -> str:
    """Serialize a summary payload as stable, UTF-8 friendly JSON"""
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False)
