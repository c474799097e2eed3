"""
Attack/recovery game over one horizon window
Action enumeration, stage utility, the energy-saving tie-break, exact backward
induction, and the combined-strategy case classifiers
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from .dynamics import BatchedDynamics, ConsensusWeights, StateVector, as_state, consensus_step
from .dynamics import state_difference, state_difference_graph_laplacian
from .energy import (
    ENERGY_EPS,
    EnergyLedger,
    action_cost,
    available,
    recharge_covers,
    sustainable_count,
)
from .error_handler import (
    ClassifierDomainError,
    EnumerationGuardError,
    InvalidActionError,
    UnclassifiedStepError,
)
from .graph import Edge, Graph, agent_group_index, apply_actions, group_index, group_table
from .graph import normalize_edge
from .indices import DEFAULT_INDEX
from .models import AttackerParams, DefenderParams, LaplacianVariant, ScenarioConfig
from .settings import DEFAULT_MAX_TREE_LEAVES, get_settings


logger = logging.getLogger(__name__)
DEFAULT_UTILITY_TOLERANCE = 1e-9


def _format_edges(edges: Iterable[Edge]) -> str:
    return ";".join(f"{i}-{j}" for i, j in sorted(edges))


@dataclass(frozen=True)
class ActionTriple:
    """One step's decisions: strongly attacked, normally attacked and recovered edges"""
    strong: FrozenSet[Edge] = frozenset()
    normal: FrozenSet[Edge] = frozenset()
    recovered: FrozenSet[Edge] = frozenset()

    def __post_init__(self):
        for name in ("strong", "normal", "recovered"):
            object.__setattr__(
                self, name, frozenset(normalize_edge(e) for e in getattr(self, name))
            )
        overlap = self.strong & self.normal
        if overlap:
            raise InvalidActionError(f"Edges {sorted(overlap)} are attacked both strongly and normally")
        if not self.recovered <= self.normal:
            stray = sorted(self.recovered - self.normal)
            raise InvalidActionError(f"Recovered edges {stray} were not normally attacked")

    @classmethod
    def none(cls) -> "ActionTriple":
        return cls()

    @classmethod
    def from_masks(cls, graph: Graph, strong: int, normal: int, recovered: int) -> "ActionTriple":
        return cls(
            frozenset(graph.edges_of(int(strong))),
            frozenset(graph.edges_of(int(normal))),
            frozenset(graph.edges_of(int(recovered))),
        )

    def attacker_encoding(self) -> Tuple[Tuple[Edge, ...], Tuple[Edge, ...]]:
        return tuple(sorted(self.strong)), tuple(sorted(self.normal))

    def encoding(self) -> Tuple[Tuple[Edge, ...], Tuple[Edge, ...], Tuple[Edge, ...]]:
        """Canonical form: three sorted edge tuples"""
        return tuple(sorted(self.strong)), tuple(sorted(self.normal)), tuple(sorted(self.recovered))

    def tokens(self) -> Tuple[str, str, str]:
        """Semicolon-joined "i-j" tokens for strong, normal and recovered edges"""
        return _format_edges(self.strong), _format_edges(self.normal), _format_edges(self.recovered)

    def is_empty(self) -> bool:
        return not (self.strong or self.normal)

    def to_dict(self) -> Dict[str, List[List[int]]]:
        strong, normal, recovered = self.encoding()
        return {
            "strong": [list(e) for e in strong],
            "normal": [list(e) for e in normal],
            "recovered": [list(e) for e in recovered],
        }


@dataclass(frozen=True)
class GameConfig:
    """Utility weights, horizon, game period and solver options for one scenario"""
    a: float
    b: float
    h: int
    T: int
    utility_tolerance: float = DEFAULT_UTILITY_TOLERANCE
    laplacian_variant: LaplacianVariant = LaplacianVariant.COMPLETE
    group_index: str = DEFAULT_INDEX
    prune_attacks: bool = False
    max_tree_leaves: int = DEFAULT_MAX_TREE_LEAVES

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ValueError("Utility weights a and b must be nonnegative")
        if self.h < 1:
            raise ValueError("Horizon length h must be at least 1")
        if not 1 <= self.T <= self.h:
            raise ValueError(f"Game period T must satisfy 1 <= T <= h, got T={self.T}, h={self.h}")
        if self.utility_tolerance <= 0:
            raise ValueError("utility_tolerance must be positive")

    @classmethod
    def from_scenario(cls, cfg: ScenarioConfig) -> "GameConfig":
        game = cfg.game
        return cls(
            a=game.a,
            b=game.b,
            h=game.h,
            T=game.T,
            utility_tolerance=game.utility_tolerance,
            laplacian_variant=LaplacianVariant(cfg.laplacian_variant),
            group_index=game.group_index,
            prune_attacks=game.prune_attacks,
            max_tree_leaves=game.max_tree_leaves or get_settings().max_tree_leaves,
        )


class CombinedStrategyCase(int, Enum):
    """How attack and recovery change the group index in one step"""
    CASE_1 = 1  # no change
    CASE_2 = 2  # attack lowers the index, recovery restores nothing
    CASE_3 = 3  # attack lowers the index, recovery raises it again


class Player(str, Enum):
    ATTACKER = "attacker"
    DEFENDER = "defender"


@dataclass(frozen=True)
class Candidate:
    """An action under consideration together with its cost and utility"""
    action: Any
    cost: float
    encoding: Any
    utility: float = 0.0


@dataclass(frozen=True)
class GamePlan:
    """Equilibrium path of one window: h action triples and the attacker's window utility"""
    k_start: int
    steps: Tuple[ActionTriple, ...]
    value: float
    stage_values: Tuple[float, ...] = ()
    states: Tuple[Tuple[float, ...], ...] = ()
    nodes_evaluated: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k_start": self.k_start,
            "value": self.value,
            "stage_values": list(self.stage_values),
            "steps": [step.to_dict() for step in self.steps],
        }


def stage_utility(
    x_next: Sequence[float],
    g_after: Graph,
    cfg: GameConfig,
    base: Optional[Graph] = None
) -> float:
    """
    Attacker's per-step utility a*z - b*c(g_after); the defender's is its negation

    Args:
        x_next: States after the step
        g_after: Effective graph of the step
        cfg: Game configuration
        base: Base graph, required for the base-graph Laplacian variant
    """
    if cfg.laplacian_variant == LaplacianVariant.BASE_GRAPH:
        if base is None:
            raise ValueError("The base-graph state difference needs the base graph")
        z = state_difference_graph_laplacian(x_next, base)
    else:
        z = state_difference(x_next)
    return cfg.a * z - cfg.b * group_index(g_after, cfg.group_index)


def enumerate_attacker_actions(
    g: Graph,
    budget: float,
    ap: AttackerParams
) -> List[Tuple[Tuple[Edge, ...], Tuple[Edge, ...]]]:
    """
    Affordable (strong, normal) assignments in canonical order

    Each edge is left alone, attacked normally or attacked strongly; actions
    costing more than budget are dropped.
    """
    actions = []
    for choice in itertools.product((0, 1, 2), repeat=g.edge_count):
        strong = tuple(e for e, c in zip(g.edges, choice) if c == 2)
        normal = tuple(e for e, c in zip(g.edges, choice) if c == 1)
        cost = ap.beta_strong * len(strong) + ap.beta_normal * len(normal)
        if cost <= budget + ENERGY_EPS:
            actions.append((strong, normal))
    return sorted(actions)


def enumerate_defender_actions(
    normal_attacked: Iterable[Edge],
    budget: float,
    dp: DefenderParams
) -> List[Tuple[Edge, ...]]:
    """Affordable subsets of the normally attacked edges in canonical order"""
    attacked = sorted(normalize_edge(e) for e in normal_attacked)
    subsets = []
    for size in range(len(attacked) + 1):
        if dp.beta * size > budget + ENERGY_EPS:
            break
        subsets.extend(itertools.combinations(attacked, size))
    return sorted(subsets)


def attacker_abundant(avail: float, ap: AttackerParams, edge_count: int, remaining_steps: int) -> bool:
    """Whether the attacker can strongly attack every edge at every remaining step"""
    if recharge_covers(ap.rho, ap.beta_strong, edge_count):
        return True
    return avail >= remaining_steps * ap.beta_strong * edge_count - ENERGY_EPS


def defender_abundant(avail: float, dp: DefenderParams, edge_count: int, remaining_steps: int) -> bool:
    """Whether the defender can recover every edge at every remaining step"""
    return avail >= remaining_steps * edge_count * dp.beta - ENERGY_EPS


def select_candidates(
    options: Sequence[Candidate],
    player: Player,
    tolerance: float = DEFAULT_UTILITY_TOLERANCE
) -> List[Candidate]:
    """
    Options whose attacker utility is within tolerance of the player's optimum

    The attacker maximizes the attacker utility and the defender minimizes it.
    """
    if not options:
        raise ValueError("No options to choose from")
    if player == Player.ATTACKER:
        best = max(o.utility for o in options)
        return [o for o in options if o.utility >= best - tolerance]
    best = min(o.utility for o in options)
    return [o for o in options if o.utility <= best + tolerance]


def tie_break(candidates: Sequence[Candidate], player: Player, abundant_energy: bool) -> Candidate:
    """
    Pick one of several equally good actions

    A player that can afford its most expensive action for the rest of the
    window takes the most expensive candidate; otherwise it saves energy with
    the cheapest. Remaining ties go to the smallest canonical encoding.
    """
    if not candidates:
        raise ValueError(f"tie_break needs at least one {player.value} candidate")
    if abundant_energy:
        return min(candidates, key=lambda c: (-c.cost, c.encoding))
    return min(candidates, key=lambda c: (c.cost, c.encoding))


@dataclass(frozen=True, eq=False)
class OutcomeTable:
    """
    Every joint per-step outcome for m edges

    Outcome code r assigns each edge a base-4 digit: 0 intact, 1 strongly
    attacked, 2 normally attacked and not recovered, 3 normally attacked and
    recovered. Normal masks include recovered edges.
    """
    m: int
    strong: NDArray[np.int64]
    normal: NDArray[np.int64]
    recovered: NDArray[np.int64]
    effective: NDArray[np.int64]
    attacker_id: NDArray[np.int64]
    n_strong: NDArray[np.int64]
    n_normal: NDArray[np.int64]
    n_recovered: NDArray[np.int64]
    lex_rank: NDArray[np.int64]


@lru_cache(maxsize=16)
def outcome_table(m: int) -> OutcomeTable:
    codes = np.arange(4 ** m, dtype=np.int64)
    strong = np.zeros_like(codes)
    normal = np.zeros_like(codes)
    recovered = np.zeros_like(codes)
    attacker_id = np.zeros_like(codes)
    for e in range(m):
        digit = (codes >> (2 * e)) & 3
        strong |= (digit == 1).astype(np.int64) << e
        normal |= (digit >= 2).astype(np.int64) << e
        recovered |= (digit == 3).astype(np.int64) << e
        # attacker's view of the edge: 0 none, 1 strong, 2 normal
        attacker_id += np.minimum(digit, 2) * 3 ** e
    full = (1 << m) - 1
    effective = full & ~strong & ~(normal & ~recovered)

    # rank of each mask's sorted edge-index tuple in lexicographic order
    order = sorted(range(1 << m), key=lambda mask: tuple(e for e in range(m) if mask >> e & 1))
    lex_rank = np.empty(1 << m, dtype=np.int64)
    lex_rank[np.array(order, dtype=np.int64)] = np.arange(1 << m, dtype=np.int64)

    def bits(masks):
        counts = np.zeros_like(masks)
        for e in range(m):
            counts += (masks >> e) & 1
        return counts

    table = OutcomeTable(
        m=m,
        strong=strong,
        normal=normal,
        recovered=recovered,
        effective=effective,
        attacker_id=attacker_id,
        n_strong=bits(strong),
        n_normal=bits(normal),
        n_recovered=bits(recovered),
        lex_rank=lex_rank,
    )
    for array in (strong, normal, recovered, effective, attacker_id, lex_rank):
        array.setflags(write=False)
    return table


def _pick_per_group(
    group: NDArray[np.int64],
    score: NDArray[np.float64],
    cost: NDArray[np.float64],
    lex_keys: Sequence[NDArray[np.int64]],
    tolerance: float,
    maximize_cost: bool
) -> NDArray[np.int64]:
    """
    For every group, the position of the selected entry

    Entries within tolerance of their group's lowest score are candidates;
    the tie-break then orders them by cost (descending when maximize_cost)
    and by the lexicographic keys. Groups come back in ascending id order.
    """
    _, inverse = np.unique(group, return_inverse=True)
    best = np.full(inverse.max() + 1, np.inf)
    np.minimum.at(best, inverse, score)
    candidates = np.flatnonzero(score <= best[inverse] + tolerance)

    cost_key = -cost[candidates] if maximize_cost else cost[candidates]
    keys = [k[candidates] for k in reversed(lex_keys)] + [cost_key, inverse[candidates]]
    order = np.lexsort(keys)
    ordered_groups = inverse[candidates][order]
    first = np.ones(len(order), dtype=bool)
    first[1:] = ordered_groups[1:] != ordered_groups[:-1]
    return candidates[order][first]


@dataclass(frozen=True)
class _Node:
    value: float
    path: Tuple[int, ...]


class BackwardInductionSolver:
    """
    Exact subgame-perfect equilibrium of an h-step attack/recovery window

    Features:
    - Vectorized enumeration of all 4^m joint step outcomes
    - Defender best response per attacker action, attacker best action on top
    - Energy-saving tie-break at both levels
    - Memoization on (stage, effective-graph history, cumulative counts)
    - Optional pruning of attacks that leave the group structure unchanged
    """

    def __init__(
        self,
        graph: Graph,
        weights: ConsensusWeights,
        attacker: AttackerParams,
        defender: DefenderParams,
        config: GameConfig
    ):
        """
        Initialize the solver for one scenario

        Args:
            graph: Base graph
            weights: Consensus weights on the base graph
            attacker: Attacker energy parameters
            defender: Defender energy parameters
            config: Game configuration

        Raises:
            EnumerationGuardError: If 4^(|E| h) exceeds config.max_tree_leaves
        """
        self.graph = graph
        self.attacker = attacker
        self.defender = defender
        self.config = config
        self.m = graph.edge_count

        leaves = 4 ** (self.m * config.h)
        if leaves > config.max_tree_leaves:
            raise EnumerationGuardError(
                f"Game tree has 4^({self.m}*{config.h}) = {leaves} leaves; "
                f"the limit is {config.max_tree_leaves}"
            )
        self.leaves = leaves

        self.table = outcome_table(self.m)
        self.dynamics = BatchedDynamics(graph, weights)
        self.weights = weights
        self._index_values = group_table(graph, config.group_index).index_values

        t = self.table
        self._cost_a = (
            attacker.beta_strong * t.n_strong.astype(np.float64)
            + attacker.beta_normal * t.n_normal.astype(np.float64)
        )
        self._cost_d = defender.beta * t.n_recovered.astype(np.float64)

        self._prune: Optional[NDArray[np.bool_]] = None
        if config.prune_attacks:
            removed = t.strong | t.normal
            full = graph.full_mask
            lowered = self._index_values[full & ~removed] < self._index_values[full] - config.utility_tolerance
            self._prune = (removed == 0) | lowered

    def _stage_rows(self, states: NDArray[np.float64]) -> NDArray[np.float64]:
        if self.config.laplacian_variant == LaplacianVariant.BASE_GRAPH:
            z = self.dynamics.graph_laplacian_rows(states)
        else:
            z = BatchedDynamics.state_difference_rows(states)
        return self.config.a * z - self.config.b * self._index_values

    def solve(
        self,
        x: Sequence[float],
        attacker_ledger: EnergyLedger,
        defender_ledger: EnergyLedger,
        k_start: int
    ) -> GamePlan:
        """
        Solve the window starting at k_start from state x

        Args:
            x: Agent states at k_start
            attacker_ledger: Attacker spend before k_start
            defender_ledger: Defender spend before k_start
            k_start: First time step of the window

        Returns:
            GamePlan with the h equilibrium steps and the window value
        """
        state = as_state(x)
        h = self.config.h
        self._base_a = [available(attacker_ledger, self.attacker, k_start + t) for t in range(h)]
        self._base_d = [available(defender_ledger, self.defender, k_start + t) for t in range(h)]
        self._memo: Dict[Tuple, _Node] = {}

        root = self._evaluate(0, (), state, (0, 0, 0))
        steps = tuple(
            ActionTriple.from_masks(
                self.graph,
                self.table.strong[code],
                self.table.normal[code],
                self.table.recovered[code],
            )
            for code in root.path
        )

        # replay the path for predicted states and per-step utilities
        stage_values = []
        states = []
        current = state
        for act in steps:
            g_after = apply_actions(self.graph, act)
            current = consensus_step(current, g_after, self.weights)
            stage_values.append(stage_utility(current, g_after, self.config, self.graph))
            states.append(tuple(float(v) for v in current))

        plan = GamePlan(
            k_start=k_start,
            steps=steps,
            value=float(root.value),
            stage_values=tuple(stage_values),
            states=tuple(states),
            nodes_evaluated=len(self._memo),
        )
        logger.debug(
            f"Solved window at k={k_start}: value={plan.value:.6g}, nodes={plan.nodes_evaluated}"
        )
        return plan

    def _evaluate(self, t: int, history: Tuple[int, ...], x: StateVector, cum: Tuple[int, int, int]) -> _Node:
        key = (t, history, cum)
        cached = self._memo.get(key)
        if cached is not None:
            return cached

        table = self.table
        cfg = self.config
        ap, dp = self.attacker, self.defender
        cum_s, cum_n, cum_r = cum
        avail_a = self._base_a[t] - (ap.beta_strong * cum_s + ap.beta_normal * cum_n)
        avail_d = self._base_d[t] - dp.beta * cum_r

        feasible_a = self._cost_a <= avail_a + ENERGY_EPS
        if self._prune is not None:
            feasible_a &= self._prune
        rows = np.flatnonzero(feasible_a)
        feasible_d = self._cost_d[rows] <= avail_d + ENERGY_EPS
        live = rows[feasible_d]

        states = self.dynamics.step_all(x)
        stage = self._stage_rows(states)
        eff = table.effective[live]
        live_values = stage[eff]

        children: Dict[int, _Node] = {}
        child_keys = None
        base = self.m + 1
        if t < cfg.h - 1:
            child_keys = (
                (eff * base + table.n_strong[live]) * base + table.n_normal[live]
            ) * base + table.n_recovered[live]
            unique_keys, inverse = np.unique(child_keys, return_inverse=True)
            child_values = np.empty(len(unique_keys), dtype=np.float64)
            for pos, child_key in enumerate(unique_keys.tolist()):
                n_r = child_key % base
                n_n = (child_key // base) % base
                n_s = (child_key // base ** 2) % base
                mask = child_key // base ** 3
                child = self._evaluate(
                    t + 1,
                    history + (mask,),
                    states[mask],
                    (cum_s + n_s, cum_n + n_n, cum_r + n_r),
                )
                children[child_key] = child
                child_values[pos] = child.value
            live_values = live_values + child_values[inverse]

        values = np.full(len(rows), np.inf)
        values[feasible_d] = live_values

        remaining = cfg.h - t
        lex = table.lex_rank

        # defender's reply to every affordable attacker action
        replies = _pick_per_group(
            table.attacker_id[rows],
            values,
            self._cost_d[rows],
            (lex[table.recovered[rows]],),
            cfg.utility_tolerance,
            defender_abundant(avail_d, dp, self.m, remaining),
        )
        reply_rows = rows[replies]
        reply_values = values[replies]

        # attacker's choice among those replies
        pick = _pick_per_group(
            np.zeros(len(reply_rows), dtype=np.int64),
            -reply_values,
            self._cost_a[reply_rows],
            (lex[table.strong[reply_rows]], lex[table.normal[reply_rows]]),
            cfg.utility_tolerance,
            attacker_abundant(avail_a, ap, self.m, remaining),
        )[0]

        code = int(reply_rows[pick])
        path: Tuple[int, ...] = (code,)
        if child_keys is not None:
            chosen_key = (
                (int(table.effective[code]) * base + int(table.n_strong[code])) * base
                + int(table.n_normal[code])
            ) * base + int(table.n_recovered[code])
            path += children[chosen_key].path

        node = _Node(value=float(reply_values[pick]), path=path)
        self._memo[key] = node
        return node


def solve_game(
    x: Sequence[float],
    ledgers: Tuple[EnergyLedger, EnergyLedger],
    k_start: int,
    cfg: GameConfig,
    g: Graph,
    w: ConsensusWeights,
    attacker: AttackerParams,
    defender: DefenderParams
) -> GamePlan:
    """
    Subgame-perfect equilibrium path of the window starting at k_start

    Args:
        x: Agent states at k_start
        ledgers: (attacker ledger, defender ledger)
        k_start: First step of the window
        cfg: Game configuration
        g: Base graph
        w: Consensus weights
        attacker: Attacker energy parameters
        defender: Defender energy parameters

    Raises:
        EnumerationGuardError: If the game tree is larger than cfg.max_tree_leaves
    """
    solver = BackwardInductionSolver(g, w, attacker, defender, cfg)
    return solver.solve(x, ledgers[0], ledgers[1], k_start)


def classify_step(
    g: Graph,
    act: ActionTriple,
    index_name: str = DEFAULT_INDEX
) -> CombinedStrategyCase:
    """
    Case of a step by the group index before attack, after attack and after recovery

    Raises:
        UnclassifiedStepError: If recovery lowers the index
    """
    c_base = group_index(g, index_name)
    attacked = g.subgraph(g.full_mask & ~g.mask_of(act.strong | act.normal))
    c_attacked = group_index(attacked, index_name)
    c_recovered = group_index(apply_actions(g, act), index_name)

    if c_recovered < c_attacked:
        raise UnclassifiedStepError(
            f"Recovery lowered the group index from {c_attacked} to {c_recovered}"
        )
    if c_attacked == c_base:
        return CombinedStrategyCase.CASE_1
    if c_recovered == c_attacked:
        return CombinedStrategyCase.CASE_2
    return CombinedStrategyCase.CASE_3


@dataclass(frozen=True)
class EquilibriumPrediction:
    """
    Closed-form case of a one-step game that only values the group index (a = 0, h = 1)

    within_domain marks parameter points where the closed form provably
    agrees with the solved equilibrium step, tie-breaks included.
    """
    case: CombinedStrategyCase
    attacker_can_attack: bool
    defender_can_recover: bool
    all_strong_attains_max: bool
    within_domain: bool
    best_index: Optional[float] = None


@dataclass(frozen=True)
class _AttackSummary:
    strong: Tuple[Edge, ...]
    normal: Tuple[Edge, ...]
    cost: float
    attacked_index: float
    replied_index: float


def _summarize_attacks(
    g: Graph,
    avail_a: float,
    avail_d: float,
    attacker: AttackerParams,
    defender: DefenderParams,
    index_name: str
) -> List[_AttackSummary]:
    """Every affordable attack with its index before recovery and after the defender's best recovery"""
    summaries = []
    for strong, normal in enumerate_attacker_actions(g, avail_a, attacker):
        act = ActionTriple(frozenset(strong), frozenset(normal))
        attacked = group_index(g.subgraph(g.full_mask & ~g.mask_of(act.strong | act.normal)), index_name)
        replied = max(
            group_index(apply_actions(g, ActionTriple(act.strong, act.normal, frozenset(rec))), index_name)
            for rec in enumerate_defender_actions(normal, avail_d, defender)
        )
        summaries.append(_AttackSummary(
            strong=strong,
            normal=normal,
            cost=action_cost(act, attacker, defender)[0],
            attacked_index=attacked,
            replied_index=replied,
        ))
    return summaries


def _strong_attack_is_cheapest(attaining: Sequence[_AttackSummary]) -> bool:
    """Whether a pure strong attack strictly undercuts every best attack that uses normal edges"""
    strong_costs = [s.cost for s in attaining if not s.normal]
    if not strong_costs:
        return False
    cheapest = min(strong_costs)
    return all(s.cost > cheapest + ENERGY_EPS for s in attaining if s.normal)


def explain_equilibrium_case(
    cfg: GameConfig,
    ledgers: Tuple[EnergyLedger, EnergyLedger],
    attacker: AttackerParams,
    defender: DefenderParams,
    g: Graph,
    k: int = 0
) -> EquilibriumPrediction:
    """
    Closed-form combined strategy of a single-step game that only values the group index

    Decision:
    - attacker short of one normal attack: Case 1
    - defender short of one recovery: Case 2
    - a strong attack on as many edges as the attacker can afford reaches
      the best index the defender cannot undo: Case 2
    - otherwise: Case 3

    The closed form ignores the energy-saving tie-break. It agrees with the
    solved step when the attacker cannot afford an attack, or when b > 0,
    some attack lowers the index and one of these holds: the defender cannot
    recover, the attacker can strongly attack every edge, the attacker is
    short of energy and a best pure strong attack is strictly cheaper than
    every best attack with normal edges, or every best attack is lowered
    further before recovery than after it.

    Raises:
        ClassifierDomainError: Unless h == 1 and a == 0
    """
    if cfg.h != 1 or cfg.a != 0:
        raise ClassifierDomainError(f"Case prediction needs h=1 and a=0, got h={cfg.h}, a={cfg.a}")

    avail_a = available(ledgers[0], attacker, k)
    avail_d = available(ledgers[1], defender, k)
    defender_can_recover = avail_d + ENERGY_EPS >= defender.beta

    if avail_a + ENERGY_EPS < attacker.beta_normal:
        return EquilibriumPrediction(
            case=CombinedStrategyCase.CASE_1,
            attacker_can_attack=False,
            defender_can_recover=defender_can_recover,
            all_strong_attains_max=False,
            within_domain=True,
        )

    tol = cfg.utility_tolerance
    m = g.edge_count
    attacks = _summarize_attacks(g, avail_a, avail_d, attacker, defender, cfg.group_index)
    best = min(s.replied_index for s in attacks)
    attaining = [s for s in attacks if s.replied_index <= best + tol]

    strong_count = min(sustainable_count(avail_a, attacker.beta_strong), m)
    all_strong = strong_count > 0 and min(
        group_index(g.subgraph(g.full_mask & ~g.mask_of(subset)), cfg.group_index)
        for subset in itertools.combinations(g.edges, strong_count)
    ) <= best + tol

    if not defender_can_recover or all_strong:
        case = CombinedStrategyCase.CASE_2
    else:
        case = CombinedStrategyCase.CASE_3

    lowers = cfg.b > 0 and best < group_index(g, cfg.group_index) - tol
    within_domain = lowers and (
        not defender_can_recover
        or avail_a + ENERGY_EPS >= m * attacker.beta_strong
        or (
            all_strong
            and not attacker_abundant(avail_a, attacker, m, 1)
            and _strong_attack_is_cheapest(attaining)
        )
        or all(s.attacked_index < best - tol for s in attaining)
    )
    logger.debug(
        f"Closed-form case {case.value} at k={k}: best index {best}, "
        f"strong attack attains it: {all_strong}, within domain: {within_domain}"
    )

    return EquilibriumPrediction(
        case=case,
        attacker_can_attack=True,
        defender_can_recover=defender_can_recover,
        all_strong_attains_max=bool(all_strong),
        within_domain=bool(within_domain),
        best_index=float(best),
    )


def predict_equilibrium_case(
    cfg: GameConfig,
    ledgers: Tuple[EnergyLedger, EnergyLedger],
    attacker: AttackerParams,
    defender: DefenderParams,
    g: Graph,
    k: int = 0
) -> CombinedStrategyCase:
    """Closed-form combined-strategy case of the one-step game (h = 1, a = 0)"""
    return explain_equilibrium_case(cfg, ledgers, attacker, defender, g, k).case
