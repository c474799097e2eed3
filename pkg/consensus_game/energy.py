"""
Energy ledgers
Cumulative spend of each player against the linear supply kappa + rho * k
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Tuple, Union

from .error_handler import EnergyOverdraftError
from .models import AttackerParams, DefenderParams

if TYPE_CHECKING:
    from .game import ActionTriple


# Slack for comparing spend against supply
ENERGY_EPS = 1e-9

PlayerParams = Union[AttackerParams, DefenderParams]


@dataclass(frozen=True)
class EnergyLedger:
    """Energy consumed so far and the step of the last charge"""
    spent: float = 0.0
    k: int = 0

    def __post_init__(self):
        if self.spent < 0.0:
            raise ValueError(f"spent must be nonnegative, got {self.spent}")
        if self.k < 0:
            raise ValueError(f"k must be nonnegative, got {self.k}")


def supply(params: PlayerParams, k: int) -> float:
    """Total energy made available up to step k"""
    return params.kappa + params.rho * k


def available(ledger: EnergyLedger, params: PlayerParams, k: int) -> float:
    """
    Energy a player may still spend at step k

    Args:
        ledger: Current ledger
        params: Player's energy parameters
        k: Time step, not earlier than the ledger's last charge

    Returns:
        kappa + rho * k - spent (may be fractional)
    """
    if k < ledger.k:
        raise ValueError(f"Cannot query step {k} before the ledger's step {ledger.k}")
    return supply(params, k) - ledger.spent


def action_cost(
    act: "ActionTriple",
    ap: AttackerParams,
    dp: DefenderParams
) -> Tuple[float, float]:
    """
    Per-step cost of an action triple

    Returns:
        (attacker_cost, defender_cost)
    """
    attacker_cost = ap.beta_strong * len(act.strong) + ap.beta_normal * len(act.normal)
    defender_cost = dp.beta * len(act.recovered)
    return attacker_cost, defender_cost


def charge(
    ledger: EnergyLedger,
    cost: float,
    k: int,
    params: PlayerParams
) -> EnergyLedger:
    """
    Spend energy at step k

    Raises:
        EnergyOverdraftError: If cost exceeds the energy available at k
    """
    if cost < 0.0:
        raise ValueError(f"cost must be nonnegative, got {cost}")
    remaining = available(ledger, params, k)
    if cost > remaining + ENERGY_EPS:
        raise EnergyOverdraftError(
            f"Charge of {cost:.6g} at step {k} exceeds available energy {remaining:.6g}"
        )
    return EnergyLedger(spent=ledger.spent + cost, k=k)


def sustainable_count(amount: float, beta: float) -> int:
    """Whole actions of cost beta that amount pays for, with slack at exact multiples"""
    return math.floor(amount / beta + ENERGY_EPS)


def recharge_covers(rho: float, beta: float, count: float) -> bool:
    """rho / beta >= count, with slack at the boundary"""
    return rho / beta >= count - ENERGY_EPS
