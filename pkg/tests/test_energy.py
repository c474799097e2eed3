"""
Tests for energy ledgers
"""
import pytest

from consensus_game.energy import (
    ENERGY_EPS,
    EnergyLedger,
    action_cost,
    available,
    charge,
    recharge_covers,
    supply,
    sustainable_count,
)
from consensus_game.error_handler import EnergyOverdraftError
from consensus_game.game import ActionTriple
from consensus_game.models import AttackerParams, DefenderParams


@pytest.fixture
def attacker():
    return AttackerParams(kappa=2.0, rho=1.5, beta_normal=1.0, beta_strong=2.0)


@pytest.fixture
def defender():
    return DefenderParams(kappa=0.5, rho=0.25, beta=1.0)


class TestSupply:
    """Tests for energy supply and availability"""

    def test_linear_supply(self, attacker):
        """Test supply grows by rho per step"""
        assert supply(attacker, 0) == 2.0
        assert supply(attacker, 4) == 8.0

    def test_available_subtracts_spend(self, attacker):
        """Test available energy is supply minus spend"""
        ledger = EnergyLedger(spent=3.0, k=2)
        assert available(ledger, attacker, 2) == pytest.approx(2.0)

    def test_query_before_last_charge(self, attacker):
        """Test querying a step before the ledger's step is rejected"""
        with pytest.raises(ValueError):
            available(EnergyLedger(spent=0.0, k=3), attacker, 1)

    def test_negative_spend_rejected(self):
        """Test ledgers cannot hold negative spend"""
        with pytest.raises(ValueError):
            EnergyLedger(spent=-1.0)


class TestCharge:
    """Tests for charging actions"""

    def test_action_cost(self, attacker, defender):
        """Test costs of strong, normal and recovered edges"""
        act = ActionTriple(
            strong=frozenset({(0, 1)}),
            normal=frozenset({(1, 2), (2, 3)}),
            recovered=frozenset({(2, 3)}),
        )
        assert action_cost(act, attacker, defender) == (4.0, 1.0)

    def test_charge_within_budget(self, attacker):
        """Test a feasible charge updates spend and step"""
        ledger = charge(EnergyLedger(), 3.5, 1, attacker)
        assert ledger.spent == 3.5
        assert ledger.k == 1

    def test_charge_exact_budget_within_tolerance(self, attacker):
        """Test spending the exact supply passes the tolerance check"""
        ledger = charge(EnergyLedger(), supply(attacker, 2) + ENERGY_EPS / 2, 2, attacker)
        assert available(ledger, attacker, 2) <= 0.0

    def test_overdraft(self, defender):
        """Test spending beyond the supply raises EnergyOverdraftError"""
        with pytest.raises(EnergyOverdraftError):
            charge(EnergyLedger(), 1.0, 1, defender)

    def test_spend_never_exceeds_supply(self, attacker):
        """Test repeated maximal charges keep spend within supply"""
        ledger = EnergyLedger()
        for k in range(20):
            cost = attacker.beta_strong * int(available(ledger, attacker, k) // attacker.beta_strong)
            ledger = charge(ledger, cost, k, attacker)
            assert ledger.spent <= supply(attacker, k) + ENERGY_EPS


class TestRechargeRatio:
    """Tests for whole-action counts paid by the recharge"""

    @pytest.mark.parametrize("rho,beta,expected", [(0.3, 0.1, 3), (0.7, 0.1, 7), (2.6, 2.0, 1), (0.9, 1.0, 0)])
    def test_sustainable_count(self, rho, beta, expected):
        """Test floor(rho / beta) holds at exact decimal multiples"""
        assert sustainable_count(rho, beta) == expected

    def test_recharge_covers_boundary(self):
        """Test a ratio equal to the target passes and one just below fails"""
        assert recharge_covers(0.3, 0.1, 3)
        assert not recharge_covers(0.29, 0.1, 3)
