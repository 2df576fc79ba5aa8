"""Joint utility and policy estimation learner for one VUE.

Each agent keeps three tables over (channel state, action): a utility
estimate, a regret estimate, and the decision policy. One iteration applies,
in order:

1. utility estimate step on the (observed state, taken action) cell,
2. regret estimate step on both actions of the observed state,
3. Boltzmann-Gibbs map of the positive-part regrets,
4. policy step toward that distribution.

Step sizes follow three p-series timescales t^-a with
0.5 < a_u < a_r < a_pi <= 1, which makes the sums diverge, the squared sums
converge, and the faster timescales dominate the slower ones.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .power import guarded_exp

FETCH = 0
OFFLOAD = 1
NUM_ACTIONS = 2


class UtilityKind(enum.Enum):
    RISK_SENSITIVE = "risk_sensitive"  # u = -exp(rho * T)
    AVERAGE = "average"  # u = -T


@dataclass(frozen=True)
class RiskConfig:
    """Risk sensitivity and exploration temperature of one learner."""

    rho: float = 30.0  # 1/s
    temperature: float = 10.0  # exploitation-exploration trade-off (xi)
    utility_kind: UtilityKind = UtilityKind.RISK_SENSITIVE

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("rho must be > 0")
        if self.temperature <= 0:
            raise ValueError("temperature must be > 0")


@dataclass(frozen=True)
class LearningRates:
    """p-series step-size exponents for the three estimator timescales."""

    utility_exponent: float = 0.51
    regret_exponent: float = 0.52
    policy_exponent: float = 0.53

    def __post_init__(self):
        self.validate()

    def validate(self):
        """Check the p-series conditions analytically.

        0.5 < a ensures square-summable steps, a <= 1 divergent step sums,
        and the strict ordering makes eta_r/eta_u -> 0 and eta_pi/eta_r -> 0.
        """
        a_u, a_r, a_pi = self.utility_exponent, self.regret_exponent, self.policy_exponent
        if not (0.5 < a_u < a_r < a_pi <= 1.0):
            raise ValueError(
                f"learning-rate exponents must satisfy 0.5 < a_u < a_r < a_pi <= 1, "
                f"got ({a_u}, {a_r}, {a_pi})"
            )

    def utility_rate(self, t: int) -> float:
        return t ** -self.utility_exponent

    def regret_rate(self, t: int) -> float:
        return t ** -self.regret_exponent

    def policy_rate(self, t: int) -> float:
        return t ** -self.policy_exponent


def utility(t_e2e_s: float, cfg: RiskConfig) -> float:
    """Utility of one observed E2E delay (higher is better, always <= 0)."""
    if not math.isfinite(t_e2e_s):
        raise ValueError("E2E delay must be finite")
    if t_e2e_s < 0:
        raise ValueError("E2E delay must be >= 0")
    if cfg.utility_kind is UtilityKind.RISK_SENSITIVE:
        return -float(guarded_exp(cfg.rho * t_e2e_s))
    return -t_e2e_s


class AgentTables:
    """One VUE's learner state: 6 * num_states scalars in three tables."""

    def __init__(self, num_states: int):
        if num_states < 1:
            raise ValueError("need at least one channel state")
        self.num_states = num_states
        self.utility_estimates = np.zeros((num_states, NUM_ACTIONS))
        self.regret_estimates = np.zeros((num_states, NUM_ACTIONS))
        self.policy = np.full((num_states, NUM_ACTIONS), 0.5)

    @property
    def memory_elements(self) -> int:
        return self.utility_estimates.size + self.regret_estimates.size + self.policy.size


def update_utility_estimate(
    tables: AgentTables, t: int, state: int, action: int, observed_utility: float, rates: LearningRates
) -> float:
    """Move the (state, action) utility estimate toward the observation."""
    eta = rates.utility_rate(t)
    cell = tables.utility_estimates[state, action]
    cell += eta * (observed_utility - cell)
    tables.utility_estimates[state, action] = cell
    return cell


def update_regret_estimate(
    tables: AgentTables, t: int, state: int, observed_utility: float, rates: LearningRates
) -> np.ndarray:
    """Move both regret estimates of the observed state toward
    (utility estimate - realized utility)."""
    eta = rates.regret_rate(t)
    row = tables.regret_estimates[state]
    row += eta * (tables.utility_estimates[state] - observed_utility - row)
    return row


def boltzmann_gibbs(regret_row, temperature: float) -> np.ndarray:
    """Exploration-exploitation distribution over the positive-part regrets.

    Computed with max-subtraction so large regrets cannot overflow.
    """
    z = temperature * np.maximum(np.asarray(regret_row, dtype=float), 0.0)
    z = z - z.max()
    w = np.exp(z)
    return w / w.sum()


def update_policy(tables: AgentTables, t: int, state: int, target_row, rates: LearningRates) -> np.ndarray:
    """Move the observed state's policy row toward the target distribution."""
    eta = rates.policy_rate(t)
    row = tables.policy[state]
    row += eta * (np.asarray(target_row) - row)
    return row


def agent_step(
    tables: AgentTables,
    t: int,
    state: int,
    action: int,
    observed_utility: float,
    rates: LearningRates,
    temperature: float,
) -> None:
    """One full learning iteration for a single agent."""
    update_utility_estimate(tables, t, state, action, observed_utility, rates)
    update_regret_estimate(tables, t, state, observed_utility, rates)
    beta = boltzmann_gibbs(tables.regret_estimates[state], temperature)
    update_policy(tables, t, state, beta, rates)


def sample_action(tables: AgentTables, state: int, rng: np.random.Generator) -> int:
    """Draw fetch/offload from the state's policy row."""
    return OFFLOAD if rng.random() < tables.policy[state, OFFLOAD] else FETCH


class AgentPopulation:
    """All VUEs' tables stacked for vectorized per-iteration updates.

    Applies the same recurrences as the single-agent functions; the engine
    uses this form so one iteration touches every VUE with a handful of
    array operations.
    """

    def __init__(self, num_vues: int, num_states: int):
        self.num_vues = num_vues
        self.num_states = num_states
        self.utility_estimates = np.zeros((num_vues, num_states, NUM_ACTIONS))
        self.regret_estimates = np.zeros((num_vues, num_states, NUM_ACTIONS))
        self.policy = np.full((num_vues, num_states, NUM_ACTIONS), 0.5)
        self._vue_index = np.arange(num_vues)

    def offload_probabilities(self, states: np.ndarray) -> np.ndarray:
        return self.policy[self._vue_index, states, OFFLOAD]

    def step(
        self,
        t: int,
        states: np.ndarray,
        actions: np.ndarray,
        observed_utilities: np.ndarray,
        rates: LearningRates,
        temperature: float,
    ) -> None:
        """One learning iteration for every VUE at once."""
        v = self._vue_index
        eta_u = rates.utility_rate(t)
        eta_r = rates.regret_rate(t)
        eta_pi = rates.policy_rate(t)

        cells = self.utility_estimates[v, states, actions]
        self.utility_estimates[v, states, actions] = cells + eta_u * (observed_utilities - cells)

        rows = self.regret_estimates[v, states]  # (V, 2) copy
        rows += eta_r * (self.utility_estimates[v, states] - observed_utilities[:, None] - rows)
        self.regret_estimates[v, states] = rows

        z = temperature * np.maximum(rows, 0.0)
        z -= z.max(axis=1, keepdims=True)
        w = np.exp(z)
        beta = w / w.sum(axis=1, keepdims=True)

        pi_rows = self.policy[v, states]
        self.policy[v, states] = pi_rows + eta_pi * (beta - pi_rows)

    def tables_for(self, vue_id: int) -> AgentTables:
        """Materialize one VUE's view as a standalone AgentTables."""
        tables = AgentTables(self.num_states)
        tables.utility_estimates = self.utility_estimates[vue_id].copy()
        tables.regret_estimates = self.regret_estimates[vue_id].copy()
        tables.policy = self.policy[vue_id].copy()
        return tables
