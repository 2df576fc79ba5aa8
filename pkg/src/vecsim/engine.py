"""Iteration engine: orchestrates channels, decisions, the server's power
allocation, delays, utilities, and learning updates for every VUE, one
synchronous round at a time.

Per iteration: (1) each VUE observes its i.i.d. channel realization,
(2) draws fetch/offload from its policy (or a fixed baseline rule),
(3) the fetcher/offloader split is formed, (4) the server solves its power
allocation over the offloaders, (5) all delays and utilities follow, and
(6) learning schemes update their estimator tables.

Seeding: one master seed fans out into per-(VUE, purpose) substreams, with
iteration t occupying a fixed, disjoint block of each substream. Channel and
action draws are therefore identical across schemes run with the same seed
(common random numbers), and any (VUE, iteration) pair can be re-addressed
for replay.
"""

from __future__ import annotations

import enum
import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from . import channel as ch
from . import delays as dl
from .learning import (
    FETCH,
    OFFLOAD,
    AgentPopulation,
    LearningRates,
    RiskConfig,
    UtilityKind,
)
from .power import (
    AllocationKind,
    AllocationProblem,
    PowerAllocation,
    downlink_delays,
    guarded_exp,
    solve_allocation,
)


class SchemeKind(enum.Enum):
    PROPOSED = "proposed"
    AVERAGE_BASED = "average_based"
    FULLY_FETCHING = "fully_fetching"
    FULLY_OFFLOADING = "fully_offloading"
    HALF_HALF = "half_half"

    @property
    def is_learning(self) -> bool:
        return self in (SchemeKind.PROPOSED, SchemeKind.AVERAGE_BASED)

    @property
    def allocation_kind(self) -> AllocationKind:
        if self is SchemeKind.AVERAGE_BASED:
            return AllocationKind.AVERAGE
        return AllocationKind.RISK_SENSITIVE

    @property
    def utility_kind(self) -> UtilityKind:
        if self is SchemeKind.AVERAGE_BASED:
            return UtilityKind.AVERAGE
        return UtilityKind.RISK_SENSITIVE

    @property
    def fixed_offload_probability(self) -> float | None:
        """Constant policy of the non-learning baselines."""
        return {
            SchemeKind.FULLY_FETCHING: 0.0,
            SchemeKind.FULLY_OFFLOADING: 1.0,
            SchemeKind.HALF_HALF: 0.5,
        }.get(self)


@dataclass(frozen=True)
class Scenario:
    """Frozen world: physical constants, geometry, and the fading quantizer."""

    params: dl.PhysicalParams
    geometry: ch.Geometry
    quantizer: ch.FadingQuantizer = field(default_factory=ch.FadingQuantizer)

    def __post_init__(self):
        if self.geometry.num_cameras != self.params.num_cameras:
            raise ValueError("geometry and params disagree on the camera count")

    @property
    def num_vues(self) -> int:
        return self.geometry.num_vues

    @property
    def num_cameras(self) -> int:
        return self.params.num_cameras

    @property
    def num_states(self) -> int:
        return ch.num_states(self.num_cameras)

    @staticmethod
    def build(num_vues: int, params: dl.PhysicalParams | None = None,
              quantizer: ch.FadingQuantizer | None = None, geometry_seed: int = 0) -> "Scenario":
        params = params or dl.PhysicalParams()
        quantizer = quantizer or ch.FadingQuantizer()
        geometry = ch.Geometry.sample(num_vues, params.num_cameras, geometry_seed)
        return Scenario(params=params, geometry=geometry, quantizer=quantizer)


@dataclass
class ProfileDelays:
    """All delay quantities implied by one iteration's decision profile."""

    e2e_s: np.ndarray  # (V,)
    fetch_tx_s: float  # NaN when nobody fetches
    server_compute_s: float  # 0 when nobody offloads
    downlink_s: np.ndarray  # (V,), NaN for fetchers
    powers_w: np.ndarray  # (n_o,) aligned with ascending offloader VUE id
    allocation: PowerAllocation | None


def evaluate_profile(
    params: dl.PhysicalParams,
    gains: np.ndarray,
    actions: np.ndarray,
    allocation_kind: AllocationKind,
    rho: float | None,
) -> ProfileDelays:
    """Compute every VUE's delay breakdown for a fixed decision profile.

    `gains` is the (V, C+1) matrix of link gains (server link last). Pure
    function of its inputs; the engine, the replay check, and the
    enumeration oracle all share it.
    """
    actions = np.asarray(actions)
    num_vues = actions.shape[0]
    fetch_mask = actions == FETCH
    off_idx = np.flatnonzero(~fetch_mask)
    e2e = np.empty(num_vues)
    downlink = np.full(num_vues, np.nan)

    fetch_tx = float("nan")
    if fetch_mask.any():
        cam_gains = gains[fetch_mask, : params.num_cameras]
        h_min = cam_gains.min(axis=0)
        snr = params.camera_power_w * h_min / (params.camera_bandwidth_hz * params.noise_psd_w_per_hz)
        rates = params.camera_bandwidth_hz * dl.log2p1(snr)
        fetch_tx = float(np.max(params.camera_image_bits / rates))
        e2e[fetch_mask] = fetch_tx + params.task_cycles / params.vue_cpu_hz

    server_compute = 0.0
    powers = np.empty(0)
    allocation = None
    if off_idx.size:
        n_o = off_idx.size
        problem = AllocationProblem.from_downlink(
            allocation_kind, params, gains[off_idx, params.num_cameras], n_o, rho
        )
        allocation = solve_allocation(problem)
        powers = allocation.powers_w
        dls = downlink_delays(powers, problem)
        server_compute = params.task_cycles * n_o / params.server_cpu_hz
        downlink[off_idx] = dls
        e2e[off_idx] = server_compute + dls

    return ProfileDelays(
        e2e_s=e2e,
        fetch_tx_s=fetch_tx,
        server_compute_s=server_compute,
        downlink_s=downlink,
        powers_w=powers,
        allocation=allocation,
    )


@dataclass
class IterationRecord:
    """One iteration's raw outcome for every VUE."""

    t: int
    states: np.ndarray  # (V,)
    actions: np.ndarray  # (V,) int8
    e2e_s: np.ndarray  # (V,)
    utilities: np.ndarray  # (V,)
    fetch_tx_s: float
    server_compute_s: float
    downlink_s: np.ndarray  # (V,)
    num_fetchers: int
    num_offloaders: int
    powers_w: np.ndarray  # (n_o,) ascending offloader VUE id
    power_multiplier: float
    power_residual: float
    power_iterations: int
    gains: np.ndarray  # (V, C+1)


@dataclass
class RunResult:
    """Everything a run produced: dense per-iteration matrices for the
    statistics pipeline plus the (possibly thinned) detailed record stream."""

    scheme: SchemeKind
    rho: float
    iterations: int
    master_seed: int
    e2e_s: np.ndarray  # (T, V)
    actions: np.ndarray  # (T, V) int8
    states: np.ndarray  # (T, V) int16
    num_fetchers: np.ndarray  # (T,)
    num_offloaders: np.ndarray  # (T,)
    records: list[IterationRecord]
    population: AgentPopulation | None
    elapsed_s: float

    @property
    def num_vues(self) -> int:
        return self.e2e_s.shape[1]

    def pooled_tail_delays(self, window: int) -> np.ndarray:
        """All VUEs' E2E delays over the last `window` iterations, flattened."""
        w = min(window, self.iterations)
        return self.e2e_s[self.iterations - w :].ravel()


def run(
    scenario: Scenario,
    scheme: SchemeKind,
    iterations: int,
    master_seed: int,
    rho: float = 30.0,
    temperature: float = 10.0,
    rates: LearningRates | None = None,
    record_stride: int = 1,
) -> RunResult:
    """Run the full synchronous learning loop.

    Deterministic: the same (scenario, scheme, iterations, master_seed,
    rho, temperature, rates) reproduce the result bit-exactly.
    `record_stride` keeps every k-th detailed record (0 disables them);
    the dense matrices are always complete.
    """
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    rates = rates or LearningRates()
    params = scenario.params
    V = scenario.num_vues
    started = time.perf_counter()

    realizations = ch.sample_run_channels(scenario.geometry, scenario.quantizer, iterations, master_seed)
    action_uniforms = np.empty((iterations, V))
    for v in range(V):
        action_uniforms[:, v] = ch.action_stream(master_seed, v).random(iterations)

    population = AgentPopulation(V, scenario.num_states) if scheme.is_learning else None
    utility_kind = scheme.utility_kind
    allocation_kind = scheme.allocation_kind
    alloc_rho = rho if allocation_kind is AllocationKind.RISK_SENSITIVE else None
    fixed_p = scheme.fixed_offload_probability

    e2e_all = np.empty((iterations, V))
    actions_all = np.empty((iterations, V), dtype=np.int8)
    num_f = np.empty(iterations, dtype=np.int32)
    num_o = np.empty(iterations, dtype=np.int32)
    records: list[IterationRecord] = []

    for t in range(1, iterations + 1):
        idx = t - 1
        states = realizations.states[idx]
        gains = realizations.gains[idx]
        if population is not None:
            p_off = population.offload_probabilities(states)
        else:
            p_off = fixed_p
        actions = (action_uniforms[idx] < p_off).astype(np.int8)

        profile = evaluate_profile(params, gains, actions, allocation_kind, alloc_rho)
        if utility_kind is UtilityKind.RISK_SENSITIVE:
            utilities = -guarded_exp(rho * profile.e2e_s)
        else:
            utilities = -profile.e2e_s

        if population is not None:
            population.step(t, states, actions, utilities, rates, temperature)

        e2e_all[idx] = profile.e2e_s
        actions_all[idx] = actions
        n_o = int(actions.sum())
        num_o[idx] = n_o
        num_f[idx] = V - n_o
        if record_stride and idx % record_stride == 0:
            alloc = profile.allocation
            records.append(
                IterationRecord(
                    t=t,
                    states=states.copy(),
                    actions=actions,
                    e2e_s=profile.e2e_s,
                    utilities=utilities,
                    fetch_tx_s=profile.fetch_tx_s,
                    server_compute_s=profile.server_compute_s,
                    downlink_s=profile.downlink_s,
                    num_fetchers=V - n_o,
                    num_offloaders=n_o,
                    powers_w=profile.powers_w,
                    power_multiplier=alloc.multiplier if alloc else float("nan"),
                    power_residual=alloc.kkt_residual if alloc else float("nan"),
                    power_iterations=alloc.outer_iterations if alloc else 0,
                    gains=gains,
                )
            )

    return RunResult(
        scheme=scheme,
        rho=rho,
        iterations=iterations,
        master_seed=master_seed,
        e2e_s=e2e_all,
        actions=actions_all,
        states=realizations.states.astype(np.int16),
        num_fetchers=num_f,
        num_offloaders=num_o,
        records=records,
        population=population,
        elapsed_s=time.perf_counter() - started,
    )


def replay_record(scenario: Scenario, scheme: SchemeKind, rho: float, record: IterationRecord) -> ProfileDelays:
    """Recompute one record's delays from its stored inputs (bit-exact)."""
    alloc_rho = rho if scheme.allocation_kind is AllocationKind.RISK_SENSITIVE else None
    return evaluate_profile(scenario.params, record.gains, record.actions, scheme.allocation_kind, alloc_rho)


class InstanceTooLargeError(ValueError):
    """The enumeration oracle is restricted to tiny instances."""


@dataclass
class BestResponse:
    """Exact conditional risk of each (own state, own action) pair and the
    per-state risk-minimizing action."""

    expected_risk: np.ndarray  # (S, 2): E[exp(rho*T_e2e) | state, action]
    best_action: np.ndarray  # (S,)


def brute_force_best_response(
    scenario: Scenario,
    subject_vue: int,
    opponent_policies: np.ndarray,
    rho: float,
    allocation_kind: AllocationKind = AllocationKind.RISK_SENSITIVE,
) -> BestResponse:
    """Exact best response by enumerating every joint channel state and
    opponent action combination, weighted by the opponents' policies.

    `opponent_policies` has shape (V, S, 2); the subject's own row is
    ignored. Only instances with V <= 3 and C <= 2 are accepted.
    """
    V = scenario.num_vues
    C = scenario.num_cameras
    if V > 3 or C > 2:
        raise InstanceTooLargeError(f"oracle limited to V <= 3, C <= 2 (got V={V}, C={C})")
    S = scenario.num_states
    n_links = C + 1
    params = scenario.params
    quantizer = scenario.quantizer
    pl = ch.path_loss_linear(scenario.geometry.distances_m)
    opponents = [v for v in range(V) if v != subject_vue]
    alloc_rho = rho if allocation_kind is AllocationKind.RISK_SENSITIVE else None

    # Gains per (vue, state): levels -> conditional-mean multipliers.
    mults = np.array([quantizer.low_multiplier, quantizer.high_multiplier])
    gains_by_state = np.empty((V, S, n_links))
    for s in range(S):
        levels = ch.index_to_levels(s, n_links)
        gains_by_state[:, s, :] = pl * mults[levels]

    state_prob = 1.0 / S  # levels are equiprobable and independent per link
    expected = np.zeros((S, 2))
    for own_state in range(S):
        for own_action in (FETCH, OFFLOAD):
            total = 0.0
            for opp_states in itertools.product(range(S), repeat=len(opponents)):
                p_states = state_prob ** len(opponents)
                for opp_actions in itertools.product((FETCH, OFFLOAD), repeat=len(opponents)):
                    p_actions = 1.0
                    for v, s, a in zip(opponents, opp_states, opp_actions):
                        p_actions *= opponent_policies[v, s, a]
                    weight = p_states * p_actions
                    if weight == 0.0:
                        continue
                    gains = np.empty((V, n_links))
                    actions = np.empty(V, dtype=np.int8)
                    gains[subject_vue] = gains_by_state[subject_vue, own_state]
                    actions[subject_vue] = own_action
                    for v, s, a in zip(opponents, opp_states, opp_actions):
                        gains[v] = gains_by_state[v, s]
                        actions[v] = a
                    profile = evaluate_profile(params, gains, actions, allocation_kind, alloc_rho)
                    total += weight * float(guarded_exp(rho * profile.e2e_s[subject_vue]))
            expected[own_state, own_action] = total

    return BestResponse(expected_risk=expected, best_action=expected.argmin(axis=1))
