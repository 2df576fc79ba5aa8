"""Server downlink power allocation via KKT conditions.

Two objectives share one solver skeleton:

* risk-sensitive: minimize sum_i exp(rho * T_dl_i), whose per-VUE
  stationarity condition is
      theta * kappa * exp(theta / ln(1+P*kappa)) / ((1+P*kappa) * ln(1+P*kappa)^2) = nu
  with theta = rho * B * n * ln2 / W_s and kappa = h * n / (W_s * N0);
* average: minimize sum_i T_dl_i, whose stationarity drops the exponential
  factor (theta replaced by the plain delay scale B * n * ln2 / W_s).

Both left-hand sides are strictly decreasing in P, so a nested bisection
applies: the inner loop inverts the stationarity for P given nu, the outer
loop bisects nu until the power budget is met. Root-finding runs in the log
domain (ln of the stationarity value), which is overflow-free; the natural
exponential only appears when reporting objective values, guarded by a
700-clamp on its argument.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from .delays import LN2, PhysicalParams

logger = logging.getLogger(__name__)

EXP_CLAMP = 700.0
_clamp_warned = False

OUTER_ITER_CAP = 200
INNER_ITER_CAP = 200
KKT_RESIDUAL_TOL = 1e-6
BUDGET_REL_TOL = 1e-9


class EmptyProblemError(ValueError):
    """Power allocation requested with no offloading VUEs."""


class SolverFailureError(RuntimeError):
    """Bisection failed to converge; carries the best residual reached."""

    def __init__(self, message: str, best_residual: float):
        super().__init__(f"{message} (best residual {best_residual:.3e})")
        self.best_residual = best_residual


class AllocationKind(enum.Enum):
    RISK_SENSITIVE = "risk_sensitive"
    AVERAGE = "average"


def guarded_exp(x):
    """exp with the argument clamped at 700; warns once per process."""
    global _clamp_warned
    arr = np.asarray(x, dtype=float)
    if np.any(arr > EXP_CLAMP):
        if not _clamp_warned:
            logger.warning("exp argument exceeded %.0f and was clamped; further occurrences suppressed", EXP_CLAMP)
            _clamp_warned = True
        arr = np.minimum(arr, EXP_CLAMP)
    out = np.exp(arr)
    return float(out) if np.isscalar(x) else out


@dataclass(frozen=True)
class AllocationProblem:
    """One iteration's downlink allocation instance.

    kappa[i] = h_i * n / (W_s * N0) for offloader i; delay_scale = B*n*ln2/W_s
    so that T_dl_i = delay_scale / ln(1 + P_i * kappa_i).
    """

    kind: AllocationKind
    kappa: np.ndarray  # (n,) 1/W
    p_max: float
    delay_scale: float  # seconds
    rho: float | None = None  # 1/s, risk-sensitive only

    def __post_init__(self):
        k = np.asarray(self.kappa, dtype=float)
        if k.ndim != 1 or k.size == 0:
            raise EmptyProblemError("kappa must be a non-empty 1-d array")
        if np.any(k <= 0):
            raise ValueError("all kappa must be > 0")
        if self.p_max <= 0 or self.delay_scale <= 0:
            raise ValueError("p_max and delay_scale must be > 0")
        if self.kind is AllocationKind.RISK_SENSITIVE:
            if self.rho is None or self.rho <= 0:
                raise ValueError("risk-sensitive allocation needs rho > 0")
        object.__setattr__(self, "kappa", k)

    @property
    def num_vues(self) -> int:
        return self.kappa.size

    @property
    def theta(self) -> float:
        """Exponent scale of the risk-sensitive stationarity condition."""
        if self.kind is not AllocationKind.RISK_SENSITIVE:
            raise ValueError("theta is defined for the risk-sensitive objective only")
        return self.rho * self.delay_scale

    @staticmethod
    def from_downlink(
        kind: AllocationKind,
        params: PhysicalParams,
        server_gains,
        num_offloaders: int,
        rho: float | None,
    ) -> "AllocationProblem":
        """Build the instance for the given offloader set."""
        h = np.asarray(server_gains, dtype=float)
        n = num_offloaders
        kappa = h * n / (params.server_bandwidth_hz * params.noise_psd_w_per_hz)
        delay_scale = params.synthesized_image_bits * n * LN2 / params.server_bandwidth_hz
        return AllocationProblem(
            kind=kind,
            kappa=kappa,
            p_max=params.server_power_budget_w,
            delay_scale=delay_scale,
            rho=rho if kind is AllocationKind.RISK_SENSITIVE else None,
        )


@dataclass
class PowerAllocation:
    """Solver output: positive powers summing to the budget."""

    powers_w: np.ndarray
    multiplier: float  # nu
    kkt_residual: float
    outer_iterations: int
    inner_iterations: int
    warnings: list[str] = field(default_factory=list)


def stationarity_lhs(p, kappa, theta):
    """Left-hand side of the risk-sensitive stationarity condition.

    Strictly decreasing in p over p > 0. Evaluated through its logarithm so
    intermediate terms cannot overflow; the final exponential is clamped,
    which saturates the value near exp(700) for extremely small p.
    """
    p_arr = np.asarray(p, dtype=float)
    if np.any(p_arr <= 0):
        raise ValueError("power must be > 0")
    y = np.log1p(p_arr * kappa)
    log_val = np.log(theta * kappa) + theta / y - y - 2.0 * np.log(y)
    val = guarded_exp(log_val)
    return float(val) if np.isscalar(p) else val


def average_stationarity_lhs(p, kappa, delay_scale):
    """Stationarity left-hand side of the average (sum of delays) objective."""
    p_arr = np.asarray(p, dtype=float)
    if np.any(p_arr <= 0):
        raise ValueError("power must be > 0")
    y = np.log1p(p_arr * kappa)
    val = delay_scale * kappa / ((1.0 + p_arr * kappa) * y * y)
    return float(val) if np.isscalar(p) else val


def _log_lhs(y, ln_kappa, problem: AllocationProblem):
    """ln of the stationarity LHS as a function of y = ln(1 + P*kappa).

    Overflow-free; strictly decreasing in y for y > 0.
    """
    if problem.kind is AllocationKind.RISK_SENSITIVE:
        theta = problem.theta
        return np.log(theta) + ln_kappa + theta / y - y - 2.0 * np.log(y)
    return np.log(problem.delay_scale) + ln_kappa - y - 2.0 * np.log(y)


def _powers_from_y(y, kappa):
    return np.expm1(y) / kappa


def objective_value(powers_w, problem: AllocationProblem) -> float:
    """Server objective at a feasible allocation."""
    p = np.asarray(powers_w, dtype=float)
    y = np.log1p(p * problem.kappa)
    if problem.kind is AllocationKind.RISK_SENSITIVE:
        return float(np.sum(guarded_exp(problem.theta / y)))
    return float(np.sum(problem.delay_scale / y))


def downlink_delays(powers_w, problem: AllocationProblem) -> np.ndarray:
    """Per-offloader downlink delay implied by an allocation."""
    y = np.log1p(np.asarray(powers_w, dtype=float) * problem.kappa)
    return problem.delay_scale / y


def solve_allocation(problem: AllocationProblem, outer_tol: float = 1e-11) -> PowerAllocation:
    """Nested-bisection KKT solve; see module docstring.

    The outer bisection runs on ln(nu) until the bracket is narrower than
    `outer_tol`; per-VUE inner brackets on y are warm-started from the outer
    bracket endpoints, so the inner bisection cost shrinks as the outer
    interval contracts.
    """
    kappa = problem.kappa
    n = problem.num_vues
    p_max = problem.p_max

    if n == 1:
        # Single offloader exhausts the budget.
        nu = float(np.exp(_log_lhs(np.log1p(p_max * kappa), np.log(kappa), problem)[0]))
        return PowerAllocation(
            powers_w=np.array([p_max]),
            multiplier=nu,
            kkt_residual=0.0,
            outer_iterations=0,
            inner_iterations=0,
        )

    ln_kappa = np.log(kappa)
    if problem.kind is AllocationKind.RISK_SENSITIVE:
        const = np.log(problem.theta) + ln_kappa
        coef = problem.theta

        def lhs(y):
            return const + coef / y - y - 2.0 * np.log(y)
    else:
        const = np.log(problem.delay_scale) + ln_kappa

        def lhs(y):
            return const - y - 2.0 * np.log(y)

    # Outer bracket from the stationarity values at P_max (low end) and
    # P_max/n (high end); each end provably brackets the budget sum (at
    # nu_lo every inverted power is >= P_max, at nu_hi <= P_max/n).
    y_at_pmax = np.log1p(p_max * kappa)
    ln_nu_lo = float(np.min(lhs(y_at_pmax)))
    y_at_share = np.log1p(p_max / n * kappa)
    ln_nu_hi = float(np.max(lhs(y_at_share)))

    y_lo, y_hi = _inner_brackets(lhs, ln_nu_lo, ln_nu_hi, y_at_share, y_at_pmax)

    # Geometric widening of the outer bracket (safety net; the analytic
    # bracket above already holds).
    for _ in range(100):
        if _budget_sum(lhs, ln_nu_lo, y_lo, y_hi, kappa, p_max)[0] >= p_max:
            break
        ln_nu_lo -= LN2 * 8
        y_lo, y_hi = _inner_brackets(lhs, ln_nu_lo, ln_nu_hi, y_at_share, y_at_pmax)
    for _ in range(100):
        if _budget_sum(lhs, ln_nu_hi, y_lo, y_hi, kappa, p_max)[0] <= p_max:
            break
        ln_nu_hi += LN2 * 8
        y_lo, y_hi = _inner_brackets(lhs, ln_nu_lo, ln_nu_hi, y_at_share, y_at_pmax)

    inner_total = 0
    outer_it = 0
    width0 = ln_nu_hi - ln_nu_lo
    while outer_it < OUTER_ITER_CAP:
        outer_it += 1
        width = ln_nu_hi - ln_nu_lo
        ln_nu_mid = 0.5 * (ln_nu_lo + ln_nu_hi)
        total, (a, b), used = _budget_sum(lhs, ln_nu_mid, y_lo, y_hi, kappa, p_max)
        inner_total += used
        if total > p_max:
            # Sum decreases in nu, so the root lies above the midpoint;
            # powers (and y) at larger nu are smaller.
            ln_nu_lo = ln_nu_mid
            y_hi = b
        else:
            ln_nu_hi = ln_nu_mid
            y_lo = a
        if width < outer_tol:
            break

    # Final powers from fully refined inner brackets at the converged nu.
    ln_nu = 0.5 * (ln_nu_lo + ln_nu_hi)
    total, (a, b), used = _budget_sum(lhs, ln_nu, y_lo, y_hi, kappa, None)
    inner_total += used
    y = 0.5 * (a + b)
    powers = _powers_from_y(y, kappa)
    scale = p_max / powers.sum()
    powers *= scale  # exact budget; perturbs each power by O(width) relative

    y_final = np.log1p(powers * kappa)
    residual = float(np.max(np.abs(np.expm1(lhs(y_final) - ln_nu))))

    warnings = []
    if np.any(powers < 1e-12):
        warnings.append("boundary-hugging allocation: some P_i < 1e-12 W")
    budget_err = abs(powers.sum() - p_max) / p_max
    if residual > KKT_RESIDUAL_TOL or budget_err > BUDGET_REL_TOL:
        raise SolverFailureError(
            f"power allocation did not converge after {outer_it} outer steps "
            f"(initial bracket width {width0:.3g})",
            best_residual=residual,
        )

    return PowerAllocation(
        powers_w=powers,
        multiplier=float(np.exp(ln_nu)),
        kkt_residual=residual,
        outer_iterations=outer_it,
        inner_iterations=inner_total,
        warnings=warnings,
    )


def _inner_brackets(lhs, ln_nu_lo, ln_nu_hi, y_seed_lo, y_seed_hi):
    """Per-VUE y brackets containing the roots for every nu in the outer
    interval: lhs(y_lo) >= ln_nu_hi and lhs(y_hi) <= ln_nu_lo."""
    y_lo = y_seed_lo.copy()
    for _ in range(300):
        short = lhs(y_lo) < ln_nu_hi
        if not np.any(short):
            break
        y_lo[short] *= 0.25
    y_hi = y_seed_hi.copy()
    for _ in range(300):
        short = lhs(y_hi) > ln_nu_lo
        if not np.any(short):
            break
        y_hi[short] *= 4.0
    return y_lo, y_hi


def _budget_sum(lhs, ln_nu, y_lo, y_hi, kappa, decide_vs):
    """Invert the stationarity per VUE at ln_nu by bisection on y.

    When `decide_vs` is given, refinement stops as soon as the rigorous
    budget-sum interval [sum(P(a)), sum(P(b))] excludes it, which makes the
    caller's comparison against `decide_vs` certain; brackets that reach
    float spacing stop regardless (the comparison is then borderline at
    machine precision, and either outcome keeps the root in the retained
    outer half to within that precision). With `decide_vs=None` the brackets
    are driven to float spacing outright.

    Returns (sum of powers at the bracket midpoints, refined (a, b)
    brackets, iterations used). The incoming brackets must contain the
    roots; they are not modified.
    """
    a = y_lo.copy()
    b = y_hi.copy()
    used = 0
    while used < INNER_ITER_CAP:
        if decide_vs is not None:
            total_lo = float(_powers_from_y(a, kappa).sum())
            total_hi = float(_powers_from_y(b, kappa).sum())
            if total_lo > decide_vs or total_hi < decide_vs:
                break
        if np.all(b - a <= 4.0 * np.spacing(b)):
            break
        for _ in range(2):
            used += 1
            mid = 0.5 * (a + b)
            too_big = lhs(mid) > ln_nu
            a = np.where(too_big, mid, a)
            b = np.where(too_big, b, mid)
    y = 0.5 * (a + b)
    return float(_powers_from_y(y, kappa).sum()), (a, b), used
