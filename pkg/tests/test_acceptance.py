"""Acceptance suite: trend and property criteria at the evaluated desk scale
(V = 60, 1e4 iterations). One test per criterion; each prints a single
PASS/FAIL line with the achieved figures. Runs are cached per
(scheme, rho, V, seed replicate) and shared across criteria; replicates use
common random numbers, so scheme and rho comparisons see identical channel
and action draws.
"""

import math
from dataclasses import dataclass

import matplotlib.pyplot as plt
import numpy as np
import pytest

from vecsim import config as cf
from vecsim import power as pw
from vecsim.delays import PhysicalParams
from vecsim.engine import Scenario, SchemeKind, brute_force_best_response, replay_record, run
from vecsim.learning import OFFLOAD, boltzmann_gibbs
from vecsim.metrics import ccdf, entropic_risk, summarize, tail_crossing
from vecsim.report import build_ccdf_figure, render_rho_sweep
from vecsim.sweep import CellResult, emit_outputs, preflight_output_dir

ITERATIONS = 10_000
WINDOW = 5_000
SEEDS_FIVE = (0, 1, 2, 3, 4)
SEEDS_THREE = (0, 1, 2)  # replicate count where the criteria leave it open
MASTER_BASE = 1000
GEO_BASE = 500


@dataclass
class RunStats:
    mean: float
    std: float
    variance: float
    tail: np.ndarray
    offload_fraction: float
    policy_offload: np.ndarray | None


class Runner:
    """Session-wide cache of full-scale runs keyed by cell and replicate."""

    def __init__(self):
        self._scenarios: dict = {}
        self._stats: dict = {}

    def scenario(self, num_vues: int, replicate: int) -> Scenario:
        key = (num_vues, replicate)
        if key not in self._scenarios:
            self._scenarios[key] = Scenario.build(
                num_vues=num_vues, geometry_seed=GEO_BASE + replicate
            )
        return self._scenarios[key]

    def get(self, scheme: SchemeKind, rho: float, num_vues: int, replicate: int) -> RunStats:
        key = (scheme.value, rho, num_vues, replicate)
        if key not in self._stats:
            result = run(
                self.scenario(num_vues, replicate),
                scheme,
                iterations=ITERATIONS,
                master_seed=MASTER_BASE + replicate,
                rho=rho,
                record_stride=0,
            )
            tail = result.pooled_tail_delays(WINDOW)
            pol = None
            if result.population is not None:
                pol = result.population.policy[:, :, OFFLOAD].copy()
            self._stats[key] = RunStats(
                mean=float(tail.mean()),
                std=float(tail.std()),
                variance=float(tail.var()),
                tail=tail,
                offload_fraction=float(result.actions.mean()),
                policy_offload=pol,
            )
        return self._stats[key]

    def seed_avg(self, scheme, rho, num_vues, replicates):
        stats = [self.get(scheme, rho, num_vues, r) for r in replicates]
        return (
            float(np.mean([s.mean for s in stats])),
            float(np.mean([s.std for s in stats])),
            float(np.mean([s.variance for s in stats])),
        )


@pytest.fixture(scope="session")
def runner():
    return Runner()


def check(criterion: str, failures: list[str], detail: str):
    status = "PASS" if not failures else "FAIL"
    print(f"\nACCEPTANCE {criterion}: {status} -- {detail}")
    for f in failures:
        print(f"  violation: {f}")
    assert not failures, f"{criterion}: {failures}"


RHO_GRID = (5.0, 15.0, 30.0, 60.0)


def test_criterion_1_rho_monotonicity(runner):
    means, stds = [], []
    for rho in RHO_GRID:
        m, s, _ = runner.seed_avg(SchemeKind.PROPOSED, rho, 60, SEEDS_FIVE)
        means.append(m)
        stds.append(s)

    failures = []
    slack_used = 0
    for i in range(len(RHO_GRID) - 1):
        if stds[i + 1] > stds[i]:  # std must be non-increasing
            rel = (stds[i + 1] - stds[i]) / stds[i]
            slack_used += 1
            if rel > 0.02:
                failures.append(f"std rose {rel:.1%} from rho={RHO_GRID[i]:g} to {RHO_GRID[i+1]:g}")
        if means[i + 1] < means[i]:  # mean must be non-decreasing
            rel = (means[i] - means[i + 1]) / means[i]
            slack_used += 1
            if rel > 0.02:
                failures.append(f"mean fell {rel:.1%} from rho={RHO_GRID[i]:g} to {RHO_GRID[i+1]:g}")
    if slack_used > 1:
        failures.append(f"{slack_used} adjacent-pair violations (at most one allowed)")
    check(
        "CRITERION 1 (rho monotonicity)",
        failures,
        "means=" + str([f"{m:.5f}" for m in means]) + " stds=" + str([f"{s:.5f}" for s in stds]),
    )


def test_criterion_2_variance_reduction(runner):
    failures = []
    reductions = []
    for r in SEEDS_FIVE:
        prop = runner.get(SchemeKind.PROPOSED, 30.0, 60, r)
        avg = runner.get(SchemeKind.AVERAGE_BASED, 30.0, 60, r)
        if not prop.variance < avg.variance:
            failures.append(f"replicate {r}: proposed var {prop.variance:.3e} >= average {avg.variance:.3e}")
        reductions.append((avg.variance - prop.variance) / avg.variance)
    mean_reduction = float(np.mean(reductions))
    if mean_reduction < 0.20:
        failures.append(f"mean variance reduction {mean_reduction:.1%} < 20%")
    check(
        "CRITERION 2 (variance reduction vs average-based)",
        failures,
        f"per-pair reductions={[f'{x:.1%}' for x in reductions]}, mean={mean_reduction:.1%}",
    )


def test_criterion_3_ccdf_tail(runner):
    pooled = {}
    for label, scheme, rho in (
        ("avg", SchemeKind.AVERAGE_BASED, 30.0),
        ("p5", SchemeKind.PROPOSED, 5.0),
        ("p30", SchemeKind.PROPOSED, 30.0),
        ("p60", SchemeKind.PROPOSED, 60.0),
    ):
        tails = [runner.get(scheme, rho, 60, r).tail for r in SEEDS_FIVE]
        pooled[label] = ccdf(np.concatenate(tails))

    failures = []
    # Threshold where the average-based curve first reaches the 1e-2 level;
    # proposed must already sit strictly below that level there. (The
    # average-based curve can step far past 1e-2 in one jump, so the level,
    # not the post-jump value, is the comparison point.)
    x1 = tail_crossing(pooled["avg"], 1e-2)
    avg_at = pooled["avg"].at(x1)
    prop_at = pooled["p30"].at(x1)
    if not prop_at < 1e-2:
        failures.append(f"proposed rho=30 CCDF {prop_at:.3e} not strictly below 1e-2 at x={x1:.4f}")
    c60 = tail_crossing(pooled["p60"], 1e-2)
    c5 = tail_crossing(pooled["p5"], 1e-2)
    if not c60 < c5:
        failures.append(f"rho=60 crossing {c60:.4f}s not below rho=5 crossing {c5:.4f}s")
    check(
        "CRITERION 3 (CCDF tail steepening)",
        failures,
        f"avg 1e-2 at {x1:.4f}s: proposed30 CCDF {prop_at:.3e} (avg {avg_at:.3e}); "
        f"1e-2 crossings rho60={c60:.4f}s rho5={c5:.4f}s",
    )


def test_criterion_4_density_comparison(runner):
    densities = (10, 30, 60)
    schemes = {
        "proposed": SchemeKind.PROPOSED,
        "average_based": SchemeKind.AVERAGE_BASED,
        "fully_fetching": SchemeKind.FULLY_FETCHING,
        "fully_offloading": SchemeKind.FULLY_OFFLOADING,
        "half_half": SchemeKind.HALF_HALF,
    }
    mean = {}
    std = {}
    for v in densities:
        for name, kind in schemes.items():
            m, s, _ = runner.seed_avg(kind, 30.0, v, SEEDS_THREE)
            mean[name, v] = m
            std[name, v] = s

    failures = []
    for v in densities:
        others = [n for n in schemes if n != "fully_fetching"]
        if not all(mean["fully_fetching", v] > mean[o, v] for o in others):
            failures.append(f"(a) fully_fetching mean not highest at V={v}")
        bad = [o for o in others if std["fully_fetching", v] > 0.10 * std[o, v]]
        if bad:
            failures.append(
                f"(a) fully_fetching std {std['fully_fetching', v]:.2e} exceeds 10% of {bad} at V={v}: "
                + str([f"{std[o, v]:.2e}" for o in bad])
            )
        hh_others = [n for n in schemes if n != "half_half"]
        if not all(std["half_half", v] > std[o, v] for o in hh_others):
            failures.append(f"(b) half_half std not highest at V={v}")
    gap10 = abs(mean["proposed", 10] - mean["fully_offloading", 10]) / mean["fully_offloading", 10]
    if gap10 > 0.05:
        failures.append(f"(c) V=10 proposed mean {mean['proposed', 10]:.5f} not within 5% of "
                        f"fully_offloading {mean['fully_offloading', 10]:.5f} (gap {gap10:.1%})")
    if not mean["proposed", 60] < mean["fully_offloading", 60]:
        failures.append(f"(d) V=60 proposed mean {mean['proposed', 60]:.5f} not below "
                        f"fully_offloading {mean['fully_offloading', 60]:.5f}")
    detail = "; ".join(
        f"V={v}: " + " ".join(f"{n}={mean[n, v]:.4f}/{std[n, v]:.4f}" for n in schemes)
        for v in densities
    )
    check("CRITERION 4 (density comparison, mean/std)", failures, detail)


def test_criterion_5_power_solver_correctness():
    rng = np.random.default_rng(77)
    failures = []
    grid = np.linspace(1e-6, 1 - 1e-6, 10_000)
    sizes = list(rng.integers(1, 61, size=90)) + [2] * 10  # ensure grid-oracle coverage
    for i, n in enumerate(sizes):
        n = int(n)
        rho = float(rng.choice([5.0, 30.0]))
        base = rng.uniform(2.0, 7.0)  # kappa spans 4 orders of magnitude
        kappa = 10 ** rng.uniform(base, base + 4.0, size=n)
        prob = pw.AllocationProblem(
            pw.AllocationKind.RISK_SENSITIVE, kappa, 1.0,
            delay_scale=60e3 * n * math.log(2) / 20e6, rho=rho,
        )
        alloc = pw.solve_allocation(prob)
        if alloc.kkt_residual > 1e-6 and n > 1:
            failures.append(f"problem {i}: residual {alloc.kkt_residual:.2e}")
        if abs(alloc.powers_w.sum() - 1.0) > 1e-9:
            failures.append(f"problem {i}: budget error {alloc.powers_w.sum() - 1.0:.2e}")
        obj = pw.objective_value(alloc.powers_w, prob)
        if obj > pw.objective_value(np.full(n, 1.0 / n), prob) * (1 + 1e-12):
            failures.append(f"problem {i}: worse than equal split")
        rand = rng.dirichlet(np.ones(n), size=1000)
        rand_best = min(pw.objective_value(p, prob) for p in rand)
        if obj > rand_best * (1 + 1e-12):
            failures.append(f"problem {i}: worse than a random feasible point")
        if n == 2:
            gobj = np.exp(prob.theta / np.log1p(grid * kappa[0])) + np.exp(
                prob.theta / np.log1p((1 - grid) * kappa[1])
            )
            best = grid[int(np.argmin(gobj))]
            if abs(alloc.powers_w[0] - best) > 1e-4:
                failures.append(f"problem {i}: grid-oracle gap {abs(alloc.powers_w[0] - best):.2e} W")
    check("CRITERION 5 (power-solver correctness)", failures, f"{len(sizes)} random problems")


def test_criterion_6_small_instance_stability():
    params = PhysicalParams(num_cameras=1)
    scenario = Scenario.build(2, params=params, geometry_seed=GEO_BASE)
    result = run(scenario, SchemeKind.PROPOSED, ITERATIONS, master_seed=MASTER_BASE,
                 rho=30.0, record_stride=0)
    policies = result.population.policy

    failures = []
    checked = 0
    for vue in (0, 1):
        br = brute_force_best_response(scenario, vue, policies, rho=30.0)
        for s in range(scenario.num_states):
            risks = br.expected_risk[s]
            gap = abs(risks[0] - risks[1]) / min(risks)
            if gap < 0.05:
                continue
            checked += 1
            mass = policies[vue, s, int(br.best_action[s])]
            if mass < 0.9:
                failures.append(
                    f"vue {vue} state {s}: mass {mass:.3f} on best action "
                    f"{int(br.best_action[s])} (gap {gap:.1%})"
                )
    check(
        "CRITERION 6 (small-instance stability oracle)",
        failures,
        f"{checked} decisive states checked across both VUEs",
    )


def test_criterion_7_invariant_suites(runner, tmp_path):
    failures = []
    rng = np.random.default_rng(3)

    # policy normalization after a learning run
    pol = runner.get(SchemeKind.PROPOSED, 30.0, 60, 0).policy_offload
    if not np.all((pol >= 0) & (pol <= 1)):
        failures.append("policy probabilities left [0, 1]")
    scenario = Scenario.build(4, geometry_seed=9)
    small = run(scenario, SchemeKind.PROPOSED, 500, master_seed=4, record_stride=0)
    sums = small.population.policy.sum(axis=2)
    if not np.all(np.abs(sums - 1.0) <= 1e-12):
        failures.append(f"policy rows deviate from 1 by {np.abs(sums - 1.0).max():.2e}")

    # quantizer mean preservation
    q = scenario.quantizer
    if abs(0.5 * q.low_multiplier + 0.5 * q.high_multiplier - 1.0) > 1e-12:
        failures.append("quantizer does not preserve unit mean fading power")

    # Jensen: entropic risk >= mean
    for _ in range(20):
        x = rng.exponential(0.05, size=300)
        if entropic_risk(x, 30.0) < float(np.mean(x)) - 1e-12:
            failures.append("Jensen inequality violated")
            break

    # CCDF monotonicity
    curve = ccdf(rng.lognormal(-3, 0.5, size=5000))
    if not (np.all(np.diff(curve.exceedances) < 0) and curve.exceedances[-1] == 0.0):
        failures.append("CCDF not decreasing to zero")

    # convexity second difference of the power objective term
    for _ in range(100):
        kappa = 10 ** rng.uniform(2, 7)
        theta = 10 ** rng.uniform(-2, 1)
        p1, p2 = 10 ** rng.uniform(-4, 0, size=2)
        f = lambda p: math.exp(min(theta / math.log1p(p * kappa), 700.0))
        if f(p1) + f(p2) - 2 * f(0.5 * (p1 + p2)) < -1e-9:
            failures.append("power objective term failed midpoint convexity")
            break

    # Boltzmann-Gibbs optimality of the entropy-regularized objective
    def bg_objective(p, rpos, xi):
        p = np.clip(p, 1e-300, 1.0)
        return float(np.sum(p * rpos) - np.sum(p * np.log(p)) / xi)

    for xi in (1.0, 10.0):
        for _ in range(20):
            row = rng.normal(scale=2.0, size=2)
            rpos = np.maximum(row, 0.0)
            best = bg_objective(boltzmann_gibbs(row, xi), rpos, xi)
            candidates = [np.array([q, 1 - q]) for q in rng.uniform(0, 1, size=200)]
            candidates += [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
            if any(best < bg_objective(c, rpos, xi) - 1e-9 for c in candidates):
                failures.append("Boltzmann-Gibbs distribution not optimal")
                break

    # replayability: stored records recompute bit-exactly
    rec_run = run(scenario, SchemeKind.PROPOSED, 60, master_seed=4, record_stride=1)
    for rec in rec_run.records[::13]:
        redo = replay_record(scenario, SchemeKind.PROPOSED, 30.0, rec)
        if not np.array_equal(redo.e2e_s, rec.e2e_s):
            failures.append("replay mismatch")
            break

    # determinism: same seed, bit-identical streams
    again = run(scenario, SchemeKind.PROPOSED, 60, master_seed=4, record_stride=1)
    if not (np.array_equal(again.e2e_s, rec_run.e2e_s) and np.array_equal(again.actions, rec_run.actions)):
        failures.append("same-seed rerun not bit-identical")

    check("CRITERION 7 (invariant suites)", failures, "eight invariant families checked")


def test_report_path_renders_figures(runner, tmp_path):
    # The library's report path consumes the criterion-1/3 artifacts: emit
    # them as CSVs, then render the rho-sweep and CCDF figures.
    config = cf.ExperimentConfig(
        schemes=("proposed",),
        rho_values=RHO_GRID,
        vue_counts=(60,),
        iterations=ITERATIONS,
        stats_window=WINDOW,
        master_seed=MASTER_BASE,
        output_dir=str(tmp_path / "report"),
    )
    out_dir = preflight_output_dir(config)
    cells = []
    for rho in RHO_GRID:
        stats = runner.get(SchemeKind.PROPOSED, rho, 60, 0)
        cells.append(
            CellResult(
                scheme="proposed", rho=rho, num_vues=60,
                summary=summarize(stats.tail, rho), curve=ccdf(stats.tail),
            )
        )
    emit_outputs(cells, config, out_dir)

    fig_path = render_rho_sweep(out_dir / "summary.csv", out_dir / "fig_rho.png")
    assert fig_path.exists() and fig_path.stat().st_size > 0

    ccdf_files = sorted(out_dir.glob("ccdf_*.csv"))
    fig, ax = build_ccdf_figure(ccdf_files)
    lo, hi = ax.get_ylim()
    plt.close(fig)
    failures = []
    if not (lo <= 1e-2 and hi >= 1.0):
        failures.append(f"ccdf exceedance axis [{lo:.3g}, {hi:.3g}] does not span [1e-2, 1]")
    check("FIGURE REPORT PATH (criterion 8 surface)", failures,
          f"rho-sweep + ccdf rendered; ccdf y-range [{lo:.3g}, {hi:.3g}]")
