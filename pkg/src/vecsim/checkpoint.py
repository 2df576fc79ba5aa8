"""Checkpoint files for learner tables.

Layout (JSON): top-level metadata (scheme, rho, iterations, master_seed,
num_vues, num_states) plus a `vues` list. Each entry carries `vue_id` and
the three tables as nested lists indexed [state][action], with action 0 =
fetch and action 1 = offload:

    {"vue_id": 0,
     "utility_estimates": [[u_fetch, u_offload], ...],
     "regret_estimates":  [[r_fetch, r_offload], ...],
     "policy":            [[p_fetch, p_offload], ...]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .engine import RunResult
from .learning import AgentPopulation

SCHEMA = "vecsim-checkpoint-v1"


@dataclass
class Checkpoint:
    scheme: str
    rho: float
    iterations: int
    master_seed: int
    population: AgentPopulation

    @property
    def num_vues(self) -> int:
        return self.population.num_vues

    @property
    def num_states(self) -> int:
        return self.population.num_states


def save_checkpoint(result: RunResult, path: str | Path) -> None:
    """Write a learning run's final tables; resumable and inspectable."""
    if result.population is None:
        raise ValueError(f"scheme {result.scheme.value} keeps no learner tables")
    pop = result.population
    payload = {
        "schema": SCHEMA,
        "scheme": result.scheme.value,
        "rho": result.rho,
        "iterations": result.iterations,
        "master_seed": result.master_seed,
        "num_vues": pop.num_vues,
        "num_states": pop.num_states,
        "vues": [
            {
                "vue_id": v,
                "utility_estimates": pop.utility_estimates[v].tolist(),
                "regret_estimates": pop.regret_estimates[v].tolist(),
                "policy": pop.policy[v].tolist(),
            }
            for v in range(pop.num_vues)
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=1) + "\n")


def load_checkpoint(path: str | Path) -> Checkpoint:
    data = json.loads(Path(path).read_text())
    if data.get("schema") != SCHEMA:
        raise ValueError(f"not a {SCHEMA} file: {path}")
    pop = AgentPopulation(data["num_vues"], data["num_states"])
    for entry in data["vues"]:
        v = entry["vue_id"]
        pop.utility_estimates[v] = np.asarray(entry["utility_estimates"])
        pop.regret_estimates[v] = np.asarray(entry["regret_estimates"])
        pop.policy[v] = np.asarray(entry["policy"])
    return Checkpoint(
        scheme=data["scheme"],
        rho=data["rho"],
        iterations=data["iterations"],
        master_seed=data["master_seed"],
        population=pop,
    )


def format_policy(cp: Checkpoint, max_vues: int | None = None) -> str:
    """Human-readable per-state offload probabilities for inspection."""
    lines = [
        f"scheme={cp.scheme} rho={cp.rho:g} iterations={cp.iterations} "
        f"seed={cp.master_seed} vues={cp.num_vues} states={cp.num_states}",
        "",
    ]
    pop = cp.population
    shown = cp.num_vues if max_vues is None else min(max_vues, cp.num_vues)
    header = "state | " + " ".join(f"vue{v:<4d}" for v in range(shown))
    lines.append("P(offload | state):")
    lines.append(header)
    for s in range(cp.num_states):
        row = " ".join(f"{pop.policy[v, s, 1]:.5f}" for v in range(shown))
        lines.append(f"{s:5d} | {row}")
    if shown < cp.num_vues:
        lines.append(f"... ({cp.num_vues - shown} more VUEs)")
    return "\n".join(lines)
