"""Declarative experiment configuration: a single JSON file drives
validation, single runs, and sweeps.

The file has one `scenario` section (physical constants, geometry seed,
quantizer) plus the experiment axes: schemes, rho_values, vue_counts,
iterations, stats_window, master_seed, output_dir, record_stride,
temperature, and learning_rate_exponents. Field names are normative; see
README for the documented schema. Seeding is mandatory and explicit, never
wall-clock derived.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .channel import FadingQuantizer, Geometry
from .delays import PhysicalParams
from .engine import Scenario, SchemeKind
from .learning import LearningRates


@dataclass(frozen=True)
class QuantizerConfig:
    threshold: float = math.log(2.0)
    low_multiplier: float = 1.0 - math.log(2.0)
    high_multiplier: float = 1.0 + math.log(2.0)


@dataclass(frozen=True)
class ScenarioConfig:
    """Physical parameters plus the geometry seed and fading quantizer."""

    num_cameras: int = 4
    camera_image_bits: float = 20e3
    synthesized_image_bits: float = 60e3
    processing_density: float = 2339.0
    camera_bandwidth_hz: float = 100e3
    server_bandwidth_hz: float = 20e6
    camera_power_w: float = 0.1
    server_power_budget_w: float = 1.0
    noise_psd_w_per_hz: float = 10.0 ** (-20.4)
    server_cpu_hz: float = 2e11
    vue_cpu_hz: float = 1e9
    geometry_seed: int = 0
    quantizer: QuantizerConfig = field(default_factory=QuantizerConfig)

    def physical_params(self) -> PhysicalParams:
        return PhysicalParams(
            camera_image_bits=self.camera_image_bits,
            synthesized_image_bits=self.synthesized_image_bits,
            processing_density=self.processing_density,
            num_cameras=self.num_cameras,
            camera_bandwidth_hz=self.camera_bandwidth_hz,
            server_bandwidth_hz=self.server_bandwidth_hz,
            camera_power_w=self.camera_power_w,
            server_power_budget_w=self.server_power_budget_w,
            noise_psd_w_per_hz=self.noise_psd_w_per_hz,
            server_cpu_hz=self.server_cpu_hz,
            vue_cpu_hz=self.vue_cpu_hz,
        )

    def fading_quantizer(self) -> FadingQuantizer:
        return FadingQuantizer(
            threshold=self.quantizer.threshold,
            low_multiplier=self.quantizer.low_multiplier,
            high_multiplier=self.quantizer.high_multiplier,
        )

    def build_scenario(self, num_vues: int, seed_offset: int = 0) -> Scenario:
        """Materialize the frozen world for one VUE count.

        `seed_offset` shifts the geometry seed so replicate runs can draw
        fresh intersections while staying reproducible.
        """
        geometry = Geometry.sample(num_vues, self.num_cameras, self.geometry_seed + seed_offset)
        return Scenario(
            params=self.physical_params(),
            geometry=geometry,
            quantizer=self.fading_quantizer(),
        )


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment file: scenario plus the sweep axes."""

    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    schemes: tuple[str, ...] = ("proposed",)
    rho_values: tuple[float, ...] = (30.0,)
    vue_counts: tuple[int, ...] = (60,)
    iterations: int = 10000
    stats_window: int = 5000
    master_seed: int = 1
    output_dir: str = "out"
    record_stride: int = 1
    temperature: float = 10.0
    learning_rate_exponents: tuple[float, float, float] = (0.51, 0.52, 0.53)

    def learning_rates(self) -> LearningRates:
        a_u, a_r, a_pi = self.learning_rate_exponents
        return LearningRates(a_u, a_r, a_pi)

    def scheme_kinds(self) -> list[SchemeKind]:
        return [SchemeKind(s) for s in self.schemes]

    def cells(self) -> list[tuple[str, float, int]]:
        """Sweep cells in deterministic (scheme, rho, V) lexicographic order."""
        out = [
            (scheme, rho, v)
            for scheme in self.schemes
            for rho in self.rho_values
            for v in self.vue_counts
        ]
        return sorted(out)


@dataclass(frozen=True)
class ConfigIssue:
    """One validation violation: where and why."""

    field_path: str
    reason: str

    def __str__(self):
        return f"{self.field_path}: {self.reason}"


def validate(config: ExperimentConfig) -> list[ConfigIssue]:
    """Collect every violation at once; an empty list means valid."""
    issues: list[ConfigIssue] = []
    sc = config.scenario

    positive_fields = [
        "camera_image_bits", "synthesized_image_bits", "processing_density",
        "camera_bandwidth_hz", "server_bandwidth_hz", "camera_power_w",
        "server_power_budget_w", "noise_psd_w_per_hz", "server_cpu_hz", "vue_cpu_hz",
    ]
    for name in positive_fields:
        if getattr(sc, name) <= 0:
            issues.append(ConfigIssue(f"scenario.{name}", "must be strictly positive"))
    if sc.num_cameras < 1:
        issues.append(ConfigIssue("scenario.num_cameras", "need at least one camera"))
    q = sc.quantizer
    if q.threshold <= 0:
        issues.append(ConfigIssue("scenario.quantizer.threshold", "must be > 0"))
    if not (0 < q.low_multiplier < q.high_multiplier):
        issues.append(
            ConfigIssue("scenario.quantizer", "need 0 < low_multiplier < high_multiplier")
        )

    if not config.schemes:
        issues.append(ConfigIssue("schemes", "at least one scheme required"))
    valid_names = {k.value for k in SchemeKind}
    for i, s in enumerate(config.schemes):
        if s not in valid_names:
            issues.append(ConfigIssue(f"schemes[{i}]", f"unknown scheme {s!r}; valid: {sorted(valid_names)}"))

    if not config.rho_values:
        issues.append(ConfigIssue("rho_values", "at least one rho required"))
    for i, rho in enumerate(config.rho_values):
        if rho <= 0:
            issues.append(ConfigIssue(f"rho_values[{i}]", "rho must be strictly positive"))

    if not config.vue_counts:
        issues.append(ConfigIssue("vue_counts", "at least one VUE count required"))
    for i, v in enumerate(config.vue_counts):
        if v < 1:
            issues.append(ConfigIssue(f"vue_counts[{i}]", "VUE count must be >= 1"))

    if config.iterations < 0:
        issues.append(ConfigIssue("iterations", "must be >= 0"))
    if config.stats_window < 1:
        issues.append(ConfigIssue("stats_window", "must be >= 1"))
    if config.record_stride < 0:
        issues.append(ConfigIssue("record_stride", "must be >= 0 (0 disables detailed records)"))
    if config.temperature <= 0:
        issues.append(ConfigIssue("temperature", "must be strictly positive"))
    if not isinstance(config.master_seed, int):
        issues.append(ConfigIssue("master_seed", "must be an integer (seeding is mandatory)"))

    exps = config.learning_rate_exponents
    if len(exps) != 3:
        issues.append(ConfigIssue("learning_rate_exponents", "need exactly three exponents"))
    else:
        a_u, a_r, a_pi = exps
        if not (0.5 < a_u < a_r < a_pi <= 1.0):
            issues.append(
                ConfigIssue(
                    "learning_rate_exponents",
                    f"must satisfy 0.5 < a_u < a_r < a_pi <= 1, got ({a_u}, {a_r}, {a_pi})",
                )
            )
    return issues


class ConfigError(ValueError):
    """Raised when a config file cannot be parsed or fails validation."""

    def __init__(self, issues: list[ConfigIssue]):
        super().__init__("; ".join(str(i) for i in issues))
        self.issues = issues


def to_dict(config: ExperimentConfig) -> dict:
    d = asdict(config)
    d["schemes"] = list(config.schemes)
    d["rho_values"] = list(config.rho_values)
    d["vue_counts"] = list(config.vue_counts)
    d["learning_rate_exponents"] = list(config.learning_rate_exponents)
    return d


def from_dict(data: dict) -> ExperimentConfig:
    data = dict(data)
    sc_data = dict(data.pop("scenario", {}))
    q_data = dict(sc_data.pop("quantizer", {}))
    known_q = {f for f in QuantizerConfig.__dataclass_fields__}
    unknown = set(q_data) - known_q
    if unknown:
        raise ConfigError([ConfigIssue(f"scenario.quantizer.{k}", "unknown field") for k in sorted(unknown)])
    quantizer = QuantizerConfig(**q_data)
    known_sc = {f for f in ScenarioConfig.__dataclass_fields__} - {"quantizer"}
    unknown = set(sc_data) - known_sc
    if unknown:
        raise ConfigError([ConfigIssue(f"scenario.{k}", "unknown field") for k in sorted(unknown)])
    scenario = ScenarioConfig(quantizer=quantizer, **sc_data)

    known = {f for f in ExperimentConfig.__dataclass_fields__} - {"scenario"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError([ConfigIssue(k, "unknown field") for k in sorted(unknown)])
    for key in ("schemes", "rho_values", "vue_counts", "learning_rate_exponents"):
        if key in data:
            data[key] = tuple(data[key])
    return ExperimentConfig(scenario=scenario, **data)


def load(path: str | Path) -> ExperimentConfig:
    """Parse a config file; raises ConfigError on malformed input."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ConfigError([ConfigIssue(str(path), f"not valid JSON: {e}")]) from e
    if not isinstance(data, dict):
        raise ConfigError([ConfigIssue(str(path), "top level must be a JSON object")])
    return from_dict(data)


def save(config: ExperimentConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(to_dict(config), indent=2) + "\n")
