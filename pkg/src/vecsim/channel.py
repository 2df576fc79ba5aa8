"""Wireless channel model: path loss, two-level quantized Rayleigh fading,
scenario geometry, and per-iteration channel sampling.

Every link gain is the product of a static distance-based path loss and a
fading power multiplier. Fading power is unit-mean exponential (Rayleigh
amplitude with unit variance) and is quantized into two levels at the median
ln(2); each level carries its conditional-mean multiplier (1 - ln2 for Low,
1 + ln2 for High), which preserves the unit mean exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Path loss model: 68.5 + 16.1*log10(d) dB, d in meters.
PATH_LOSS_INTERCEPT_DB = 68.5
PATH_LOSS_SLOPE_DB = 16.1

DISTANCE_MIN_M = 1.0
DISTANCE_MAX_M = 100.0

LOW = 0
HIGH = 1

# Seed-stream purposes (spawn keys off the run master seed).
STREAM_CHANNEL = 0
STREAM_ACTION = 1


def path_loss_linear(distance_m: float) -> float:
    """Linear power gain of the distance-based path loss.

    Raises ValueError outside the supported range [1, 100] m.
    """
    d = np.asarray(distance_m, dtype=float)
    if np.any(d < DISTANCE_MIN_M) or np.any(d > DISTANCE_MAX_M):
        raise ValueError(f"distance must be in [{DISTANCE_MIN_M}, {DISTANCE_MAX_M}] m, got {distance_m}")
    loss_db = PATH_LOSS_INTERCEPT_DB + PATH_LOSS_SLOPE_DB * np.log10(d)
    out = 10.0 ** (-loss_db / 10.0)
    return float(out) if np.isscalar(distance_m) else out


@dataclass(frozen=True)
class FadingQuantizer:
    """Two-level quantizer for the exponential fading power.

    Ties at the threshold map to High. Representative multipliers default to
    the conditional means of the unit-mean exponential on each side of the
    median, so P(Low)*low + P(High)*high == 1 exactly.
    """

    threshold: float = math.log(2.0)
    low_multiplier: float = 1.0 - math.log(2.0)
    high_multiplier: float = 1.0 + math.log(2.0)

    def __post_init__(self):
        if self.threshold <= 0:
            raise ValueError("quantizer threshold must be > 0")
        if not (0 < self.low_multiplier < self.high_multiplier):
            raise ValueError("need 0 < low_multiplier < high_multiplier")

    def quantize(self, raw_fading_power) -> int:
        """Map a raw fading power draw to LOW or HIGH."""
        g = np.asarray(raw_fading_power, dtype=float)
        if np.any(g < 0):
            raise ValueError("fading power must be >= 0")
        level = (g >= self.threshold).astype(np.int8)
        return int(level) if np.isscalar(raw_fading_power) else level

    def multiplier(self, level) -> float:
        lv = np.asarray(level)
        out = np.where(lv == HIGH, self.high_multiplier, self.low_multiplier)
        return float(out) if np.isscalar(level) else out

    def mean_multiplier(self) -> float:
        """Mean fading power under equiprobable levels (should be 1)."""
        return 0.5 * self.low_multiplier + 0.5 * self.high_multiplier


@dataclass(frozen=True)
class Geometry:
    """Static per-VUE distances: columns 0..C-1 are camera links, column C is
    the server link. Frozen for the lifetime of a scenario."""

    distances_m: np.ndarray  # shape (V, C+1)

    def __post_init__(self):
        d = np.asarray(self.distances_m, dtype=float)
        if d.ndim != 2 or d.shape[1] < 2:
            raise ValueError("distances must be (V, C+1) with C >= 1")
        if np.any(d < DISTANCE_MIN_M) or np.any(d > DISTANCE_MAX_M):
            raise ValueError("all distances must lie in [1, 100] m")
        object.__setattr__(self, "distances_m", d)

    @property
    def num_vues(self) -> int:
        return self.distances_m.shape[0]

    @property
    def num_cameras(self) -> int:
        return self.distances_m.shape[1] - 1

    @staticmethod
    def sample(num_vues: int, num_cameras: int, geometry_seed: int) -> "Geometry":
        """Draw each distance independently and uniformly from [1, 100] m."""
        rng = np.random.default_rng(np.random.SeedSequence(geometry_seed))
        d = rng.uniform(DISTANCE_MIN_M, DISTANCE_MAX_M, size=(num_vues, num_cameras + 1))
        return Geometry(d)


@dataclass(frozen=True)
class ChannelVector:
    """One VUE's realized linear link gains for a single iteration."""

    camera_gains: np.ndarray  # (C,)
    server_gain: float
    levels: np.ndarray  # (C+1,) int8, LOW/HIGH per link, server last

    @property
    def gains(self) -> np.ndarray:
        return np.append(self.camera_gains, self.server_gain)


def state_index(levels) -> int:
    """Bit-encode the C+1 Low/High flags; camera j contributes bit j, the
    server link contributes bit C."""
    lv = np.asarray(levels, dtype=np.int64)
    weights = 1 << np.arange(lv.shape[-1], dtype=np.int64)
    return int(lv @ weights) if lv.ndim == 1 else lv @ weights


def index_to_levels(index: int, num_links: int) -> np.ndarray:
    """Inverse of state_index."""
    return ((index >> np.arange(num_links)) & 1).astype(np.int8)


def num_states(num_cameras: int) -> int:
    return 1 << (num_cameras + 1)


def fading_from_uniform(u: np.ndarray) -> np.ndarray:
    """Inverse-CDF transform to unit-mean exponential fading power.

    Each draw consumes exactly one uniform, which keeps per-iteration stream
    positions addressable (iteration t occupies uniforms [t*(C+1), (t+1)*(C+1))
    of a VUE's channel substream).
    """
    return -np.log1p(-u)


def channel_stream(master_seed: int, vue_id: int) -> np.random.Generator:
    """The per-VUE channel sampling substream."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(STREAM_CHANNEL, vue_id)))


def action_stream(master_seed: int, vue_id: int) -> np.random.Generator:
    """The per-VUE action sampling substream."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(STREAM_ACTION, vue_id)))


def sample_channel_vector(
    geometry: Geometry,
    quantizer: FadingQuantizer,
    vue_id: int,
    rng: np.random.Generator,
) -> ChannelVector:
    """Draw one iteration's channel vector for a VUE.

    Consumes exactly C+1 uniforms from `rng`, quantizes the implied fading
    powers, and multiplies the per-link path loss by the level multipliers.
    """
    n_links = geometry.num_cameras + 1
    u = rng.random(n_links)
    g = fading_from_uniform(u)
    levels = quantizer.quantize(g)
    mult = quantizer.multiplier(levels)
    gains = path_loss_linear(geometry.distances_m[vue_id]) * mult
    return ChannelVector(camera_gains=gains[:-1], server_gain=float(gains[-1]), levels=levels)


@dataclass
class ChannelRealizations:
    """Bulk-sampled channel realizations for a whole run.

    gains[t, v, l] is VUE v's linear gain on link l at iteration t (server
    link last); states[t, v] is the matching index into the finite state set.
    """

    gains: np.ndarray  # (T, V, C+1)
    levels: np.ndarray  # (T, V, C+1) int8
    states: np.ndarray  # (T, V) int64
    path_loss: np.ndarray = field(repr=False, default=None)  # (V, C+1)


def sample_run_channels(
    geometry: Geometry,
    quantizer: FadingQuantizer,
    iterations: int,
    master_seed: int,
) -> ChannelRealizations:
    """Pre-sample every (iteration, VUE, link) channel draw for a run.

    Each VUE consumes its own substream; iteration t occupies a disjoint,
    position-addressable block of that substream (one uniform per link).
    """
    V = geometry.num_vues
    n_links = geometry.num_cameras + 1
    pl = path_loss_linear(geometry.distances_m)
    u = np.empty((iterations, V, n_links))
    for v in range(V):
        rng = channel_stream(master_seed, v)
        u[:, v, :] = rng.random((iterations, n_links))
    g = fading_from_uniform(u)
    levels = (g >= quantizer.threshold).astype(np.int8)
    mult = np.where(levels == HIGH, quantizer.high_multiplier, quantizer.low_multiplier)
    gains = pl[None, :, :] * mult
    weights = 1 << np.arange(n_links, dtype=np.int64)
    states = levels.astype(np.int64) @ weights
    return ChannelRealizations(gains=gains, levels=levels, states=states, path_loss=pl)
