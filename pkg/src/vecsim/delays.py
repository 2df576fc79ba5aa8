"""End-to-end delay model for one fetch/offload round.

A fetching VUE waits for every camera's broadcast (each camera transmits at
the rate supported by its worst fetcher link) and then synthesizes locally.
An offloading VUE waits for the server's shared compute pass and its own
downlink transmission. Rates use Shannon capacity over the allotted band.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LN2 = float(np.log(2.0))


class EmptyFetcherSet(ValueError):
    """Camera broadcast rate is undefined with no fetching VUEs."""


@dataclass(frozen=True)
class PhysicalParams:
    """All static physical constants of a scenario (SI units).

    Defaults follow the evaluated setup: 20 kbit camera images, 60 kbit
    synthesized images, 2339 cycle/bit processing density, four cameras,
    100 kHz camera bands, 20 MHz server band, 20 dBm camera power, 30 dBm
    server budget, -174 dBm/Hz noise density, 2e11 / 1e9 cycle/s CPUs.
    """

    camera_image_bits: float = 20e3
    synthesized_image_bits: float = 60e3
    processing_density: float = 2339.0  # cycle/bit
    num_cameras: int = 4
    camera_bandwidth_hz: float = 100e3
    server_bandwidth_hz: float = 20e6
    camera_power_w: float = 0.1  # 20 dBm
    server_power_budget_w: float = 1.0  # 30 dBm
    noise_psd_w_per_hz: float = 10.0 ** (-20.4)  # -174 dBm/Hz
    server_cpu_hz: float = 2e11
    vue_cpu_hz: float = 1e9

    def __post_init__(self):
        for name in (
            "camera_image_bits", "synthesized_image_bits", "processing_density",
            "num_cameras", "camera_bandwidth_hz", "server_bandwidth_hz",
            "camera_power_w", "server_power_budget_w", "noise_psd_w_per_hz",
            "server_cpu_hz", "vue_cpu_hz",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def task_cycles(self) -> float:
        """CPU cycles to synthesize one VUE's image set."""
        return self.num_cameras * self.camera_image_bits * self.processing_density


FETCH = 0
OFFLOAD = 1


@dataclass(frozen=True)
class DecisionProfile:
    """The global fetch/offload decision vector for one iteration."""

    actions: np.ndarray  # (V,) int8 in {FETCH, OFFLOAD}

    def __post_init__(self):
        a = np.asarray(self.actions, dtype=np.int8)
        if not np.all((a == FETCH) | (a == OFFLOAD)):
            raise ValueError("actions must be 0 (fetch) or 1 (offload)")
        object.__setattr__(self, "actions", a)

    @property
    def fetchers(self) -> np.ndarray:
        return np.flatnonzero(self.actions == FETCH)

    @property
    def offloaders(self) -> np.ndarray:
        return np.flatnonzero(self.actions == OFFLOAD)


@dataclass(frozen=True)
class DelayBreakdown:
    """Per-VUE delay components in seconds; branch-unused parts are 0."""

    fetch_transmission_s: float
    local_compute_s: float
    server_compute_s: float
    downlink_s: float
    e2e_s: float


def log2p1(x):
    """log2(1+x) via log1p, accurate at small SNR."""
    return np.log1p(x) / LN2


def camera_broadcast_rate(params: PhysicalParams, fetcher_gains) -> float:
    """Broadcast rate of one camera, limited by its worst fetcher link.

    `fetcher_gains` holds the gains of every fetching VUE on this camera.
    """
    g = np.asarray(fetcher_gains, dtype=float)
    if g.size == 0:
        raise EmptyFetcherSet("no fetching VUEs: camera broadcast rate undefined")
    h_min = g.min()
    snr = params.camera_power_w * h_min / (params.camera_bandwidth_hz * params.noise_psd_w_per_hz)
    return params.camera_bandwidth_hz * float(log2p1(snr))


def fetch_delay(params: PhysicalParams, camera_rates) -> float:
    """Wait for the slowest camera broadcast; shared by all fetchers."""
    r = np.asarray(camera_rates, dtype=float)
    if r.size == 0:
        raise EmptyFetcherSet("no camera rates given")
    if np.any(r <= 0):
        raise ValueError("camera rates must be > 0")
    return float(np.max(params.camera_image_bits / r))


def local_compute_delay(params: PhysicalParams, vue_cpu_hz: float | None = None) -> float:
    """Local synthesis time on the VUE CPU."""
    f = params.vue_cpu_hz if vue_cpu_hz is None else vue_cpu_hz
    return params.task_cycles / f


def server_compute_delay(params: PhysicalParams, num_offloaders: int) -> float:
    """Server synthesis time with the CPU split across offloaders."""
    if num_offloaders < 0:
        raise ValueError("num_offloaders must be >= 0")
    return params.task_cycles * num_offloaders / params.server_cpu_hz


def downlink_rate(params: PhysicalParams, power_w, server_gain, num_offloaders: int):
    """Downlink rate over the per-offloader share of the server band."""
    p = np.asarray(power_w, dtype=float)
    if np.any(p <= 0):
        raise ValueError("transmit power must be > 0")
    n = num_offloaders
    snr = p * np.asarray(server_gain) * n / (params.server_bandwidth_hz * params.noise_psd_w_per_hz)
    return (params.server_bandwidth_hz / n) * log2p1(snr)


def downlink_delay(params: PhysicalParams, power_w, server_gain, num_offloaders: int):
    """Downlink transmission time of the synthesized image."""
    r = downlink_rate(params, power_w, server_gain, num_offloaders)
    return params.synthesized_image_bits / r


def fetch_branch(params: PhysicalParams, fetch_tx_s: float, vue_cpu_hz: float | None = None) -> DelayBreakdown:
    local = local_compute_delay(params, vue_cpu_hz)
    return DelayBreakdown(
        fetch_transmission_s=fetch_tx_s,
        local_compute_s=local,
        server_compute_s=0.0,
        downlink_s=0.0,
        e2e_s=fetch_tx_s + local,
    )


def offload_branch(params: PhysicalParams, server_compute_s: float, downlink_s: float) -> DelayBreakdown:
    return DelayBreakdown(
        fetch_transmission_s=0.0,
        local_compute_s=0.0,
        server_compute_s=server_compute_s,
        downlink_s=downlink_s,
        e2e_s=server_compute_s + downlink_s,
    )


def e2e_delay(
    params: PhysicalParams,
    action: int,
    fetch_tx_s: float | None = None,
    server_compute_s: float | None = None,
    downlink_s: float | None = None,
) -> DelayBreakdown:
    """Assemble the E2E delay branch matching the VUE's decision."""
    if action == FETCH:
        if fetch_tx_s is None:
            raise ValueError("fetch branch needs the shared fetch transmission delay")
        return fetch_branch(params, fetch_tx_s)
    if action == OFFLOAD:
        if server_compute_s is None or downlink_s is None:
            raise ValueError("offload branch needs server compute and downlink delays")
        return offload_branch(params, server_compute_s, downlink_s)
    raise ValueError(f"unknown action {action}")
