import math

import numpy as np
import pytest

from vecsim import delays as dl

P = dl.PhysicalParams()
N0 = 10.0 ** (-20.4)


class TestParams:
    def test_defaults_match_setup(self):
        assert P.camera_image_bits == 20e3
        assert P.synthesized_image_bits == 60e3
        assert P.processing_density == 2339.0
        assert P.camera_power_w == pytest.approx(0.1)  # 20 dBm
        assert P.server_power_budget_w == pytest.approx(1.0)  # 30 dBm
        assert P.noise_psd_w_per_hz == pytest.approx(N0, rel=1e-15)  # -174 dBm/Hz
        assert P.task_cycles == pytest.approx(4 * 20e3 * 2339.0)

    def test_positivity_enforced(self):
        with pytest.raises(ValueError):
            dl.PhysicalParams(camera_bandwidth_hz=0.0)


class TestCameraBroadcast:
    def test_single_fetcher_far_low(self):
        # d = 100 m, Low fading: h = 10^-10.07 * (1 - ln2)
        h = 10 ** -10.07 * (1 - math.log(2))
        rate = dl.camera_broadcast_rate(P, [h])
        snr = 0.1 * h / (1e5 * N0)
        expected = 1e5 * math.log2(1 + snr)
        assert rate == pytest.approx(expected, rel=1e-12)
        assert snr == pytest.approx(6561, rel=2e-4)
        assert rate == pytest.approx(1.268e6, rel=1e-3)

    def test_min_rule(self):
        slow = dl.camera_broadcast_rate(P, [1e-10, 1e-11])
        assert slow == dl.camera_broadcast_rate(P, [1e-11])

    def test_rate_grows_and_delay_shrinks_with_gain(self):
        rates = [dl.camera_broadcast_rate(P, [h]) for h in (1e-11, 1e-8, 1e-2, 1e10)]
        assert all(a < b for a, b in zip(rates, rates[1:]))
        delays = [dl.fetch_delay(P, [r]) for r in rates]
        assert all(a > b for a, b in zip(delays, delays[1:]))
        assert delays[-1] < delays[0] / 4  # T -> 0 as the gain diverges

    def test_empty_fetchers_rejected(self):
        with pytest.raises(dl.EmptyFetcherSet):
            dl.camera_broadcast_rate(P, [])


class TestFetchDelay:
    def test_max_rule(self):
        t = dl.fetch_delay(P, [1.268e6, 2e6, 2e6, 2e6])
        assert t == pytest.approx(20e3 / 1.268e6, rel=1e-12)
        assert t == pytest.approx(0.01577, rel=1e-3)

    def test_uniform_rates(self):
        assert dl.fetch_delay(P, [2e6] * 4) == pytest.approx(0.01, rel=1e-12)

    def test_single_camera(self):
        assert dl.fetch_delay(P, [1e6]) == pytest.approx(0.02, rel=1e-12)

    def test_zero_rate_rejected(self):
        with pytest.raises(ValueError):
            dl.fetch_delay(P, [1e6, 0.0])


class TestComputeDelays:
    def test_local_compute(self):
        assert dl.local_compute_delay(P) == pytest.approx(0.18712, rel=1e-10)
        assert dl.local_compute_delay(P, vue_cpu_hz=2e9) == pytest.approx(0.09356, rel=1e-10)

    def test_local_zero_density(self):
        p0 = dl.PhysicalParams(processing_density=1e-300)
        assert dl.local_compute_delay(p0) == pytest.approx(0.0, abs=1e-290)

    def test_server_compute(self):
        assert dl.server_compute_delay(P, 60) == pytest.approx(0.056136, rel=1e-12)
        assert dl.server_compute_delay(P, 1) == pytest.approx(9.356e-4, rel=1e-3)
        assert dl.server_compute_delay(P, 0) == 0.0

    def test_server_linear_in_offloaders(self):
        assert dl.server_compute_delay(P, 10) == pytest.approx(10 * dl.server_compute_delay(P, 1))


class TestDownlink:
    def test_single_offloader_full_power(self):
        h = 10 ** -10.07  # d = 100 m, no fading scaling
        t = dl.downlink_delay(P, 1.0, h, 1)
        kappa = h / (2e7 * N0)
        expected = 60e3 / (2e7 * math.log2(1 + kappa))
        assert t == pytest.approx(expected, rel=1e-12)
        assert kappa == pytest.approx(1.0690e3, rel=1e-3)
        assert t == pytest.approx(2.98e-4, rel=1e-2)

    def test_delay_proportional_to_image_size(self):
        big = dl.PhysicalParams(synthesized_image_bits=120e3)
        assert dl.downlink_delay(big, 0.5, 1e-9, 4) == pytest.approx(
            2 * dl.downlink_delay(P, 0.5, 1e-9, 4), rel=1e-12
        )

    def test_vanishing_power_diverges(self):
        assert dl.downlink_delay(P, 1e-18, 1e-9, 4) > 1e3

    def test_nonpositive_power_rejected(self):
        with pytest.raises(ValueError):
            dl.downlink_delay(P, 0.0, 1e-9, 4)


class TestE2E:
    def test_fetch_branch_sum(self):
        bd = dl.e2e_delay(P, dl.FETCH, fetch_tx_s=0.01577)
        assert bd.e2e_s == pytest.approx(0.20289, rel=1e-4)
        assert bd.e2e_s == bd.fetch_transmission_s + bd.local_compute_s
        assert bd.server_compute_s == 0.0 and bd.downlink_s == 0.0

    def test_offload_branch_sum(self):
        bd = dl.e2e_delay(P, dl.OFFLOAD, server_compute_s=0.056136, downlink_s=0.036)
        assert bd.e2e_s == pytest.approx(0.092136, rel=1e-12)
        assert bd.fetch_transmission_s == 0.0 and bd.local_compute_s == 0.0

    def test_branch_inputs_required(self):
        with pytest.raises(ValueError):
            dl.e2e_delay(P, dl.FETCH)
        with pytest.raises(ValueError):
            dl.e2e_delay(P, dl.OFFLOAD, server_compute_s=0.01)


class TestMonotonicity:
    def test_e2e_nonincreasing_in_gains_and_power(self, rng):
        # random perturbations only improve (or keep) the delay
        for _ in range(200):
            h = 10 ** rng.uniform(-11, -7)
            p = 10 ** rng.uniform(-3, 0)
            n = int(rng.integers(1, 61))
            base = dl.downlink_delay(P, p, h, n)
            assert dl.downlink_delay(P, p * 1.3, h, n) <= base
            assert dl.downlink_delay(P, p, h * 1.3, n) <= base

            gains = 10 ** rng.uniform(-11, -7, size=4)
            r = [dl.camera_broadcast_rate(P, [g]) for g in gains]
            base_fetch = dl.fetch_delay(P, r)
            r_up = [dl.camera_broadcast_rate(P, [g * 1.5]) for g in gains]
            assert dl.fetch_delay(P, r_up) <= base_fetch

    def test_fetcher_superset_slows_broadcast(self, rng):
        for _ in range(100):
            gains = 10 ** rng.uniform(-11, -7, size=5)
            sub = dl.camera_broadcast_rate(P, gains[:3])
            sup = dl.camera_broadcast_rate(P, gains)
            assert sup <= sub  # min over a superset can only drop

    def test_all_delays_finite_positive(self, rng):
        for _ in range(100):
            h = 10 ** rng.uniform(-11, -7)
            p = 10 ** rng.uniform(-6, 0)
            n = int(rng.integers(1, 61))
            t = dl.downlink_delay(P, p, h, n)
            assert math.isfinite(t) and t > 0
            t2 = dl.fetch_delay(P, [dl.camera_broadcast_rate(P, [h])])
            assert math.isfinite(t2) and t2 > 0
