"""Rician MIMO link: sampling statistics, rate laws, CCDF bounds."""

import math

import numpy as np
import pytest

from hapdc import channel
from hapdc.config import ChannelConfig, WorkloadSpec
from hapdc.errors import LinkRateError, LinkSaturationWarning


def test_resolved_noise_and_snr():
    ch = ChannelConfig().resolved()
    assert math.isclose(ch.noise_power, 3.98107e-13, rel_tol=1e-4)
    assert math.isclose(ch.avg_rx_snr, 0.062797, rel_tol=1e-3)


def test_reference_rate_default_link():
    assert math.isclose(channel.reference_rate(ChannelConfig()),
                        1.589528e8, rel_tol=1e-5)


def test_sample_entry_power_rayleigh():
    """With no line-of-sight the entries are zero-mean with power gain^2."""
    ch = ChannelConfig(rician_factor=0.0)
    rng = np.random.default_rng(1)
    h = channel.sample_channel(ch, 20_000, rng)
    gain2 = ch.ref_gain / ch.link_distance**2
    power = np.mean(np.abs(h) ** 2)
    assert abs(power / gain2 - 1.0) < 0.02
    assert abs(np.mean(h)) < 3.0 * math.sqrt(gain2 / h.size)


def test_sample_entry_power_any_factor():
    # the Rician split is power preserving for every factor
    rng = np.random.default_rng(2)
    for zeta in (0.5, 5.0, 20.0):
        ch = ChannelConfig(rician_factor=zeta)
        h = channel.sample_channel(ch, 10_000, rng)
        gain2 = ch.ref_gain / ch.link_distance**2
        assert abs(np.mean(np.abs(h) ** 2) / gain2 - 1.0) < 0.03


def test_strong_los_approaches_reference_rate():
    ch = ChannelConfig(rician_factor=1e12)
    rng = np.random.default_rng(3)
    h = channel.sample_channel(ch, 4, rng)
    ref = channel.reference_rate(ch)
    for r in channel.channel_rate(ch, h):
        assert math.isclose(r, ref, rel_tol=1e-4)
    for r in channel.beamformed_rate(ch, h):
        assert math.isclose(r, ref, rel_tol=1e-4)


def test_sampling_is_seed_deterministic():
    ch = ChannelConfig()
    a = channel.sample_channel(ch, 16, np.random.default_rng(77))
    b = channel.sample_channel(ch, 16, np.random.default_rng(77))
    assert np.array_equal(a, b)


def test_channel_rate_against_slogdet():
    ch = ChannelConfig().resolved()
    rng = np.random.default_rng(4)
    h = channel.sample_channel(ch, 8, rng)
    got = channel.channel_rate(ch, h)
    for k in range(8):
        gram = h[k].conj().T @ h[k]
        m = np.eye(ch.tx_antennas) + (ch.tx_power / ch.noise_power) * gram
        sign, logdet = np.linalg.slogdet(m)
        want = ch.bandwidth_hz * max(logdet, 0.0) / math.log(2.0)
        assert sign > 0
        assert math.isclose(got[k], want, rel_tol=1e-12)


def test_single_antenna_det_equals_beamformed():
    ch = ChannelConfig(tx_antennas=1)
    rng = np.random.default_rng(5)
    h = channel.sample_channel(ch, 32, rng)
    a = channel.channel_rate(ch, h)
    b = channel.beamformed_rate(ch, h)
    assert np.allclose(a, b, rtol=1e-12)


def test_rate_phase_invariance():
    ch = ChannelConfig().resolved()
    rng = np.random.default_rng(6)
    h = channel.sample_channel(ch, 8, rng)
    rotated = h * np.exp(0.91j)
    assert np.allclose(channel.channel_rate(ch, h),
                       channel.channel_rate(ch, rotated), rtol=1e-12)


def test_spectral_demand_mappings():
    w = WorkloadSpec()
    ch = ChannelConfig()
    lam = 3.0
    want = lam * w.bits_per_task() / ch.bandwidth_hz
    assert math.isclose(channel.spectral_demand(ch, w, lam), want, rel_tol=1e-12)
    ident = ChannelConfig(demand_mapping="identity")
    assert channel.spectral_demand(ident, w, lam) == 3.0
    with pytest.raises(ValueError):
        channel.spectral_demand(ch, w, -1.0)
    # explicit task length overrides the workload default
    short = channel.spectral_demand(ch, w, lam, task_len=w.task_length_instr / 2)
    assert math.isclose(short, want / 2, rel_tol=1e-12)


def test_bounds_trivial_at_zero_demand():
    ch = ChannelConfig()
    assert channel.ccdf_lower(ch, 0.0) == 1.0
    assert channel.ccdf_upper(ch, 0.0) == 1.0
    assert channel.ccdf_lower(ch, -1.0) == 1.0


def test_lower_bound_underflows_to_zero():
    assert channel.ccdf_lower(ChannelConfig(), 1200.0) == 0.0


def test_bounds_ordered_and_monotone():
    ch = ChannelConfig()
    grid = np.linspace(0.05, 12.0, 60)
    lo = [channel.ccdf_lower(ch, d) for d in grid]
    hi = [channel.ccdf_upper(ch, d) for d in grid]
    for a, b in zip(lo, hi):
        assert 0.0 <= a <= 1.0 and 0.0 <= b <= 1.0
        assert a <= b + 1e-12
    for k in range(1, len(grid)):
        assert lo[k] <= lo[k - 1] + 1e-12
        assert hi[k] <= hi[k - 1] + 1e-12


def test_outage_bounds_pair():
    ch = ChannelConfig()
    lo, hi = channel.outage_bounds(ch, 1.5)
    assert lo == channel.ccdf_lower(ch, 1.5)
    assert hi == channel.ccdf_upper(ch, 1.5)


def test_empirical_ccdf_sandwich():
    ch = ChannelConfig()
    demands = np.linspace(0.5, 4.0, 6)
    prob, se = channel.empirical_ccdf(ch, demands, samples=20_000,
                                      rng=np.random.default_rng(8))
    for k, d in enumerate(demands):
        lo = channel.ccdf_lower(ch, d)
        hi = channel.ccdf_upper(ch, d)
        assert lo - 3.0 * se[k] <= prob[k] <= hi + 3.0 * se[k], (d, prob[k])


def test_empirical_se_never_zero():
    ch = ChannelConfig()
    prob, se = channel.empirical_ccdf(ch, [1e-9, 50.0], samples=2000,
                                      rng=np.random.default_rng(9))
    assert prob[0] == 1.0 and prob[1] == 0.0
    assert se[0] > 0.0 and se[1] > 0.0


def test_empirical_seed_pair_consistent():
    ch = ChannelConfig()
    demands = [1.2, 1.8]
    p1, s1 = channel.empirical_ccdf(ch, demands, samples=20_000,
                                    rng=np.random.default_rng(10))
    p2, s2 = channel.empirical_ccdf(ch, demands, samples=20_000,
                                    rng=np.random.default_rng(11))
    for k in range(len(demands)):
        gap = abs(p1[k] - p2[k])
        assert gap <= 6.0 * math.hypot(s1[k], s2[k])


def test_drop_probability_complements_lower_bound():
    ch = ChannelConfig()
    w = WorkloadSpec()
    lam = 4.0
    d = channel.spectral_demand(ch, w, lam)
    assert channel.drop_probability(ch, w, lam) == 1.0 - channel.ccdf_lower(ch, d)
    assert math.isclose(channel.dropped_rate(ch, w, lam),
                        lam * channel.drop_probability(ch, w, lam), rel_tol=1e-12)


def test_max_reliable_rate_boundary():
    ch = ChannelConfig()
    w = WorkloadSpec()
    floor = 1.0 - 1e-12
    lam = channel.max_reliable_rate(ch, w)
    assert lam > 0.0
    at = channel.ccdf_lower(ch, channel.spectral_demand(ch, w, lam))
    above = channel.ccdf_lower(ch, channel.spectral_demand(ch, w, lam * 1.01))
    assert at >= floor - 1e-13
    assert above < floor


def test_airtime_and_transmission_energy():
    ch = ChannelConfig().resolved()
    w = WorkloadSpec()
    ref = channel.reference_rate(ch)
    lam_full = ref / (w.overhead_ratio * w.bits_per_task())
    duty = channel.airtime_fraction(ch, w, lam_full)
    assert math.isclose(duty, 1.0, rel_tol=1e-12)
    e = channel.transmission_energy(ch, w, lam_full, 3600.0)
    assert math.isclose(e, ch.tx_power * 3600.0, rel_tol=1e-12)
    assert channel.transmission_energy(ch, w, 0.0, 3600.0) == 0.0


def test_transmission_saturation_warns():
    ch = ChannelConfig()
    w = WorkloadSpec()
    ref = channel.reference_rate(ch)
    lam = 1.5 * ref / (w.overhead_ratio * w.bits_per_task())
    with pytest.warns(LinkSaturationWarning):
        channel.transmission_energy(ch, w, lam, 100.0)


def test_round_trip_time():
    ch = ChannelConfig()
    w = WorkloadSpec()
    assert channel.round_trip_time(ch, w, 0.0) == 0.0
    ref = channel.reference_rate(ch)
    lam = ref / w.bits_per_task()  # offered bits match the link rate
    assert math.isclose(channel.round_trip_time(ch, w, lam), 2.0, rel_tol=1e-12)


def test_outage_curve_bundle():
    ch = ChannelConfig()
    w = WorkloadSpec()
    lams = [1.0, 2.0, 4.0]
    curve = channel.outage_curve(ch, w, lams)
    assert curve.lambdas == (1.0, 2.0, 4.0)
    assert curve.ccdf_empirical is None and curve.empirical_se is None
    for k, lam in enumerate(lams):
        d = channel.spectral_demand(ch, w, lam)
        assert curve.ccdf_lower[k] == channel.ccdf_lower(ch, d)
        assert curve.ccdf_upper[k] == channel.ccdf_upper(ch, d)
        assert curve.drop_rate[k] == 1.0 - curve.ccdf_lower[k]
    with_mc = channel.outage_curve(ch, w, lams, samples=4000,
                                   rng=np.random.default_rng(12))
    assert len(with_mc.ccdf_empirical) == 3
    assert all(s > 0.0 for s in with_mc.empirical_se)
