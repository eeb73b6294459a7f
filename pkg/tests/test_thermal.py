"""Compute power, transient heat and CRAC energy.

The closed-form cooling energy is checked against direct numerical
integration of the instantaneous cooling power (scipy is the oracle here,
the library itself never calls it).
"""

import math

import numpy as np
import pytest

from hapdc import thermal
from hapdc.config import CoolingSpec, ModelConfig, Scenario, ServerSpec
from hapdc.errors import OverloadError


def _random_instance(rng):
    server = ServerSpec(
        service_rate_mips=float(rng.uniform(100.0, 2000.0)),
        p_idle=float(rng.uniform(50.0, 400.0)),
        p_peak=float(rng.uniform(500.0, 1200.0)),
        heat_capacity=float(rng.uniform(100.0, 900.0)),
        thermal_resistance=float(rng.uniform(0.05, 1.5)),
    )
    cooling = CoolingSpec(
        supply_temp=float(rng.uniform(285.0, 303.0)),
        fan_power=float(rng.uniform(0.0, 900.0)),
        air_heat_capacity_flow=float(rng.uniform(10.0, 120.0)),
        recirculation_raise=float(rng.uniform(0.0, 5.0)),
        crac_influence_rate=float(rng.uniform(0.005, 0.5)),
        t_in_initial=float(rng.uniform(300.0, 320.0)),
        t_cpu_initial=float(rng.uniform(305.0, 330.0)),
    )
    task_len = float(rng.uniform(1e5, 1e7))
    loads = []
    for _ in range(rng.integers(1, 5)):
        u = float(rng.uniform(0.0, 1.0))
        loads.append((server, u * server.service_rate_ips / task_len))
    return loads, cooling, task_len


def test_cop_shipped_supply_temperature():
    c = CoolingSpec()
    assert math.isclose(thermal.cop(c, 299.15), 5.2628, rel_tol=1e-12)


def test_cop_kelvin_mode_differs():
    c = CoolingSpec(cop_in_celsius=False)
    raw = 0.0068 * 299.15**2 + 0.008 * 299.15 + 0.458
    assert math.isclose(thermal.cop(c, 299.15), raw, rel_tol=1e-12)


def test_compute_power_endpoints():
    s = ServerSpec()
    assert thermal.compute_power(s, 0.0, 1e6) == s.p_idle
    full = s.desired_utilization * s.service_rate_ips / 1e6
    assert math.isclose(thermal.compute_power(s, full, 1e6), s.p_peak,
                        rel_tol=1e-12)


def test_compute_power_linear_midpoint():
    s = ServerSpec()
    half = 0.5 * s.service_rate_ips / 1e6
    expect = s.p_idle + 0.5 * (s.p_peak - s.p_idle)
    assert math.isclose(thermal.compute_power(s, half, 1e6), expect,
                        rel_tol=1e-12)


def test_compute_power_overload():
    s = ServerSpec(desired_utilization=0.7)
    ok = 0.7 * s.service_rate_ips / 1e6
    thermal.compute_power(s, ok, 1e6)  # at the ceiling is allowed
    with pytest.raises(OverloadError):
        thermal.compute_power(s, ok * 1.01, 1e6)


def test_compute_energy_is_power_times_span():
    s = ServerSpec()
    e = thermal.compute_energy(s, 100.0, 1e6, (500.0, 2300.0))
    assert math.isclose(e, thermal.compute_power(s, 100.0, 1e6) * 1800.0,
                        rel_tol=1e-12)


def test_trace_matches_aggregate_heat():
    """Per-server component route must equal the aggregated closed form."""
    rng = np.random.default_rng(7)
    for _ in range(20):
        loads, cooling, task_len = _random_instance(rng)
        for t in (0.0, 1.0, 10.0, 300.0, 5000.0):
            by_trace = sum(
                thermal.ThermalTrace(srv, rate, task_len, cooling).heat(t)
                for srv, rate in loads)
            agg = thermal.heat_removed(loads, cooling, task_len, t)
            assert math.isclose(by_trace, agg, rel_tol=1e-12, abs_tol=1e-9)


def test_heat_removed_settles_to_compute_power():
    rng = np.random.default_rng(11)
    for _ in range(10):
        loads, cooling, task_len = _random_instance(rng)
        rc = max(s.thermal_resistance * s.heat_capacity for s, _ in loads)
        late = 25.0 * max(rc, 1.0 / cooling.crac_influence_rate)
        total_comp = sum(thermal.compute_power(s, r, task_len) for s, r in loads)
        assert math.isclose(thermal.heat_removed(loads, cooling, task_len, late),
                            total_comp, rel_tol=1e-9)


def test_cooling_power_composition():
    loads = [(ServerSpec(), 200.0)]
    cooling = CoolingSpec()
    t = 42.0
    expect = cooling.fan_power_w() + thermal.heat_removed(
        loads, cooling, 1e6, t) / thermal.cop(cooling, cooling.supply_temp)
    assert thermal.cooling_power(loads, cooling, 1e6, t) == expect


def test_cooling_energy_matches_quadrature():
    from scipy.integrate import quad

    rng = np.random.default_rng(3)
    for _ in range(10):
        loads, cooling, task_len = _random_instance(rng)
        t1 = float(rng.uniform(0.0, 50.0))
        t2 = t1 + float(rng.uniform(10.0, 2000.0))
        closed = thermal.cooling_energy(loads, cooling, task_len, (t1, t2))
        num, _err = quad(
            lambda t: thermal.cooling_power(loads, cooling, task_len, t),
            t1, t2, limit=400, epsabs=1e-10, epsrel=1e-12)
        assert math.isclose(closed, num, rel_tol=1e-8)


def test_partition_servers_balanced():
    assert thermal.partition_servers(40, 4) == [10, 10, 10, 10]
    assert thermal.partition_servers(10, 4) == [3, 3, 2, 2]
    assert thermal.partition_servers(3, 4) == [1, 1, 1, 0]
    assert sum(thermal.partition_servers(123, 7)) == 123


def test_grouped_cooling_matches_manual_split():
    server = ServerSpec()
    cooling = CoolingSpec(crac_count=3)
    rates = [10.0 * k for k in range(8)]
    window = (0.0, 3600.0)
    manual = 0.0
    start = 0
    for n in (3, 3, 2):
        group = [(server, r) for r in rates[start:start + n]]
        manual += thermal.cooling_energy(group, cooling, 1e6, window)
        start += n
    got = thermal.grouped_cooling_energy(rates, server, cooling, 1e6, window)
    assert math.isclose(got, manual, rel_tol=1e-12)


def test_tdc_total_energy_composition():
    cfg = ModelConfig()
    scen = Scenario(ground_servers=4, hap_servers=2, hap_count=2,
                    ground_rates=(10.0, 20.0, 30.0, 40.0),
                    hap_rates=(5.0, 15.0))
    out = thermal.tdc_total_energy(scen, cfg)
    rates = [10.0, 20.0, 30.0, 40.0, 5.0, 15.0, 5.0, 15.0]
    task_len = cfg.workload.task_length_instr
    compute = math.fsum(
        thermal.compute_energy(cfg.server, r, task_len, scen.window)
        for r in rates)
    cool = thermal.grouped_cooling_energy(rates, cfg.server, cfg.cooling,
                                           task_len, scen.window)
    assert math.isclose(out.compute_j, compute, rel_tol=1e-12)
    assert math.isclose(out.cooling_j, cool, rel_tol=1e-12)
    assert math.isclose(out.total_j, compute + cool, rel_tol=1e-12)
    assert out.payload_j == 0.0 and out.propulsion_j == 0.0


def test_energy_breakdown_total():
    b = thermal.EnergyBreakdown.from_parts(compute_j=1.0, cooling_j=2.0,
                                           payload_j=3.0, propulsion_j=4.0,
                                           transmission_j=5.0)
    assert b.total_j == 15.0
