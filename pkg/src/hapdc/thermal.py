"""Server compute power, transient heat flow and CRAC cooling energy.

The transient model tracks each server's inlet and CPU temperature from the
configured initial state toward steady state.  Cooling energy over a window
has a closed form (sum of exponential relaxations); tests check it against
direct quadrature of the instantaneous cooling power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import CoolingSpec, ModelConfig, Scenario, ServerSpec
from .errors import OverloadError

KELVIN_OFFSET = 273.15

ServerLoad = tuple[ServerSpec, float]


def utilization(server: ServerSpec, rate: float, task_len: float) -> float:
    """Fraction of the service rate consumed by ``rate`` tasks/s."""
    return task_len * rate / server.service_rate_ips


def compute_power(server: ServerSpec, rate: float, task_len: float) -> float:
    """Electrical draw at the given arrival rate, W; linear idle-to-peak."""
    u = utilization(server, rate, task_len)
    if u > server.desired_utilization * (1.0 + 1e-12):
        raise OverloadError(
            f"utilization {u:.4f} exceeds ceiling {server.desired_utilization}"
        )
    return server.p_idle + (server.p_peak - server.p_idle) * u


def compute_energy(server: ServerSpec, rate: float, task_len: float,
                   window: tuple[float, float]) -> float:
    return compute_power(server, rate, task_len) * (window[1] - window[0])


def cop(cooling: CoolingSpec, temp_k: float) -> float:
    """CRAC coefficient of performance at the given air temperature."""
    t = temp_k - KELVIN_OFFSET if cooling.cop_in_celsius else temp_k
    return 0.0068 * t * t + 0.008 * t + 0.458


class ThermalTrace:
    """Transient temperatures of a single server under one CRAC.

    Component route: the removed heat follows from the inlet/outlet pair,
    heat = C_air*f_air*(t_out - t_in).  The aggregated closed form in
    ``heat_removed`` must match it.
    """

    def __init__(self, server: ServerSpec, rate: float, task_len: float,
                 cooling: CoolingSpec):
        self.server = server
        self.cooling = cooling
        self.p_comp = compute_power(server, rate, task_len)
        self._t_steady = cooling.supply_temp + cooling.recirculation_raise
        self._rc = server.thermal_resistance * server.heat_capacity

    def t_in(self, t: float) -> float:
        c = self.cooling
        return self._t_steady + (c.t_in_initial - self._t_steady) * math.exp(
            -c.crac_influence_rate * t)

    def t_cpu(self, t: float) -> float:
        tin = self.t_in(t)
        rp = self.server.thermal_resistance * self.p_comp
        return tin + rp + (self.cooling.t_cpu_initial - tin - rp) * math.exp(-t / self._rc)

    def t_out(self, t: float) -> float:
        share = 1.0 / (self.cooling.air_heat_capacity_flow * self.server.thermal_resistance)
        return (1.0 - share) * self.t_in(t) + share * self.t_cpu(t)

    def heat(self, t: float) -> float:
        """Heat carried off by the airflow at time t, W."""
        return self.cooling.air_heat_capacity_flow * (self.t_out(t) - self.t_in(t))


def heat_removed(server_loads: list[ServerLoad], cooling: CoolingSpec,
                 task_len: float, t: float) -> float:
    """Total heat one CRAC removes from its servers at time t, W.

    Closed aggregate of the per-server relaxations; approaches the summed
    compute power as t grows."""
    nu = cooling.crac_influence_rate
    base = cooling.supply_temp + cooling.recirculation_raise
    d_cpu = cooling.t_cpu_initial - base
    d_in = cooling.t_in_initial - base
    total = 0.0
    for server, rate in server_loads:
        r = server.thermal_resistance
        rc = r * server.heat_capacity
        p = compute_power(server, rate, task_len)
        decay = math.exp(-t / rc)
        total += (r * (1.0 - decay) * p
                  + d_cpu * decay
                  - d_in * math.exp(-(nu + 1.0 / rc) * t)) / r
    return total


def cooling_power(server_loads: list[ServerLoad], cooling: CoolingSpec,
                  task_len: float, t: float) -> float:
    """Instantaneous electrical power of one CRAC, W (fan plus heat over COP)."""
    return cooling.fan_power_w() + heat_removed(server_loads, cooling, task_len, t) / cop(
        cooling, cooling.supply_temp)


def cooling_energy(server_loads: list[ServerLoad], cooling: CoolingSpec,
                   task_len: float, window: tuple[float, float]) -> float:
    """Energy one CRAC spends over the window, J (closed form).

    Integrates fan power plus removed heat over the COP; the relaxation
    integrals are evaluated analytically."""
    t1, t2 = window
    span = t2 - t1
    nu = cooling.crac_influence_rate
    base = cooling.supply_temp + cooling.recirculation_raise
    d_cpu = cooling.t_cpu_initial - base
    d_in = cooling.t_in_initial - base
    c = cop(cooling, cooling.supply_temp)
    heat_integral = 0.0
    for server, rate in server_loads:
        r = server.thermal_resistance
        cap = server.heat_capacity
        rc = r * cap
        k = nu + 1.0 / rc
        p = compute_power(server, rate, task_len)
        heat_integral += (
            p * (span + rc * (math.exp(-t2 / rc) - math.exp(-t1 / rc)))
            + cap * d_cpu * (math.exp(-t1 / rc) - math.exp(-t2 / rc))
            + cap / (nu * rc + 1.0) * d_in * (math.exp(-k * t2) - math.exp(-k * t1))
        )
    return cooling.fan_power_w() * span + heat_integral / c


def partition_servers(count: int, crac_count: int) -> list[int]:
    """Near-uniform split of ``count`` servers across the CRACs."""
    base, extra = divmod(count, crac_count)
    return [base + 1] * extra + [base] * (crac_count - extra)


@dataclass(frozen=True)
class EnergyBreakdown:
    """Window energy split by destination, J."""

    compute_j: float
    cooling_j: float
    payload_j: float
    propulsion_j: float
    transmission_j: float
    total_j: float

    @classmethod
    def from_parts(cls, compute_j=0.0, cooling_j=0.0, payload_j=0.0,
                   propulsion_j=0.0, transmission_j=0.0) -> "EnergyBreakdown":
        return cls(compute_j, cooling_j, payload_j, propulsion_j, transmission_j,
                   math.fsum([compute_j, cooling_j, payload_j, propulsion_j,
                              transmission_j]))


def grouped_cooling_energy(rates, server: ServerSpec, cooling: CoolingSpec,
                            task_len: float, window) -> float:
    """Cooling energy with the rate list split near-uniformly across CRACs."""
    total = 0.0
    start = 0
    for n in partition_servers(len(rates), cooling.crac_count):
        group = [(server, r) for r in rates[start:start + n]]
        total += cooling_energy(group, cooling, task_len, window)
        start += n
    return total


def tdc_total_energy(scenario: Scenario, cfg: ModelConfig) -> EnergyBreakdown:
    """Baseline energy with every server on the ground.

    The airborne rate vector (replicated per platform) joins the ground one,
    so the baseline serves the identical workload."""
    rates = list(scenario.ground_rates) + list(scenario.hap_rates) * scenario.hap_count
    task_len = cfg.workload.task_length_instr
    window = scenario.window
    compute = math.fsum(
        compute_energy(cfg.server, r, task_len, window) for r in rates)
    cooling_total = grouped_cooling_energy(rates, cfg.server, cfg.cooling,
                                            task_len, window)
    return EnergyBreakdown.from_parts(compute_j=compute, cooling_j=cooling_total)
