"""Typed configuration model and YAML loader.

Every model parameter lives in one of the frozen dataclasses below.  A config
file may set any subset of fields; everything else falls back to the library
defaults, so an empty file is a valid full configuration.  ``load_config`` /
``dump_config`` round-trip exactly.
"""

from __future__ import annotations

import csv
import hashlib
import math
import os
from dataclasses import dataclass, field, fields, replace

import yaml

from .errors import ConfigError, ValidationError

MIPS = 1.0e6  # instructions per second per MIPS

# thermal noise floor, W/Hz (-174 dBm/Hz)
_NOISE_DENSITY_W_PER_HZ = 10.0 ** ((-174.0 - 30.0) / 10.0)


@dataclass(frozen=True)
class ServerSpec:
    """One compute server: capacity, power envelope and thermal bulk."""

    service_rate_mips: float = 580.0
    p_idle: float = 150.0
    """Idle power draw, W."""
    p_peak: float = 300.0
    """Power draw at full utilization, W."""
    desired_utilization: float = 1.0
    heat_capacity: float = 340.0
    """Lumped thermal capacitance of the server, J/K."""
    thermal_resistance: float = 0.34
    """CPU-to-air thermal resistance, K/W."""
    mass: float = 9.0

    @property
    def service_rate_ips(self) -> float:
        """Service rate in instructions per second."""
        return self.service_rate_mips * MIPS

    def validate(self):
        if self.service_rate_mips <= 0:
            raise ValidationError("ServerSpec: service_rate_mips must be positive")
        if self.p_idle < 0:
            raise ValidationError("ServerSpec: p_idle must be non-negative")
        if self.p_peak <= self.p_idle:
            raise ValidationError(
                "ServerSpec: p_peak must exceed p_idle "
                f"(p_idle={self.p_idle}, p_peak={self.p_peak})"
            )
        if not 0.0 < self.desired_utilization <= 1.0:
            raise ValidationError("ServerSpec: desired_utilization must be in (0, 1]")
        if self.heat_capacity <= 0 or self.thermal_resistance <= 0:
            raise ValidationError("ServerSpec: thermal parameters must be positive")
        if self.mass <= 0:
            raise ValidationError("ServerSpec: mass must be positive")


@dataclass(frozen=True)
class WorkloadSpec:
    """Task stream characteristics shared by both data centers."""

    arrival_rate_total: float = 1000.0
    """Aggregate task arrival rate for the whole system, task/s."""
    task_length_instr: float = 1.0e6
    """Instructions per task used by energy/flying computations."""
    small_task_instr: float = 1.0e6
    large_task_instr: float = 1.0e8
    bits_per_instruction: float = 32.0
    """Offloaded data bits carried per instruction of compute."""
    overhead_ratio: float = 1.1
    """Transmission overhead multiplier applied to offered bits."""
    vacation_rate: float = 10.0
    """Rate of the exponential server vacations, 1/s."""

    def bits_per_task(self, task_len: float | None = None) -> float:
        length = self.task_length_instr if task_len is None else task_len
        return length * self.bits_per_instruction

    def validate(self):
        if self.arrival_rate_total < 0:
            raise ValidationError("WorkloadSpec: arrival_rate_total must be non-negative")
        for name in ("task_length_instr", "small_task_instr", "large_task_instr"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"WorkloadSpec: {name} must be positive")
        if self.bits_per_instruction <= 0:
            raise ValidationError("WorkloadSpec: bits_per_instruction must be positive")
        if self.overhead_ratio < 1.0:
            raise ValidationError("WorkloadSpec: overhead_ratio must be >= 1")
        if self.vacation_rate <= 0:
            raise ValidationError("WorkloadSpec: vacation_rate must be positive")


@dataclass(frozen=True)
class FanSpec:
    """CRAC fan sized from airflow and pressure loss instead of a fixed power."""

    air_flow_rate: float
    pressure_loss: float
    fan_efficiency: float
    motor_efficiency: float

    def power(self) -> float:
        return self.air_flow_rate * self.pressure_loss / (
            self.fan_efficiency * self.motor_efficiency
        )

    def validate(self):
        if self.air_flow_rate <= 0 or self.pressure_loss <= 0:
            raise ValidationError("FanSpec: air_flow_rate and pressure_loss must be positive")
        for name in ("fan_efficiency", "motor_efficiency"):
            if not 0.0 < getattr(self, name) <= 1.0:
                raise ValidationError(f"FanSpec: {name} must be in (0, 1]")


@dataclass(frozen=True)
class CoolingSpec:
    """CRAC room model: supply air, fan power and recirculation dynamics."""

    crac_count: int = 4
    supply_temp: float = 299.15
    """CRAC supply air temperature, K."""
    fan_power: float = 500.0
    """Fan power per CRAC, W (ignored when ``fan`` is given)."""
    fan: FanSpec | None = None
    air_heat_capacity_flow: float = 50.0
    """Product of air heat capacity and mass flow per server, W/K."""
    recirculation_raise: float = 2.0
    """Steady inlet temperature rise above supply air, K."""
    crac_influence_rate: float = 0.05
    """Rate at which inlet air relaxes toward the CRAC supply, 1/s."""
    t_in_initial: float = 310.0
    t_cpu_initial: float = 318.0
    cop_in_celsius: bool = True
    """Evaluate the COP polynomial on deg-C (Kelvin input converted)."""

    def fan_power_w(self) -> float:
        return self.fan.power() if self.fan is not None else self.fan_power

    def validate(self):
        if self.crac_count < 1:
            raise ValidationError("CoolingSpec: crac_count must be at least 1")
        if self.supply_temp <= 0:
            raise ValidationError("CoolingSpec: supply_temp must be positive (Kelvin)")
        if self.fan is None and self.fan_power < 0:
            raise ValidationError("CoolingSpec: fan_power must be non-negative")
        if self.fan is not None:
            self.fan.validate()
        if self.air_heat_capacity_flow <= 0:
            raise ValidationError("CoolingSpec: air_heat_capacity_flow must be positive")
        if self.recirculation_raise < 0:
            raise ValidationError("CoolingSpec: recirculation_raise must be non-negative")
        if self.crac_influence_rate <= 0:
            raise ValidationError("CoolingSpec: crac_influence_rate must be positive")
        if self.t_in_initial <= 0 or self.t_cpu_initial <= 0:
            raise ValidationError("CoolingSpec: initial temperatures must be positive (Kelvin)")


@dataclass(frozen=True)
class HapPlatform:
    """Airship geometry, solar harvest chain and mass budget."""

    pv_area: float = 8000.0
    pv_efficiency: float = 0.4
    propeller_efficiency: float = 0.8
    air_density: float = 0.08891
    """Stratospheric air density, kg/m^3."""
    air_viscosity: float = 1.422e-5
    """Dynamic viscosity, N*s/m^2."""
    body_length: float = 115.0
    body_diameter: float = 34.0
    hap_velocity: float = 8.0
    drag_constant: float = 1.8
    """Hull-to-envelope drag multiplier."""
    payload_capacity: float = 450.0
    rack_mass: float = 363.0

    @property
    def fineness_ratio(self) -> float:
        return self.body_length / self.body_diameter

    def validate(self):
        if not 0.0 < self.pv_efficiency <= 1.0:
            raise ValidationError("HapPlatform: pv_efficiency must be in (0, 1]")
        if not 0.0 < self.propeller_efficiency <= 1.0:
            raise ValidationError("HapPlatform: propeller_efficiency must be in (0, 1]")
        for name in ("pv_area", "air_density", "air_viscosity", "body_length",
                     "body_diameter", "hap_velocity", "drag_constant"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"HapPlatform: {name} must be positive")
        if self.payload_capacity < self.rack_mass:
            raise ValidationError(
                "HapPlatform: payload_capacity must cover rack_mass "
                f"({self.payload_capacity} < {self.rack_mass})"
            )


@dataclass(frozen=True)
class WindSpec:
    """Wind forcing: constant speed or a per-(latitude, day) lookup table."""

    speed: float = 20.0
    table: tuple[tuple[float, float, float], ...] | None = None
    """Rows of (latitude_deg, day_of_year, wind_speed); nearest-neighbor lookup."""

    def speed_at(self, latitude_deg: float, day: float) -> float:
        if not self.table:
            return self.speed
        best = min(
            self.table,
            key=lambda row: (row[0] - latitude_deg) ** 2 + (row[1] - day) ** 2,
        )
        return best[2]

    def validate(self):
        if self.speed < 0:
            raise ValidationError("WindSpec: speed must be non-negative")
        if self.table:
            for row in self.table:
                if row[2] < 0:
                    raise ValidationError("WindSpec: table wind speeds must be non-negative")


@dataclass(frozen=True)
class ChannelConfig:
    """Offloading link: antenna geometry, Rician fading and power budget."""

    tx_antennas: int = 2
    rx_antennas: int = 16
    carrier_hz: float = 31.0e9
    bandwidth_hz: float = 100.0e6
    rician_factor: float = 10.0
    ref_gain: float = 1.0e-6
    """Path gain at 1 m reference distance (linear, -60 dB default)."""
    link_distance: float = 20.0e3
    tx_power: float = 10.0
    noise_power: float | None = None
    """Receiver noise power, W; thermal over the bandwidth when omitted."""
    avg_rx_snr: float | None = None
    """Mean per-antenna receive SNR; derived from the link budget when omitted."""
    demand_mapping: str = "bits_per_hz"
    """How workload maps to the outage-bound rate argument:
    'bits_per_hz' divides offered bits/s by the bandwidth, 'identity' uses
    the arrival rate unchanged."""

    def resolved(self) -> "ChannelConfig":
        """Fill derived fields (noise, SNR) so every value is explicit."""
        noise = self.noise_power
        if noise is None:
            noise = _NOISE_DENSITY_W_PER_HZ * self.bandwidth_hz
        snr = self.avg_rx_snr
        if snr is None:
            snr = self.tx_power * self.ref_gain / (self.link_distance**2 * noise)
        return replace(self, noise_power=noise, avg_rx_snr=snr)

    def validate(self):
        if self.tx_antennas < 1 or self.rx_antennas < 1:
            raise ValidationError("ChannelConfig: antenna counts must be at least 1")
        if self.carrier_hz <= 0 or self.bandwidth_hz <= 0:
            raise ValidationError("ChannelConfig: carrier_hz and bandwidth_hz must be positive")
        if self.rician_factor < 0:
            raise ValidationError("ChannelConfig: rician_factor must be non-negative")
        if self.ref_gain <= 0 or self.link_distance <= 0:
            raise ValidationError("ChannelConfig: ref_gain and link_distance must be positive")
        if self.tx_power <= 0:
            raise ValidationError("ChannelConfig: tx_power must be positive")
        if self.noise_power is not None and self.noise_power <= 0:
            raise ValidationError("ChannelConfig: noise_power must be positive")
        if self.avg_rx_snr is not None and self.avg_rx_snr <= 0:
            raise ValidationError("ChannelConfig: avg_rx_snr must be positive")
        if self.demand_mapping not in ("bits_per_hz", "identity"):
            raise ValidationError(
                "ChannelConfig: demand_mapping must be 'bits_per_hz' or 'identity'"
            )


@dataclass(frozen=True)
class Scenario:
    """A concrete deployment: site, date, fleet split and per-server rates."""

    latitude_deg: float = 40.0
    day_of_year: float = 150.0
    window: tuple[float, float] = (0.0, 86400.0)
    ground_servers: int = 40
    hap_servers: int = 40
    hap_count: int = 1
    ground_rates: tuple[float, ...] = ()
    hap_rates: tuple[float, ...] = ()

    def __post_init__(self):
        # scalars in either rate slot mean a uniform total to split
        if not isinstance(self.ground_rates, tuple):
            object.__setattr__(
                self, "ground_rates",
                uniform_split(float(self.ground_rates), self.ground_servers),
            )
        if not isinstance(self.hap_rates, tuple):
            object.__setattr__(
                self, "hap_rates",
                uniform_split(float(self.hap_rates), self.hap_servers),
            )
        if self.ground_rates == () and self.ground_servers:
            object.__setattr__(self, "ground_rates", (0.0,) * self.ground_servers)
        if self.hap_rates == () and self.hap_servers:
            object.__setattr__(self, "hap_rates", (0.0,) * self.hap_servers)

    @property
    def window_length(self) -> float:
        return self.window[1] - self.window[0]

    def validate(self):
        if not -90.0 <= self.latitude_deg <= 90.0:
            raise ValidationError("Scenario: latitude_deg must be in [-90, 90]")
        if not 0.0 <= self.day_of_year <= 366.0:
            raise ValidationError("Scenario: day_of_year must be in [0, 366]")
        t1, t2 = self.window
        if t1 < 0 or t2 <= t1:
            raise ValidationError("Scenario: window must satisfy 0 <= t1 < t2")
        if self.ground_servers < 0 or self.hap_servers < 0:
            raise ValidationError("Scenario: server counts must be non-negative")
        if self.hap_count < 1:
            raise ValidationError("Scenario: hap_count must be at least 1")
        if len(self.ground_rates) != self.ground_servers:
            raise ValidationError(
                "Scenario: ground_rates length must equal ground_servers "
                f"({len(self.ground_rates)} != {self.ground_servers})"
            )
        if len(self.hap_rates) != self.hap_servers:
            raise ValidationError(
                "Scenario: hap_rates length must equal hap_servers "
                f"({len(self.hap_rates)} != {self.hap_servers})"
            )
        if any(r < 0 for r in self.ground_rates + self.hap_rates):
            raise ValidationError("Scenario: arrival rates must be non-negative")


@dataclass(frozen=True)
class ModelConfig:
    """Top-level bundle of all model sections."""

    server: ServerSpec = field(default_factory=ServerSpec)
    workload: WorkloadSpec = field(default_factory=WorkloadSpec)
    cooling: CoolingSpec = field(default_factory=CoolingSpec)
    hap: HapPlatform = field(default_factory=HapPlatform)
    wind: WindSpec = field(default_factory=WindSpec)
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    scenario: Scenario = field(default_factory=Scenario)

    def validate(self):
        for section in (self.server, self.workload, self.cooling, self.hap,
                        self.wind, self.channel, self.scenario):
            section.validate()
        # cross-section: configured rates must respect the utilization ceiling
        cap = self.server.desired_utilization * self.server.service_rate_ips
        for kind, rates in (("ground", self.scenario.ground_rates),
                            ("hap", self.scenario.hap_rates)):
            for r in rates:
                if r * self.workload.task_length_instr > cap * (1 + 1e-12):
                    raise ValidationError(
                        f"Scenario: {kind} rate {r} task/s exceeds the utilization "
                        "ceiling desired_utilization*service_rate/task_length"
                    )


def uniform_split(total: float, n: int) -> tuple[float, ...]:
    """Split ``total`` into ``n`` equal shares that sum to ``total`` exactly."""
    if n < 0:
        raise ValidationError("uniform_split: n must be non-negative")
    if n == 0:
        if total:
            raise ValidationError("uniform_split: cannot split a non-zero total over 0 servers")
        return ()
    if total < 0:
        raise ValidationError("uniform_split: total must be non-negative")
    share = total / n
    shares = [share] * n
    shares[-1] += total - math.fsum(shares)
    return tuple(shares)


def max_hap_servers(platform: HapPlatform, server: ServerSpec) -> int:
    """Servers the platform can lift after the rack: floor of spare mass, never negative."""
    spare = platform.payload_capacity - platform.rack_mass
    return max(0, math.floor(spare / server.mass))


_SECTION_TYPES = {
    "server": ServerSpec,
    "workload": WorkloadSpec,
    "cooling": CoolingSpec,
    "hap": HapPlatform,
    "wind": WindSpec,
    "channel": ChannelConfig,
    "scenario": Scenario,
}


def _coerce(name: str, value, section: str):
    if name == "window":
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            raise ConfigError(f"{section}.window must be a [t1, t2] pair")
        return (float(value[0]), float(value[1]))
    if name in ("ground_rates", "hap_rates"):
        if isinstance(value, (int, float)):
            return float(value)  # scalar total, split in Scenario.__post_init__
        return tuple(float(v) for v in value)
    if name == "fan":
        if value is None:
            return None
        return _build_section("cooling.fan", FanSpec, value)
    if name == "table":
        if value is None:
            return None
        return tuple(tuple(float(x) for x in row) for row in value)
    return value


def _build_section(section: str, cls, data: dict):
    if not isinstance(data, dict):
        raise ConfigError(f"config section '{section}' must be a mapping")
    known = {f.name for f in fields(cls)}
    kwargs = {}
    for key, value in data.items():
        if key not in known:
            raise ConfigError(f"unknown key '{key}' in config section '{section}'")
        kwargs[key] = _coerce(key, value, section)
    return cls(**kwargs)


def _load_wind_table(path: str, base_dir: str):
    full = path if os.path.isabs(path) else os.path.join(base_dir, path)
    rows = []
    try:
        with open(full, newline="") as fh:
            for rec in csv.DictReader(fh):
                rows.append((
                    float(rec["latitude_deg"]),
                    float(rec["day_of_year"]),
                    float(rec["wind_speed"]),
                ))
    except (OSError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot read wind table '{full}': {exc}") from exc
    if not rows:
        raise ConfigError(f"wind table '{full}' has no rows")
    return tuple(rows)


def load_config(path: str) -> ModelConfig:
    """Parse a YAML config file into a validated ModelConfig.

    Missing sections and fields use the library defaults; an empty file yields
    the full default configuration.  Unknown keys are rejected.
    """
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file '{path}': {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML in '{path}': {exc}") from exc
    return build_config(raw or {}, base_dir=os.path.dirname(os.path.abspath(path)))


def build_config(raw: dict, base_dir: str = ".") -> ModelConfig:
    """Build and validate a ModelConfig from an already-parsed mapping."""
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping of sections")
    sections = {}
    for name, data in raw.items():
        if name not in _SECTION_TYPES:
            raise ConfigError(f"unknown config section '{name}'")
        if name == "wind" and isinstance(data, dict) and "table_path" in data:
            data = dict(data)
            table_path = data.pop("table_path")
            if table_path is not None:
                data["table"] = _load_wind_table(str(table_path), base_dir)
        sections[name] = _build_section(name, _SECTION_TYPES[name], data or {})
    cfg = ModelConfig(**sections)
    cfg = replace(cfg, channel=cfg.channel.resolved())
    cfg.validate()
    return cfg


def dump_config(cfg: ModelConfig) -> dict:
    """Plain-type mapping that ``build_config`` parses back to an equal config."""
    out: dict = {}
    for section_name, obj in (
        ("server", cfg.server), ("workload", cfg.workload), ("cooling", cfg.cooling),
        ("hap", cfg.hap), ("wind", cfg.wind), ("channel", cfg.channel),
        ("scenario", cfg.scenario),
    ):
        sec = {}
        for f in fields(obj):
            value = getattr(obj, f.name)
            if isinstance(value, FanSpec):
                value = {sf.name: getattr(value, sf.name) for sf in fields(value)}
            elif isinstance(value, tuple):
                value = [list(v) if isinstance(v, tuple) else v for v in value]
            sec[f.name] = value
        out[section_name] = sec
    return out


def config_yaml(cfg: ModelConfig) -> str:
    return yaml.safe_dump(dump_config(cfg), sort_keys=True)


def config_hash(cfg: ModelConfig) -> str:
    """Stable sha256 of the fully-resolved configuration."""
    return hashlib.sha256(config_yaml(cfg).encode()).hexdigest()
