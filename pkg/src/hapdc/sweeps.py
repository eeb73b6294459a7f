"""Axis sweeps over the model with deterministic seeding and file output.

A sweep walks one scenario knob over an inclusive range, evaluates one of
the four analyses at every grid point, and renders the rows as RFC-4180
CSV (with a ``#`` manifest header) or as a JSON mirror.  Reruns with the
same config, seed, and worker count produce byte-identical files; the
worker count itself never changes the numbers because random draws are
keyed to fixed chunk indices, not to scheduling order.

Per-point failures (a polar night, an overloaded fleet) land in the
row's ``error`` column and the sweep carries on; a sweep where every
point failed is reported as infeasible by the caller.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import channel, offload, queueing
from ._version import __version__
from .config import ModelConfig, config_hash, uniform_split
from .errors import (ConfigError, LinkRateError, LinkSaturationWarning,
                     OverloadError, PolarError, StabilityError)

AXES = ("latitude", "day", "hap_servers", "arrival_rate")

# Monte Carlo draws are partitioned into fixed-size chunks, each with its
# own counter-keyed seed, so partial sums commute and any worker count
# reproduces the single-process bytes.
MC_CHUNK = 20_000

_ROW_ERRORS = (PolarError, OverloadError, StabilityError, LinkRateError)


@dataclass(frozen=True)
class SweepSpec:
    """One axis, an inclusive start:stop:step range, and run controls.

    ``fixed`` holds scenario-field overrides applied before the walk;
    ``outputs`` optionally narrows the emitted metric columns (the axis
    and error columns always stay).
    """

    axis: str
    start: float
    stop: float
    step: float
    seed: int = 0
    samples: int = 100_000
    workers: int = 1
    fixed: tuple[tuple[str, object], ...] = ()
    outputs: tuple[str, ...] = ()

    def __post_init__(self):
        if isinstance(self.fixed, dict):
            object.__setattr__(self, "fixed", tuple(self.fixed.items()))
        if self.axis not in AXES:
            raise ConfigError(f"unknown sweep axis {self.axis!r}; "
                              f"expected one of {', '.join(AXES)}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)
                and math.isfinite(self.step)):
            raise ConfigError("sweep range must be finite")
        if self.step <= 0:
            raise ConfigError("sweep step must be positive")
        if self.stop < self.start:
            raise ConfigError("sweep range is empty (stop < start)")
        if self.samples < 1:
            raise ConfigError("samples must be at least 1")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")

    def values(self) -> list[float]:
        """Grid points, start-inclusive, stop-inclusive up to float slack."""
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        vals = [self.start + k * self.step for k in range(count)]
        if self.axis == "latitude":
            if any(v < -90.0 or v > 90.0 for v in vals):
                raise ConfigError("latitude axis must stay within [-90, 90]")
        elif self.axis == "day":
            if any(v < 0.0 or v > 366.0 for v in vals):
                raise ConfigError("day axis must stay within [0, 366]")
        elif self.axis == "hap_servers":
            for v in vals:
                if abs(v - round(v)) > 1e-9 or round(v) < 1:
                    raise ConfigError("hap_servers axis needs whole numbers >= 1")
        else:
            if vals[0] < 0.0:
                raise ConfigError("arrival_rate axis must be non-negative")
        return vals


@dataclass
class SweepResult:
    header: list[str]
    rows: list[list]
    manifest: dict[str, str]
    notes: list[str] = field(default_factory=list)

    @property
    def all_failed(self) -> bool:
        """True when every grid point errored (nothing feasible anywhere)."""
        return bool(self.rows) and all(row[-1] is not None for row in self.rows)


_SCENARIO_FIELDS = ("latitude_deg", "day_of_year", "window", "ground_servers",
                    "hap_servers", "hap_count", "ground_rates", "hap_rates")


def apply_fixed(cfg: ModelConfig, fixed) -> ModelConfig:
    """Apply scenario-field overrides before a sweep walks its axis."""
    if not fixed:
        return cfg
    items = fixed.items() if isinstance(fixed, dict) else fixed
    updates = {}
    for key, value in items:
        if key not in _SCENARIO_FIELDS:
            raise ConfigError(f"unknown scenario override {key!r}")
        updates[key] = value
    for count_key, rates_key in (("hap_servers", "hap_rates"),
                                 ("ground_servers", "ground_rates")):
        if count_key in updates and rates_key not in updates:
            updates[count_key] = int(updates[count_key])
            updates[rates_key] = (0.0,) * updates[count_key]
    return replace(cfg, scenario=replace(cfg.scenario, **updates))


def _select_columns(result: SweepResult, outputs) -> SweepResult:
    """Keep only the requested metric columns (axis and error always stay)."""
    if not outputs:
        return result
    wanted = set(outputs)
    unknown = wanted - set(result.header)
    if unknown:
        raise ConfigError(f"unknown output column(s): {', '.join(sorted(unknown))}")
    keep = [i for i, name in enumerate(result.header)
            if i == 0 or name == "error" or name in wanted]
    result.header = [result.header[i] for i in keep]
    result.rows = [[row[i] for i in keep] for row in result.rows]
    return result


def apply_axis(cfg: ModelConfig, axis: str, value: float) -> ModelConfig:
    """Config with one scenario/workload knob replaced by the grid value."""
    sc = cfg.scenario
    if axis == "latitude":
        return replace(cfg, scenario=replace(sc, latitude_deg=float(value)))
    if axis == "day":
        return replace(cfg, scenario=replace(sc, day_of_year=float(value)))
    if axis == "hap_servers":
        n = int(round(value))
        sc = replace(sc, hap_servers=n, hap_rates=(0.0,) * n)
        return replace(cfg, scenario=sc)
    if axis == "arrival_rate":
        wl = replace(cfg.workload, arrival_rate_total=float(value))
        return replace(cfg, workload=wl)
    raise ConfigError(f"unknown sweep axis {axis!r}")


def _base_manifest(cfg: ModelConfig, spec: SweepSpec) -> dict[str, str]:
    return {
        "tool": f"hapdc {__version__}",
        "config": config_hash(cfg),
        "seed": str(spec.seed),
        "axis": spec.axis,
        "range": f"{spec.start!r}:{spec.stop!r}:{spec.step!r}",
    }


def _map_points(fn, args, workers: int):
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, args))
    return [fn(a) for a in args]


# --- flying-condition sweep -------------------------------------------------

def _fly_row(args):
    cfg, axis, value = args
    try:
        pt = apply_axis(cfg, axis, value)
        sc = pt.scenario
        lam, threshold, binding = offload.fly_point(
            sc.latitude_deg, sc.day_of_year, sc.hap_servers, pt)
        return [value, lam, threshold, binding, None]
    except _ROW_ERRORS as exc:
        return [value, None, None, None, str(exc)]


def run_flying_sweep(cfg: ModelConfig, spec: SweepSpec) -> SweepResult:
    """Admissible offload rate and its binding limit along the axis."""
    cfg = apply_fixed(cfg, spec.fixed)
    if cfg.scenario.hap_servers < 1:
        raise ConfigError("flying sweep needs at least one airborne server")
    vals = spec.values()
    rows = _map_points(_fly_row, [(cfg, spec.axis, v) for v in vals],
                       spec.workers)
    header = [spec.axis, "lambda_max", "threshold", "binding", "error"]
    return _select_columns(SweepResult(header, rows, _base_manifest(cfg, spec)),
                           spec.outputs)


# --- energy-saving sweep ----------------------------------------------------

def _energy_row(args):
    cfg, axis, value = args
    try:
        pt = apply_axis(cfg, axis, value)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            sc = offload.allocated_scenario(pt)
            rep = offload.saving(sc, pt, with_retransmission=True)
        saturated = sum(1 for w in caught
                        if issubclass(w.category, LinkSaturationWarning))
        return ([value, rep.e_tdc_j, rep.e_hybrid_j, rep.saved_rate,
                 rep.retransmissions, None], saturated)
    except _ROW_ERRORS as exc:
        return [value, None, None, None, None, str(exc)], 0


def run_energy_sweep(cfg: ModelConfig, spec: SweepSpec) -> SweepResult:
    """Baseline vs. split-system energy (retransmission variant) along the axis."""
    cfg = apply_fixed(cfg, spec.fixed)
    vals = spec.values()
    out = _map_points(_energy_row, [(cfg, spec.axis, v) for v in vals],
                      spec.workers)
    rows = [row for row, _ in out]
    saturated = sum(n for _, n in out)
    result = SweepResult(
        [spec.axis, "e_tdc", "e_hybrid", "saved_rate", "n_retx", "error"],
        rows, _base_manifest(cfg, spec))
    if saturated:
        result.notes.append(
            f"{saturated} grid point(s) offered more traffic than the link "
            "carries; their energy figures assume the backlog still goes out")
    return _select_columns(result, spec.outputs)


# --- outage sweep -----------------------------------------------------------

def _offload_scenario(cfg: ModelConfig, per_link_rate: float):
    """Scenario whose platforms each carry ``per_link_rate`` of offload.

    The ground fleet keeps whatever the configured total leaves over
    (never negative).
    """
    sc = cfg.scenario
    hap = uniform_split(per_link_rate, sc.hap_servers)
    ground_total = max(0.0, cfg.workload.arrival_rate_total
                       - per_link_rate * sc.hap_count)
    ground = uniform_split(ground_total, sc.ground_servers)
    return replace(sc, hap_rates=hap, ground_rates=ground)


def _outage_row(args):
    cfg, value = args
    ch = cfg.channel.resolved()
    try:
        demand = channel.spectral_demand(ch, cfg.workload, value)
        lb = channel.ccdf_lower(ch, demand)
        ub = channel.ccdf_upper(ch, demand)
        sc = _offload_scenario(cfg, value)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", LinkSaturationWarning)
            with_r = offload.saving(sc, cfg, with_retransmission=True)
            without = offload.saving(sc, cfg, with_retransmission=False)
        return [value, lb, ub, None, None, 1.0 - lb,
                with_r.saved_rate, without.saved_rate, None]
    except _ROW_ERRORS as exc:
        return [value, None, None, None, None, None, None, None, str(exc)]


def _mc_chunk(args):
    cfg, thresholds, count, seed, chunk_index = args
    rng = np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(chunk_index,)))
    ch = cfg.channel.resolved()
    rates = channel.channel_rate(ch, channel.sample_channel(ch, count, rng))
    return (rates[None, :] > thresholds[:, None]).sum(axis=1)


def run_outage_sweep(cfg: ModelConfig, spec: SweepSpec) -> SweepResult:
    """Offload-link outage bounds, Monte Carlo check, and saving columns.

    The axis is the per-platform offload arrival rate; outage is a link
    property, so no other axis applies.
    """
    if spec.axis != "arrival_rate":
        raise ConfigError("outage sweeps run over the arrival_rate axis")
    cfg = apply_fixed(cfg, spec.fixed)
    if cfg.scenario.hap_servers < 1:
        raise ConfigError("outage sweep needs at least one airborne server")
    vals = spec.values()
    rows = _map_points(_outage_row, [(cfg, v) for v in vals], spec.workers)

    ch = cfg.channel.resolved()
    demands = np.array([channel.spectral_demand(ch, cfg.workload, v)
                        for v in vals])
    thresholds = demands * ch.bandwidth_hz
    sizes = [MC_CHUNK] * (spec.samples // MC_CHUNK)
    if spec.samples % MC_CHUNK:
        sizes.append(spec.samples % MC_CHUNK)
    chunk_args = [(cfg, thresholds, n, spec.seed, c)
                  for c, n in enumerate(sizes)]
    counts = sum(_map_points(_mc_chunk, chunk_args, spec.workers))
    prob = counts / spec.samples
    edge = (counts == 0) | (counts == spec.samples)
    adjusted = np.where(edge, (counts + 0.5) / (spec.samples + 1.0), prob)
    se = np.sqrt(adjusted * (1.0 - adjusted) / spec.samples)
    for i, row in enumerate(rows):
        if row[-1] is None:
            row[3] = float(prob[i])
            row[4] = float(se[i])

    manifest = _base_manifest(cfg, spec)
    manifest["samples"] = str(spec.samples)
    header = ["lambda", "ccdf_lb", "ccdf_ub", "ccdf_mc", "ccdf_mc_se",
              "drop_rate", "saved_with_retx", "saved_without", "error"]
    return _select_columns(SweepResult(header, rows, manifest), spec.outputs)


# --- delay sweep ------------------------------------------------------------

def _delay_row(args):
    cfg, value, seed, index, n_tasks = args
    try:
        rep = offload.end_to_end_delay(cfg, value)
    except _ROW_ERRORS as exc:
        return [value, None, None, None, None, None, None, str(exc)]
    regime = "transport" if rep.transport_dominated else "queueing"
    des_wait = des_se = None
    if value > 0.0:
        service_rate = (cfg.scenario.hap_servers
                        * cfg.server.service_rate_ips
                        / cfg.workload.task_length_instr)
        rng = np.random.default_rng(
            np.random.SeedSequence(seed, spawn_key=(index,)))
        sim = queueing.simulate_mm1_vacations(
            value, service_rate, cfg.workload.vacation_rate, n_tasks, rng)
        des_wait, des_se = sim.mean_wait, sim.stderr
    return [value, rep.mean_wait_s, des_wait, des_se, rep.rtt_s,
            rep.total_delay_s, regime, None]


def run_delay_sweep(cfg: ModelConfig, spec: SweepSpec) -> SweepResult:
    """Analytic and simulated offload delay over the arrival-rate axis."""
    if spec.axis != "arrival_rate":
        raise ConfigError("delay sweeps run over the arrival_rate axis")
    cfg = apply_fixed(cfg, spec.fixed)
    if cfg.scenario.hap_servers < 1:
        raise ConfigError("delay sweep needs at least one airborne server")
    vals = spec.values()
    args = [(cfg, v, spec.seed, i, spec.samples) for i, v in enumerate(vals)]
    rows = _map_points(_delay_row, args, spec.workers)
    manifest = _base_manifest(cfg, spec)
    manifest["samples"] = str(spec.samples)
    header = ["lambda", "analytic_wait", "des_wait", "des_se", "rtt",
              "total", "regime", "error"]
    return _select_columns(SweepResult(header, rows, manifest), spec.outputs)


# --- rendering --------------------------------------------------------------

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def render_csv(result: SweepResult) -> str:
    """RFC-4180 text: ``#`` manifest lines, header row, data rows."""
    buf = io.StringIO()
    for key, val in result.manifest.items():
        buf.write(f"# {key}={val}\r\n")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(result.header)
    for row in result.rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def render_json(result: SweepResult) -> str:
    """JSON mirror of the CSV: manifest, column names, row arrays."""
    def native(v):
        if isinstance(v, (np.integer,)):
            return int(v)
        if isinstance(v, (np.floating,)):
            return float(v)
        if isinstance(v, (np.bool_,)):
            return bool(v)
        return v

    payload = {
        "manifest": result.manifest,
        "columns": result.header,
        "rows": [[native(v) for v in row] for row in result.rows],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


RUNNERS = {
    "fly": run_flying_sweep,
    "energy": run_energy_sweep,
    "outage": run_outage_sweep,
    "delay": run_delay_sweep,
}
