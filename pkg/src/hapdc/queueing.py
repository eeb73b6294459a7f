"""Single-server queue with exponential service and multiple server vacations.

The closed form gives the stationary mean wait from the residual-work view;
``simulate_mm1_vacations`` is a from-scratch discrete-event simulation that
plays the vacation discipline literally (the server keeps drawing fresh
vacations while the system is empty) so the two routes stay independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import StabilityError

_VACATION_CHUNK = 8192


def utilization(arrival_rate: float, service_rate: float) -> float:
    if service_rate <= 0:
        raise ValueError("service_rate must be positive")
    if arrival_rate < 0:
        raise ValueError("arrival_rate must be non-negative")
    return arrival_rate / service_rate


def residual_time(arrival_rate: float, service_rate: float,
                  vacation_rate: float) -> float:
    """Mean residual work seen at arrival: service in flight plus vacation tail."""
    if vacation_rate <= 0:
        raise ValueError("vacation_rate must be positive")
    u = utilization(arrival_rate, service_rate)
    service_part = arrival_rate / service_rate**2
    vacation_part = (1.0 - u) / vacation_rate
    return service_part + vacation_part


def mean_wait(arrival_rate: float, service_rate: float,
              vacation_rate: float) -> float:
    """Stationary mean queueing delay (arrival to service start), s.

    Raises StabilityError at or beyond utilization 1.
    """
    u = utilization(arrival_rate, service_rate)
    if u >= 1.0:
        raise StabilityError(
            f"queue is unstable: utilization {u:.6g} >= 1 "
            f"(arrival_rate={arrival_rate}, service_rate={service_rate})"
        )
    return residual_time(arrival_rate, service_rate, vacation_rate) / (1.0 - u)


@dataclass(frozen=True)
class SimulationResult:
    tasks: int
    horizon: float
    mean_wait: float
    stderr: float
    mean_queue_length: float
    little_queue_length: float
    busy_fraction: float


def simulate_mm1_vacations(arrival_rate: float, service_rate: float,
                           vacation_rate: float, n_tasks: int,
                           rng: np.random.Generator | None = None,
                           batches: int = 40) -> SimulationResult:
    """Simulate ``n_tasks`` Poisson arrivals through the vacation queue.

    FIFO order, one server.  Whenever the system empties the server leaves
    on an exponential vacation and, on returning to an empty queue, leaves
    again; a task arriving mid-vacation waits for that vacation to end.
    Waits are measured arrival to service start.  The standard error comes
    from contiguous batch means; ``mean_queue_length`` is recomputed from
    the event sequence independently of the per-task waits so Little's law
    can be checked against ``little_queue_length``.
    """
    if arrival_rate <= 0:
        raise ValueError("arrival_rate must be positive")
    if service_rate <= 0 or vacation_rate <= 0:
        raise ValueError("service and vacation rates must be positive")
    if n_tasks < batches:
        raise ValueError("n_tasks must be at least the batch count")
    u = arrival_rate / service_rate
    if u >= 1.0:
        raise StabilityError(f"cannot simulate an unstable queue (utilization {u:.6g})")
    if rng is None:
        rng = np.random.default_rng()

    arrivals = np.cumsum(rng.exponential(1.0 / arrival_rate, n_tasks))
    services = rng.exponential(1.0 / service_rate, n_tasks)
    vacation_pool = rng.exponential(1.0 / vacation_rate, _VACATION_CHUNK)
    pool_next = 0
    starts = np.empty(n_tasks)

    busy_until = 0.0  # server idle (vacationing) from t=0: the system starts empty
    for i in range(n_tasks):
        a = arrivals[i]
        if a >= busy_until:
            # system emptied at busy_until; vacations run back to back from there
            edge = busy_until
            while True:
                if pool_next == len(vacation_pool):
                    vacation_pool = rng.exponential(1.0 / vacation_rate, _VACATION_CHUNK)
                    pool_next = 0
                edge += vacation_pool[pool_next]
                pool_next += 1
                if edge > a:
                    break
            start = edge
        else:
            start = busy_until
        starts[i] = start
        busy_until = start + services[i]

    waits = starts - arrivals
    horizon = busy_until
    per_batch = n_tasks // batches
    used = per_batch * batches
    batch_means = waits[:used].reshape(batches, per_batch).mean(axis=1)
    stderr = batch_means.std(ddof=1) / math.sqrt(batches)

    # independent reconstruction of the waiting-room occupancy over time
    times = np.concatenate([arrivals, starts])
    deltas = np.concatenate([np.ones(n_tasks), -np.ones(n_tasks)])
    order = np.argsort(times, kind="stable")
    times = times[order]
    occupancy = np.cumsum(deltas[order])
    mean_queue = float(
        np.dot(occupancy[:-1], np.diff(times)) / horizon
    )
    little_queue = (n_tasks / horizon) * waits.mean()

    return SimulationResult(
        tasks=n_tasks,
        horizon=float(horizon),
        mean_wait=float(waits.mean()),
        stderr=float(stderr),
        mean_queue_length=mean_queue,
        little_queue_length=float(little_queue),
        busy_fraction=float(services.sum() / horizon),
    )
