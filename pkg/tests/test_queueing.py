"""Vacation queue: closed form against the discrete-event simulation."""

import math

import numpy as np
import pytest

from hapdc import queueing
from hapdc.errors import StabilityError


def test_residual_time_no_arrivals():
    # empty system: an arrival only ever waits out a residual vacation
    assert queueing.residual_time(0.0, 2.0, 4.0) == 0.25


def test_frozen_closed_form_instance():
    # picked so the numbers come out round: u = 1/2,
    # residual = 1/4 + (1/2)*(3/2) = 1, wait = 1/(1 - 1/2) = 2
    assert queueing.residual_time(1.0, 2.0, 2.0 / 3.0) == 1.0
    assert queueing.mean_wait(1.0, 2.0, 2.0 / 3.0) == 2.0


def test_unstable_raises():
    with pytest.raises(StabilityError):
        queueing.mean_wait(2.0, 2.0, 1.0)
    with pytest.raises(StabilityError):
        queueing.mean_wait(2.5, 2.0, 1.0)
    with pytest.raises(StabilityError):
        queueing.simulate_mm1_vacations(2.0, 2.0, 1.0, 1000)


def test_bad_rates_rejected():
    with pytest.raises(ValueError):
        queueing.mean_wait(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        queueing.mean_wait(-1.0, 2.0, 1.0)
    with pytest.raises(ValueError):
        queueing.residual_time(1.0, 2.0, 0.0)


def test_rare_vacations_recover_plain_queue():
    # with near-instant vacations this is the textbook M/M/1 wait
    lam, mu = 3.0, 5.0
    want = lam / (mu * (mu - lam))
    got = queueing.mean_wait(lam, mu, 1e12)
    assert math.isclose(got, want, rel_tol=1e-6)


def test_wait_monotone_and_diverging():
    mu, nu = 2.0, 5.0
    lams = [0.2, 0.8, 1.4, 1.8, 1.98]
    waits = [queueing.mean_wait(l, mu, nu) for l in lams]
    assert waits == sorted(waits)
    assert waits[-1] > 20.0 * waits[0]


def test_simulation_matches_closed_form():
    mu, nu = 2.0, 1.0
    for u in (0.3, 0.6, 0.8):
        lam = u * mu
        want = queueing.mean_wait(lam, mu, nu)
        sim = queueing.simulate_mm1_vacations(
            lam, mu, nu, 200_000, rng=np.random.default_rng(int(u * 10)))
        tol = max(0.02 * want, 3.0 * sim.stderr)
        assert abs(sim.mean_wait - want) <= tol, (u, sim.mean_wait, want)


def test_simulation_low_load_sees_vacation_tail():
    # nearly every arrival finds the server mid-vacation
    sim = queueing.simulate_mm1_vacations(
        0.005, 1.0, 0.05, 100_000, rng=np.random.default_rng(99))
    assert abs(sim.mean_wait - 1.0 / 0.05) <= 3.0 * sim.stderr


def test_simulation_littles_law_self_consistent():
    sim = queueing.simulate_mm1_vacations(
        1.0, 2.0, 1.0, 100_000, rng=np.random.default_rng(17))
    # occupancy integrated from the event walk vs arrival rate times wait
    assert math.isclose(sim.mean_queue_length, sim.little_queue_length,
                        rel_tol=1e-9)


def test_simulation_seed_deterministic():
    a = queueing.simulate_mm1_vacations(1.0, 2.0, 1.0, 5000,
                                        rng=np.random.default_rng(4))
    b = queueing.simulate_mm1_vacations(1.0, 2.0, 1.0, 5000,
                                        rng=np.random.default_rng(4))
    assert a == b


def test_simulation_busy_fraction_tracks_utilization():
    sim = queueing.simulate_mm1_vacations(
        1.2, 2.0, 1.0, 200_000, rng=np.random.default_rng(30))
    assert abs(sim.busy_fraction - 0.6) < 0.01


def test_simulation_guards():
    with pytest.raises(ValueError):
        queueing.simulate_mm1_vacations(0.0, 1.0, 1.0, 1000)
    with pytest.raises(ValueError):
        queueing.simulate_mm1_vacations(1.0, 2.0, 1.0, 10, batches=40)
