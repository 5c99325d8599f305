"""Backward shooting map: limits, monotonicity and continuity."""
from __future__ import annotations

import numpy as np
import pytest

from hetclaw.errors import DomainError
from hetclaw.flow import flow_q, terminal_batch
from hetclaw.shooting import delta, delta_batch, delta_continuity_scan


# ===== Small-time limit =====

def test_short_horizons_shoot_from_nearby(quartic):
    """As the horizon shrinks the datum approaches (x, top momentum)."""
    last_dev = np.inf
    for t in (0.2, 0.05, 0.01):
        res = delta(quartic, t, 0.7)
        assert res.p0 == 2.0
        # the uphill slowdown shifts the foot right of the free-flight
        # estimate by the second-order term, about g'(0.7)/2 * t^2
        dev = res.q0 - (0.7 - 2.0 * t)
        assert 0.0 < dev < t * t
        assert dev < last_dev
        last_dev = dev
    res = delta(quartic, 0.01, 0.7)
    assert abs(res.q0 - 0.7) < 0.021


# ===== Uniqueness and consistency =====

def test_momentum_grows_with_target_position(quartic):
    assert delta(quartic, 2.0, 0.3).p0 < delta(quartic, 2.0, 0.6).p0


def test_shot_lands_on_target(quartic):
    res = delta(quartic, 2.0, 0.5)
    assert abs(res.residual) <= 1e-8
    landed = flow_q(quartic, 2.0, res.q0, res.p0)
    assert abs(landed - 0.5) <= 1e-8


def test_brute_force_scan_agrees(quartic):
    """A dense sweep of every admissible datum finds the same shot,
    confirming the bisection picks the unique minimiser."""
    t, x = 2.0, 0.5
    n = 10_000
    half = n // 2
    p_launch = np.concatenate([np.linspace(1e-3, 2.0, half),
                               np.full(n - half, 2.0)])
    q_launch = np.concatenate([np.zeros(half),
                               np.linspace(1e-6, 1.0, n - half)])
    Q, _, MN = terminal_batch(quartic, q_launch, p_launch, t)
    ok = MN >= 0.0
    miss = np.where(ok, np.abs(Q - x), np.inf)
    best = int(np.argmin(miss))
    res = delta(quartic, t, x)
    assert abs(q_launch[best] - res.q0) < 2e-3
    assert abs(p_launch[best] - res.p0) < 2e-3


def test_batch_matches_scalar(quartic):
    xs = np.linspace(0.1, 4.0, 12)
    q0, p0, residual = delta_batch(quartic, 2.0, xs)
    assert np.max(np.abs(residual)) <= 1e-7
    for j, x in enumerate(xs):
        res = delta(quartic, 2.0, float(x))
        assert q0[j] == pytest.approx(res.q0, abs=1e-8)
        assert p0[j] == pytest.approx(res.p0, abs=1e-8)


# ===== Continuity =====

def test_no_continuity_breaks_on_the_working_rectangle(quartic):
    report = delta_continuity_scan(quartic, (0.5, 3.0), (0.1, 2.0), 50)
    assert report.ok
    assert report.flags == ()


def test_degenerate_rectangle_is_empty(quartic):
    report = delta_continuity_scan(quartic, (1.0, 1.0), (0.5, 0.5), 1)
    assert report.ok


# ===== Domain errors =====

@pytest.mark.parametrize("t,x", [(0.0, 0.5), (-1.0, 0.5), (2.0, 0.0), (2.0, -0.4)])
def test_rejects_degenerate_queries(quartic, t, x):
    with pytest.raises(DomainError):
        delta(quartic, t, x)
