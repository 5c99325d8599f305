"""Shooting map from (time, position) back to the starting arc.

For t > 0 and x > 0 there is exactly one point on the arc

    ([0, inf) x {2})  union  ({0} x (0, 2])

whose orbit reaches x at time t while staying in q > 0 on (0, t).  The arc
is glued into one scalar parameter s (s <= 0 is the half-line piece, s in
(0, 2) the momentum piece), ordered so that larger s means a smaller
datum.  Along that order the terminal position flowQ(t, arc(s)) decreases
strictly, so a single bisection on s serves both pieces.

The positivity constraint is not checked after the fact: when a shock
exists at time t, the momentum piece of the bracket is cut at the first
momentum whose orbit has not yet returned to q = 0, which keeps the
shooting residual sign-definite below the root.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BracketFailure, DomainError, PositivityViolation
from .flow import DEFAULT_DT, terminal_batch, terminal_state
from .model import HamiltonianModel
from .period import invert_half_period, shock_time

DEFAULT_SHOOT_TOL = 1e-9

# Arc-parameter resolution target and iteration cap for the bisection.
ARC_TOL = 1e-12
MAX_BISECTIONS = 60

# Smallest momentum kept on the arc when no shock restricts the bracket,
# and the safety margin added above the first returning momentum when one
# does (the half-period inversion itself is accurate to 1e-9).
_P_FLOOR = 1e-9
_P_MARGIN = 2e-9


# ===== The glued arc =====

@dataclass(frozen=True)
class ArcParam:
    """Scalar coordinate on the glued starting arc.

    s <= 0 encodes the point (-s, 2) on the half-line piece; s in (0, 2)
    encodes (0, 2 - s) on the momentum piece; s = 0 is the corner (0, 2).
    Larger s means a smaller datum in the orbit-comparison order.
    """

    s: float

    def decode(self) -> tuple[float, float]:
        if self.s <= 0.0:
            return (-self.s, 2.0)
        if self.s < 2.0:
            return (0.0, 2.0 - self.s)
        raise DomainError(f"arc parameter must be < 2, got {self.s}")


def arc_decode(s):
    """Vectorized arc decoding: s -> (q0, p0) as arrays or floats."""
    if isinstance(s, np.ndarray):
        if np.any(s >= 2.0):
            raise DomainError("arc parameters must be < 2")
        q0 = np.where(s <= 0.0, -s, 0.0)
        p0 = np.where(s <= 0.0, 2.0, 2.0 - s)
        return q0, p0
    return ArcParam(float(s)).decode()


@dataclass(frozen=True)
class DeltaResult:
    """Converged shooting datum for one (t, x) query.

    ``residual`` is flowQ(t, q0, p0) - x at the accepted parameter.  In a
    narrow band around the separatrix image (x near the position of the
    orbit launched at the critical momentum) the terminal position is so
    sensitive to the datum that the residual may exceed the requested
    tolerance; callers that care should inspect it.
    """

    q0: float
    p0: float
    residual: float


# ===== Bracket construction =====

@lru_cache(maxsize=64)
def _shock_time_cached(model: HamiltonianModel) -> float:
    return shock_time(model)


def _momentum_floor(model: HamiltonianModel, t: float) -> float:
    """Smallest arc momentum whose orbit stays in q > 0 on (0, t)."""
    if model.separatrix_momentum <= 0.0:
        return _P_FLOOR
    if t <= _shock_time_cached(model):
        return _P_FLOOR
    try:
        return invert_half_period(model, t) + _P_MARGIN
    except DomainError:
        # t is inside the inversion's blind spot just above the infimum
        return _P_FLOOR


def _free_flight(model: HamiltonianModel, t: float, x: float):
    """Exact datum when the orbit never leaves the flat right tail."""
    q0 = x - 2.0 * t
    if q0 >= model.cutoff:
        return DeltaResult(q0=q0, p0=2.0, residual=0.0)
    return None


# ===== Shooting =====

def delta(model: HamiltonianModel, t: float, x: float,
          shoot_tol: float = DEFAULT_SHOOT_TOL,
          dt_max: float = DEFAULT_DT) -> DeltaResult:
    """Unique arc datum whose orbit reaches x at time t through q > 0.

    Monotone bisection on the glued arc parameter.  Raises DomainError
    for t <= 0 or x <= 0, BracketFailure when the initial bracket does
    not straddle the target (bad tolerances or inputs far outside the
    validated range), and PositivityViolation if the accepted orbit dips
    below q = 0 on (0, t).
    """
    if not (t > 0.0):
        raise DomainError(f"delta needs t > 0, got {t}")
    if not (x > 0.0):
        raise DomainError(f"delta needs x > 0, got {x}")
    free = _free_flight(model, t, x)
    if free is not None:
        return free

    lo = -x
    hi = 2.0 - _momentum_floor(model, t)
    q_lo, p_lo = arc_decode(lo)
    q_hi, p_hi = arc_decode(hi)
    f_lo = terminal_state(model, q_lo, p_lo, t, dt_max)[0] - x
    f_hi = terminal_state(model, q_hi, p_hi, t, dt_max)[0] - x
    if not (f_lo > 0.0 > f_hi):
        raise BracketFailure(
            f"no sign change on the arc bracket for t={t}, x={x}: "
            f"f({lo})={f_lo}, f({hi})={f_hi}")

    best = (lo, f_lo, 0.0)
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        q0, p0 = arc_decode(mid)
        q_end, _, min_q = terminal_state(model, q0, p0, t, dt_max)
        f_mid = q_end - x
        if abs(f_mid) < abs(best[1]):
            best = (mid, f_mid, min_q)
        if f_mid > 0.0:
            lo = mid
        else:
            hi = mid
        if abs(f_mid) <= 0.1 * shoot_tol or hi - lo <= ARC_TOL:
            break

    s_star, residual, min_q = best
    if min_q < -10.0 * shoot_tol:
        raise PositivityViolation(
            f"orbit for t={t}, x={x} dips to q={min_q} before t")
    q0, p0 = arc_decode(s_star)
    return DeltaResult(q0=q0, p0=p0, residual=residual)


def delta_batch(model: HamiltonianModel, t: float, xs: np.ndarray,
                shoot_tol: float = DEFAULT_SHOOT_TOL,
                dt_max: float = DEFAULT_DT):
    """Vectorized delta over many positions at one time.

    Returns (q0, p0, residual) arrays aligned with ``xs``.  Far-field
    points that never feel the potential are filled with the exact
    free-flight datum; the rest share one batched bisection.
    """
    xs = np.asarray(xs, dtype=float)
    if not (t > 0.0):
        raise DomainError(f"delta_batch needs t > 0, got {t}")
    if np.any(xs <= 0.0):
        raise DomainError("delta_batch needs x > 0 everywhere")

    q0_out = np.empty_like(xs)
    p0_out = np.empty_like(xs)
    res_out = np.zeros_like(xs)

    free = xs - 2.0 * t >= model.cutoff
    q0_out[free] = xs[free] - 2.0 * t
    p0_out[free] = 2.0

    shoot = ~free
    if np.any(shoot):
        x_s = xs[shoot]
        lo = -x_s
        hi = np.full_like(x_s, 2.0 - _momentum_floor(model, t))
        best_s = lo.copy()
        best_f = np.full_like(x_s, np.inf)
        best_minq = np.zeros_like(x_s)
        for _ in range(MAX_BISECTIONS):
            mid = 0.5 * (lo + hi)
            q0, p0 = arc_decode(mid)
            q_end, _, min_q = terminal_batch(model, q0, p0, t, dt_max)
            f = q_end - x_s
            better = np.abs(f) < np.abs(best_f)
            best_s[better] = mid[better]
            best_f[better] = f[better]
            best_minq[better] = min_q[better]
            above = f > 0.0
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
            if (np.max(hi - lo) <= ARC_TOL
                    or np.max(np.abs(f)) <= 0.1 * shoot_tol):
                break
        if np.any(best_minq < -10.0 * shoot_tol):
            worst = float(np.min(best_minq))
            raise PositivityViolation(
                f"batched orbits at t={t} dip to q={worst} before t")
        q0_s, p0_s = arc_decode(best_s)
        q0_out[shoot] = q0_s
        p0_out[shoot] = p0_s
        res_out[shoot] = best_f
    return q0_out, p0_out, res_out


# ===== Continuity scan =====

@dataclass(frozen=True)
class ContinuityReport:
    """Discrete modulus of continuity of the shooting map on a grid.

    ``s_values`` holds the arc parameter; jumps between grid neighbors
    are compared against 10x the grid step in the same direction.
    """

    t_values: np.ndarray
    x_values: np.ndarray
    s_values: np.ndarray
    p0_values: np.ndarray
    max_jump_t: float
    max_jump_x: float
    threshold_t: float
    threshold_x: float
    flags: tuple

    @property
    def ok(self) -> bool:
        return not self.flags


def delta_continuity_scan(model: HamiltonianModel, t_range, x_range,
                          n: int, dt_max: float = 4e-3) -> ContinuityReport:
    """Scan delta over a (t, x) rectangle and flag continuity breaks.

    A neighbor-to-neighbor jump of the arc parameter larger than 10x the
    grid step in that direction is flagged.  A degenerate rectangle (one
    point) yields an empty report.
    """
    t0, t1 = map(float, t_range)
    x0, x1 = map(float, x_range)
    n_t = n if t1 > t0 else 1
    n_x = n if x1 > x0 else 1
    t_vals = np.linspace(t0, t1, n_t)
    x_vals = np.linspace(x0, x1, n_x)

    s_grid = np.empty((n_t, n_x))
    p_grid = np.empty((n_t, n_x))
    for i, t in enumerate(t_vals):
        q0, p0, _ = delta_batch(model, float(t), x_vals, dt_max=dt_max)
        s_grid[i] = np.where(q0 > 0.0, -q0, 2.0 - p0)
        p_grid[i] = p0

    step_t = (t1 - t0) / (n_t - 1) if n_t > 1 else 0.0
    step_x = (x1 - x0) / (n_x - 1) if n_x > 1 else 0.0
    jumps_t = np.abs(np.diff(s_grid, axis=0))
    jumps_x = np.abs(np.diff(s_grid, axis=1))
    thr_t = 10.0 * step_t
    thr_x = 10.0 * step_x

    flags = []
    if jumps_t.size:
        for i, j in zip(*np.nonzero(jumps_t > thr_t)):
            flags.append(("t", int(i), int(j), float(jumps_t[i, j])))
    if jumps_x.size:
        for i, j in zip(*np.nonzero(jumps_x > thr_x)):
            flags.append(("x", int(i), int(j), float(jumps_x[i, j])))

    return ContinuityReport(
        t_values=t_vals, x_values=x_vals, s_values=s_grid,
        p0_values=p_grid,
        max_jump_t=float(np.max(jumps_t)) if jumps_t.size else 0.0,
        max_jump_x=float(np.max(jumps_x)) if jumps_x.size else 0.0,
        threshold_t=thr_t, threshold_x=thr_x, flags=tuple(flags))
