"""Inverse design by backward characteristics.

Given a target profile w at time T, every sample (x, w(x)) is carried
backward through the characteristic system to its foot (q(0), p(0)).
The feet being nondecreasing in x is the observable criterion for the
profile to be reachable from some initial datum; the graph of momenta
over feet is then a candidate datum, and a forward finite-volume run
closes the loop.  A ray-fan utility launches backward orbits from one
point with interpolated terminal momenta and reports how they cross or
spread, which distinguishes the x-dependent well from the homogeneous
model, where all rays are straight lines.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .charsol import solution_profile
from .errors import DomainError, NonMonotoneFeet
from .flow import DEFAULT_DT, integrate_batch, terminal_batch
from .fvm import DEFAULT_CFL, CellField, Grid1D, evolve
from .model import HamiltonianModel
from .period import invert_half_period, shock_time
from .shooting import DEFAULT_SHOOT_TOL

DEFAULT_MONOTONE_TOL = 1e-6
DEFAULT_COLLAPSE_TOL = 1e-4


# ===== Profiles =====

@dataclass(frozen=True)
class Jump:
    """A tagged discontinuity with its one-sided values."""

    x: float
    w_minus: float
    w_plus: float


@dataclass(frozen=True)
class Profile:
    """Sampled profile: strictly increasing positions, finite values.

    Discontinuities are carried as explicit tags rather than as steep
    sample pairs, so downstream code can launch both one-sided values.
    """

    xs: np.ndarray
    ws: np.ndarray
    jumps: tuple = ()

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ws = np.asarray(self.ws, dtype=float)
        if xs.ndim != 1 or xs.shape != ws.shape or xs.size < 2:
            raise DomainError("profile needs matching 1-D axes, >= 2 samples")
        if np.any(np.diff(xs) <= 0.0):
            raise DomainError("profile positions must be strictly increasing")
        if not (np.isfinite(xs).all() and np.isfinite(ws).all()):
            raise DomainError("profile samples must be finite")
        for j in self.jumps:
            if np.any(xs == j.x):
                raise DomainError(f"jump at x={j.x} collides with a sample; "
                                  "tag it or sample it, not both")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ws", ws)

    def sample(self, x):
        """Interpolate at x, honoring jump tags via one-sided side points."""
        xp, vp = self.xs, self.ws
        for j in self.jumps:
            k = np.searchsorted(xp, j.x)
            xp = np.insert(xp, k, (j.x - 1e-12, j.x + 1e-12))
            vp = np.insert(vp, k, (j.w_minus, j.w_plus))
        return np.interp(np.asarray(x, dtype=float), xp, vp)


def profile_from_solution(model: HamiltonianModel, t: float, xs,
                          shoot_tol: float = DEFAULT_SHOOT_TOL,
                          dt_max: float = DEFAULT_DT) -> Profile:
    """Time slice of the semi-analytic solution as a taggable profile.

    Positions must avoid 0; once the standing jump at the origin has
    formed, it is tagged with exact one-sided traces from the half-period
    inversion rather than with offset samples.
    """
    xs = np.asarray(xs, dtype=float)
    ws = solution_profile(model, t, xs, shoot_tol, dt_max)
    jumps = ()
    if model.cutoff > 0.0 and t > shock_time(model):
        trace = invert_half_period(model, t)
        jumps = (Jump(0.0, trace, -trace),)
    return Profile(xs, ws, jumps)


# ===== Backward footprints =====

@dataclass(frozen=True)
class FootprintMap:
    """Backward-orbit feet for every (interleaved) profile sample.

    ``jump_pairs`` holds index pairs (i_minus, i_plus) into the
    interleaved arrays for each tagged discontinuity.
    """

    model: HamiltonianModel
    horizon: float
    xs: np.ndarray
    ws: np.ndarray
    feet: np.ndarray
    p0: np.ndarray
    jump_pairs: tuple = ()


def footprint(model: HamiltonianModel, t: float, w: Profile,
              dt_max: float = DEFAULT_DT) -> FootprintMap:
    """Carry every sample of w backward over [0, t].

    Tagged discontinuities launch both one-sided values from the same
    position, interleaved into the sample order, so the monotonicity
    test sees the extremal backward characteristics.
    """
    if t <= 0.0:
        raise DomainError(f"horizon must be positive, got {t}")
    launches = [(x, v) for x, v in zip(w.xs, w.ws)]
    for j in w.jumps:
        launches.append((j.x, j.w_minus))
        launches.append((j.x, j.w_plus))
    # jump sides keep their minus-then-plus order under a stable sort
    launches.sort(key=lambda pair: pair[0])
    xs = np.array([x for x, _ in launches])
    ws = np.array([v for _, v in launches])
    pairs = []
    for j in w.jumps:
        i = int(np.searchsorted(xs, j.x))
        pairs.append((i, i + 1))
    feet, p0, _ = terminal_batch(model, xs, ws, -t, dt_max)
    return FootprintMap(model, t, xs, ws, feet, p0, tuple(pairs))


def write_footprint_csv(path, fm: FootprintMap, header_lines=()) -> None:
    """Emit rows x,w,foot,p0."""
    with open(path, "w") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("x,w,foot,p0\n")
        for x, v, f, p in zip(fm.xs, fm.ws, fm.feet, fm.p0):
            fh.write(f"{x!r},{v!r},{f!r},{p!r}\n")


# ===== Reports =====

@dataclass(frozen=True)
class DesignReport:
    """Outcome of the reachability pipeline for one target profile."""

    monotone: bool
    violations: tuple
    gap_collapse: tuple
    reconstructed: Profile | None = None
    round_trip_l1: float | None = None

    def as_dict(self) -> dict:
        return {
            "monotone": self.monotone,
            "violations": [(int(i), float(d)) for i, d in self.violations],
            "gap_collapse": [(float(x), float(g))
                             for x, g in self.gap_collapse],
            "round_trip_l1": self.round_trip_l1,
            "reconstructed_samples": None if self.reconstructed is None
            else int(self.reconstructed.xs.size),
        }


def monotone_test(fm: FootprintMap,
                  tol: float = DEFAULT_MONOTONE_TOL) -> DesignReport:
    """Check the feet are nondecreasing within tol.

    The default tolerance absorbs the backward integrator's error, which
    is orders of magnitude below it.  Also reports, per tagged jump, the
    gap between the one-sided extremal feet: near zero means the target
    pins its datum there, a positive gap means a genuine cone of data.
    """
    d = np.diff(fm.feet)
    bad = np.nonzero(d < -tol)[0]
    violations = tuple((int(i), float(d[i])) for i in bad)
    gaps = tuple((float(fm.xs[im]), float(fm.feet[ip] - fm.feet[im]))
                 for im, ip in fm.jump_pairs)
    return DesignReport(monotone=bad.size == 0, violations=violations,
                        gap_collapse=gaps)


def reconstruct_vertex(fm: FootprintMap,
                       collapse_tol: float = DEFAULT_COLLAPSE_TOL,
                       tol: float = DEFAULT_MONOTONE_TOL) -> Profile:
    """Candidate initial datum: the momentum graph over the feet.

    Feet clustering within ``collapse_tol`` while the momentum sweeps a
    range are collapsed into a tagged jump (the fan or shock signature);
    elsewhere the graph is kept pointwise and resampled by monotone
    interpolation at evaluation time.
    """
    rep = monotone_test(fm, tol)
    if not rep.monotone:
        raise NonMonotoneFeet(f"{len(rep.violations)} decreasing feet "
                              f"(worst {min(d for _, d in rep.violations):.3g})")
    feet = np.maximum.accumulate(fm.feet)
    p0 = fm.p0

    # maximal runs of feet closer than collapse_tol
    keep_x, keep_w, jumps = [], [], []
    i = 0
    n = feet.size
    while i < n:
        j = i
        while j + 1 < n and feet[j + 1] - feet[j] <= collapse_tol:
            j += 1
        if j > i and abs(p0[j] - p0[i]) > 10.0 * collapse_tol:
            jumps.append(Jump(float(np.mean(feet[i:j + 1])),
                              float(p0[i]), float(p0[j])))
        else:
            for k in range(i, j + 1):
                keep_x.append(feet[k])
                keep_w.append(p0[k])
        i = j + 1

    xs = np.array(keep_x)
    ws = np.array(keep_w)
    # nudge ties apart so the profile axis is strictly increasing
    for k in range(1, xs.size):
        if xs[k] <= xs[k - 1]:
            xs[k] = xs[k - 1] + 1e-12
    for j in jumps:
        if np.any(xs == j.x):
            xs[xs == j.x] += 1e-12
    return Profile(xs, ws, tuple(jumps))


def round_trip(model: HamiltonianModel, t: float, w: Profile,
               window: tuple = (-3.0, 3.0), n: int = 4000,
               cfl: float = DEFAULT_CFL, dt_max: float = DEFAULT_DT,
               reconstructed: Profile | None = None,
               pad: float = 1.0) -> float:
    """L1 distance on the window between evolve(reconstruction, t) and w.

    The finite-volume domain is the window widened by the fastest wave,
    so no boundary effect reaches the comparison region.
    """
    if reconstructed is None:
        reconstructed = reconstruct_vertex(footprint(model, t, w, dt_max))
    speed = max(2.0, float(np.max(np.abs(reconstructed.ws))))
    grid = Grid1D(window[0] - speed * t - pad, window[1] + speed * t + pad, n)
    centers = grid.centers()
    u0 = CellField(grid, reconstructed.sample(centers))
    result = evolve(model, u0, t, cfl=cfl)
    inside = (centers >= window[0]) & (centers <= window[1])
    diff = np.abs(result.final.values[inside] - w.sample(centers[inside]))
    return float(np.sum(diff) * grid.dx)


def design_report(model: HamiltonianModel, t: float, w: Profile,
                  window: tuple = (-3.0, 3.0), n: int = 4000,
                  cfl: float = DEFAULT_CFL,
                  dt_max: float = DEFAULT_DT) -> DesignReport:
    """Full pipeline: footprint, monotone test, vertex, round trip."""
    fm = footprint(model, t, w, dt_max)
    rep = monotone_test(fm)
    if not rep.monotone:
        return rep
    rec = reconstruct_vertex(fm)
    err = round_trip(model, t, w, window, n, cfl, dt_max, reconstructed=rec)
    return replace(rep, reconstructed=rec, round_trip_l1=err)


# ===== Ray fans =====

@dataclass(frozen=True)
class RayFanReport:
    """Backward rays from one point with interpolated terminal momenta.

    ``positions[i, k]`` is ray k at ``times[i]`` (increasing, ending at
    the launch time).  Crossings are (i, j, s) with s strictly inside
    (0, horizon); exits are (k, s) where an interior ray leaves the
    envelope of the two extremal rays.
    """

    horizon: float
    momenta: np.ndarray
    times: np.ndarray
    positions: np.ndarray
    crossings: tuple
    exits: tuple

    @property
    def feet(self) -> np.ndarray:
        return self.positions[0]

    @property
    def has_interior_event(self) -> bool:
        return bool(self.crossings) or bool(self.exits)

    def extremal_crossings(self) -> tuple:
        last = self.momenta.size - 1
        return tuple(c for c in self.crossings
                     if {c[0], c[1]} == {0, last})

    def fill_ratio(self) -> float:
        """Largest foot gap relative to an even filling (1 = perfectly even)."""
        feet = np.sort(self.feet)
        span = feet[-1] - feet[0]
        if span <= 0.0:
            return float("inf")
        return float(np.max(np.diff(feet)) * (feet.size - 1) / span)

    def as_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "momenta": [float(p) for p in self.momenta],
            "crossings": [(int(i), int(j), float(s))
                          for i, j, s in self.crossings],
            "exits": [(int(k), float(s)) for k, s in self.exits],
            "feet": [float(f) for f in self.feet],
            "fill_ratio": self.fill_ratio(),
        }


def ray_fan(model: HamiltonianModel, t: float, x0: float,
            p_left: float, p_right: float, n_rays: int,
            n_times: int = 801, dt_max: float = DEFAULT_DT,
            exit_tol: float = 1e-6, cross_tol: float = 1e-6) -> RayFanReport:
    """Launch n_rays backward orbits from (t, x0), momenta interpolated.

    Terminal momenta sweep linearly from p_left to p_right; all rays are
    integrated on one shared time grid so crossings reduce to sign
    changes of pairwise differences, refined by linear interpolation.
    A sign change only counts when both sides clear ``cross_tol``:
    rays sharing a foot touch at solver-tolerance scale without
    crossing, while genuine fan crossings swing far wider.
    """
    if n_rays < 2:
        raise DomainError(f"need at least two rays, got {n_rays}")
    lam = np.linspace(0.0, 1.0, n_rays)
    momenta = (1.0 - lam) * p_left + lam * p_right
    record = np.linspace(0.0, -t, n_times)
    q, _ = integrate_batch(model, np.full(n_rays, float(x0)), momenta,
                           record, dt_max)
    positions = q[::-1]
    times = t + record[::-1]

    crossings = []
    for i in range(n_rays):
        for j in range(i + 1, n_rays):
            d = positions[:, i] - positions[:, j]
            hits = np.nonzero((d[:-1] * d[1:] < 0.0)
                              & (np.minimum(np.abs(d[:-1]),
                                            np.abs(d[1:])) > cross_tol))[0]
            for k in hits:
                frac = d[k] / (d[k] - d[k + 1])
                s = times[k] + frac * (times[k + 1] - times[k])
                if 0.0 < s < t:
                    crossings.append((i, j, float(s)))

    lo = np.minimum(positions[:, 0], positions[:, -1]) - exit_tol
    hi = np.maximum(positions[:, 0], positions[:, -1]) + exit_tol
    exits = []
    for k in range(1, n_rays - 1):
        out = np.nonzero((positions[:, k] < lo) | (positions[:, k] > hi))[0]
        out = out[(times[out] > 0.0) & (times[out] < t)]
        if out.size:
            exits.append((k, float(times[out[0]])))

    return RayFanReport(t, momenta, times, positions,
                        tuple(crossings), tuple(exits))


def write_rays_csv(path, report: RayFanReport, header_lines=()) -> None:
    """Emit long-format rows ray,t,q."""
    with open(path, "w") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("ray,t,q\n")
        for k in range(report.momenta.size):
            for s, q in zip(report.times, report.positions[:, k]):
                fh.write(f"{k},{s!r},{q!r}\n")
