"""Flux models of the form H(x, p) = p**2/2 + g(x).

The potential g encodes all of the spatial dependence.  It is required to
be flat outside a bounded interval [-cutoff, cutoff] so that characteristics
are straight lines far from the origin.  The default model is a quartic
well, g(x) = 1 - (1 - x**2)**4 inside [-1, 1] and g = 1 outside, whose
first and second derivatives are hard-coded closed forms.  Finite
differences are used only as a consistency check, never to drive the
dynamics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np


def _quartic_g(x):
    # 1 - (1-x^2)^4 in the factored form x^2 (2-x^2) (1 + (1-x^2)^2),
    # which keeps full relative precision near x = 0 where the naive
    # difference loses everything to cancellation.
    y = 1.0 - x * x
    if isinstance(x, np.ndarray):
        return np.where(y > 0.0, x * x * (2.0 - x * x) * (1.0 + y * y), 1.0)
    return x * x * (2.0 - x * x) * (1.0 + y * y) if y > 0.0 else 1.0


def _quartic_g_prime(x):
    # d/dx [1 - (1-x^2)^4] = 8 x (1-x^2)^3 on |x| <= 1, zero outside
    y = 1.0 - x * x
    if isinstance(x, np.ndarray):
        return np.where(y > 0.0, 8.0 * x * y * y * y, 0.0)
    return 8.0 * x * y * y * y if y > 0.0 else 0.0


def _quartic_g_second(x):
    # 8 (1-x^2)^3 - 48 x^2 (1-x^2)^2 on |x| <= 1; matches 0 at |x| = 1, so
    # the potential is C^3 across the matching points.
    y = 1.0 - x * x
    if isinstance(x, np.ndarray):
        return np.where(y > 0.0, 8.0 * y * y * y - 48.0 * x * x * y * y, 0.0)
    return 8.0 * y * y * y - 48.0 * x * x * y * y if y > 0.0 else 0.0


def _zero(x):
    if isinstance(x, np.ndarray):
        return np.zeros_like(x, dtype=float)
    return 0.0


@dataclass(frozen=True)
class HamiltonianModel:
    """Potential triple (g, g', g'') plus the flatness radius.

    All three callables accept floats or numpy arrays.  ``flat_value`` is
    the constant value of g outside [-cutoff, cutoff]; characteristics with
    momentum p and position x out there move in straight lines.
    """

    name: str
    g: Callable = field(compare=False)
    g_prime: Callable = field(compare=False)
    g_second: Callable = field(compare=False)
    cutoff: float = 1.0
    flat_value: float = 1.0

    def h(self, x, p):
        """Flux value H(x, p) = p**2/2 + g(x)."""
        return 0.5 * p * p + self.g(x)

    def dh_dp(self, x, p):
        """Momentum slope of the flux (the characteristic speed)."""
        return p

    def dh_dx(self, x, p):
        """Spatial slope of the flux, equal to g'(x)."""
        return self.g_prime(x)

    @property
    def separatrix_momentum(self) -> float:
        """Momentum at x = 0 of the orbit with energy equal to flat_value."""
        return float(np.sqrt(2.0 * self.flat_value))


@lru_cache(maxsize=None)
def quartic_well() -> HamiltonianModel:
    """The default model: quartic potential well, flat at 1 outside [-1, 1]."""
    return HamiltonianModel(
        name="quartic",
        g=_quartic_g,
        g_prime=_quartic_g_prime,
        g_second=_quartic_g_second,
        cutoff=1.0,
        flat_value=1.0,
    )


@lru_cache(maxsize=None)
def homogeneous() -> HamiltonianModel:
    """Sanity-mode model with g identically zero (straight characteristics)."""
    return HamiltonianModel(
        name="homogeneous",
        g=_zero,
        g_prime=_zero,
        g_second=_zero,
        cutoff=0.0,
        flat_value=0.0,
    )


MODELS = {"quartic": quartic_well, "homogeneous": homogeneous}


# ===== Assumption checks =====

@dataclass
class AssumptionReport:
    """Result of sampling the structural assumptions on a model.

    The checks never abort; every violation is recorded as a human-readable
    string so a caller can decide what to do with a bad model.
    """

    flat_tails: bool
    derivatives_consistent: bool
    momentum_slope_increasing: bool
    violations: list

    @property
    def all_ok(self) -> bool:
        return (self.flat_tails and self.derivatives_consistent
                and self.momentum_slope_increasing)


def check_assumptions(model: HamiltonianModel, xs=None, fd_step: float = 1e-5,
                      fd_tol: float = 1e-6) -> AssumptionReport:
    """Sample-test flatness, derivative consistency and momentum convexity.

    Args:
        model: model to check.
        xs: sample positions; defaults to 1001 points on [-2-cutoff, 2+cutoff].
        fd_step: central finite-difference step.
        fd_tol: allowed mismatch between hard-coded and FD derivatives.
    """
    if xs is None:
        half = 2.0 + model.cutoff
        xs = np.linspace(-half, half, 1001)
    xs = np.asarray(xs, dtype=float)
    violations = []

    # flat tails: g constant and g' zero outside the cutoff radius
    tails = xs[np.abs(xs) > model.cutoff + fd_step]
    flat_tails = True
    if tails.size:
        gv = model.g(tails)
        gpv = model.g_prime(tails)
        bad = np.abs(gv - model.flat_value) > 1e-12
        bad_p = np.abs(gpv) > 1e-12
        if np.any(bad) or np.any(bad_p):
            flat_tails = False
            for x in tails[bad | bad_p][:5]:
                violations.append(f"tail not flat at x={x:.6g}")

    # central differences of g against g', and of g' against g''
    fd_prime = (model.g(xs + fd_step) - model.g(xs - fd_step)) / (2.0 * fd_step)
    fd_second = (model.g_prime(xs + fd_step)
                 - model.g_prime(xs - fd_step)) / (2.0 * fd_step)
    err_p = np.abs(fd_prime - model.g_prime(xs))
    err_s = np.abs(fd_second - model.g_second(xs))
    derivatives_consistent = True
    if np.any(err_p > fd_tol) or np.any(err_s > fd_tol):
        derivatives_consistent = False
        for x in xs[err_p > fd_tol][:5]:
            violations.append(f"g' inconsistent with g near x={x:.6g}")
        for x in xs[err_s > fd_tol][:5]:
            violations.append(f"g'' inconsistent with g' near x={x:.6g}")

    # p -> dH/dp strictly increasing, sampled on a momentum grid
    ps = np.linspace(-3.0, 3.0, 61)
    slopes = model.dh_dp(0.0, ps)
    momentum_slope_increasing = bool(np.all(np.diff(slopes) > 0.0))
    if not momentum_slope_increasing:
        violations.append("dH/dp not strictly increasing in p")

    return AssumptionReport(
        flat_tails=flat_tails,
        derivatives_consistent=derivatives_consistent,
        momentum_slope_increasing=momentum_slope_increasing,
        violations=violations,
    )
