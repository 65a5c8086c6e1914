"""Constitutive laws for an ideal polytropic gas with power-law heat conductivity."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class GasParams:
    """Physical constants of the gas.

    Viscosity is ``mu_tilde`` (temperature independent, so ``gamma`` must
    stay 0) and heat conductivity is ``kappa_tilde * theta**beta``.
    """

    R: float = 1.0
    c_v: float = 1.0
    mu_tilde: float = 1.0
    kappa_tilde: float = 1.0
    beta: float = 1.0
    gamma: float = 0.0

    def __post_init__(self):
        for name in ("R", "c_v", "mu_tilde", "kappa_tilde"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be > 0, got {getattr(self, name)!r}")
        if not self.beta >= 0:
            raise DomainError(f"beta must be >= 0, got {self.beta!r}")
        if self.gamma != 0:
            raise DomainError(
                f"gamma must be 0 (temperature-dependent viscosity is unsupported), got {self.gamma!r}"
            )


def _check_positive(name, x):
    if np.any(np.asarray(x) <= 0):
        raise DomainError(f"{name} must be strictly positive")


def pressure(params: GasParams, v, theta):
    """Return ``R * theta / v``."""
    _check_positive("v", v)
    _check_positive("theta", theta)
    return params.R * np.asarray(theta) / np.asarray(v)


def conductivity(params: GasParams, theta):
    """Return ``kappa_tilde * theta**beta``."""
    _check_positive("theta", theta)
    return params.kappa_tilde * np.asarray(theta) ** params.beta


def viscosity(params: GasParams, theta=None):
    # gamma == 0, so the temperature argument is accepted only for symmetry
    return params.mu_tilde


def sound_speed(params: GasParams, v, theta):
    """Lagrangian acoustic speed ``sqrt(R theta (1 + R/c_v)) / v``."""
    return np.sqrt(params.R * np.asarray(theta) * (1.0 + params.R / params.c_v)) / np.asarray(v)


def entropy_potential(y):
    """Return ``y - ln(y) - 1``, the convex potential that vanishes only at 1."""
    _check_positive("y", y)
    y = np.asarray(y, dtype=float)
    out = y - np.log(y) - 1.0
    return float(out) if out.ndim == 0 else out


def _bisect(f, lo, hi, rtol):
    # relative stopping width so tiny lower roots keep full precision
    flo = f(lo)
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fmid = f(mid)
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def jensen_roots(e0: float, tol: float = 1e-14) -> tuple[float, float]:
    """Return the roots ``alpha1 <= 1 <= alpha2`` of ``y - ln y - 1 = e0``.

    Both roots are bracketed and found by bisection. The lower bracket is
    ``[exp(-e0-2), 1]``: at its left end the potential exceeds ``e0`` by
    about 1, safely above rounding. The upper bracket grows geometrically
    until the sign flips.
    """
    e0 = float(e0)
    if not e0 >= 0:
        raise DomainError(f"e0 must be >= 0, got {e0!r}")
    if e0 == 0:
        return 1.0, 1.0

    def f(y):
        return y - math.log(y) - 1.0 - e0

    lo = math.exp(-e0 - 2.0)
    if lo == 0.0:
        lo = 5e-324
    alpha1 = _bisect(f, lo, 1.0, tol)

    hi = 2.0
    while f(hi) <= 0:
        hi *= 2.0
    alpha2 = _bisect(f, 1.0, hi, tol)
    return alpha1, alpha2
