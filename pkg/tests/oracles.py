"""Independent numeric oracles shared by the test modules.

These integrate the defining radial form of the mixed Levy measure directly
in r-space, staying independent of the incomplete-gamma closed forms they
are used to check.
"""

import warnings

import numpy as np
from scipy import integrate

INSIDE = "inside_unit_ball"
OUTSIDE = "outside_unit_ball"


def _quad(fn, lo, hi):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(fn, lo, hi, epsabs=1e-12, epsrel=1e-13,
                                limit=500)
    return val


def tail_mass_quadrature(points, weights, alpha, eps):
    """M_alpha({|x| > eps}) by adaptive quadrature of the defining integral."""
    total = 0.0
    for y, w in zip(points, weights):
        radius = float(np.linalg.norm(y))
        if radius == 0.0:
            continue
        lo = min(1.0, eps / radius)
        if lo >= 1.0:
            continue
        total += w * _quad(
            lambda r: (-np.log(r)) ** (alpha - 1.0) / r, lo, 1.0)
    return total


def radial_moment_quadrature(points, weights, alpha, p, region):
    """Region-restricted integral of |x|^p against M_alpha, per atom."""
    total = 0.0
    for y, w in zip(points, weights):
        radius = float(np.linalg.norm(y))
        if radius == 0.0:
            continue
        if region == INSIDE:
            lo, hi = 0.0, min(1.0, 1.0 / radius)
        else:
            lo, hi = min(1.0, 1.0 / radius), 1.0
        if hi <= lo:
            continue
        total += w * _quad(
            lambda r: (radius * r) ** p * (-np.log(r)) ** (alpha - 1.0) / r,
            lo, hi)
    return total
