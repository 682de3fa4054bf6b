"""Simulation methods for L*_alpha laws and multivariate Dickman variables.

Three routes are implemented:

* SN -- truncation of the shot-noise series over Poisson arrival epochs,
* TA -- a triangular-array sum of high powers with regularly varying factors,
* DS -- exact sums of generalized-Dickman draws along the fixed directions of
  a finite-support spectral measure (discretize-and-simulate).

Every sampler is pure given a ``numpy.random.Generator``; batch variants
vectorize over replications with O(n_reps * d) working memory.

Normalization note: the shot-noise weights used here are
``exp(-(alpha * Gamma_i / (T * theta))^(1/alpha))`` with unit-rate arrival
epochs Gamma_i. This normalization makes the series marginal carry the Levy
measure M_alpha of L*_alpha(nu, gamma) for every alpha (the alpha-free weight
is equivalent to it only at alpha = 1, where both reduce to products of
uniforms). Likewise the TA term count is ``floor(c * n^alpha / alpha)`` so
that the array converges to L*_alpha(c * nu0, 0).

There is no separate sampler for the stochastic-integral representation of
these laws: with a finite BDLM the driving process is compound Poisson plus
drift, so the integral evaluates to exactly the shot-noise series above (the
epochs are the driving process's unit-rate jump times and the deterministic
drift part contributes gamma).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedMeasureError, ValidationError
from .measures import FINITE, BDLM, LStarParams, SpectralMeasure

_DEFAULT_GD_TOL = 1e-12


@dataclass(frozen=True)
class SampleBatch:
    """N approximate draws plus full provenance of how they were generated."""

    data: np.ndarray
    method: str
    k: int
    n_reps: int
    seed: int
    params: str = ""

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim == 1:
            data = data[:, None]
        if self.method not in ("SN", "TA", "DS"):
            raise ValidationError(f"method must be SN, TA or DS, got {self.method!r}")
        if data.shape[0] != self.n_reps:
            raise ValidationError(
                f"data has {data.shape[0]} rows, expected n_reps={self.n_reps}")
        if not np.isfinite(data).all():
            raise ValidationError("sample data contains non-finite values")
        data = np.array(data)
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @property
    def dim(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class LevyPathSkeleton:
    """Jump-time/jump-size skeleton of a finite-activity Levy path on [0, T].

    The marginal at time t is ``t * drift + sum of jumps with time <= t``.
    """

    horizon: float
    drift: np.ndarray
    times: np.ndarray
    jumps: np.ndarray

    def __post_init__(self):
        if self.horizon <= 0:
            raise ValidationError("horizon T must be > 0")
        drift = np.asarray(self.drift, dtype=float).reshape(-1)
        times = np.asarray(self.times, dtype=float).reshape(-1)
        jumps = np.atleast_2d(np.asarray(self.jumps, dtype=float))
        if jumps.shape[0] != len(times):
            raise ValidationError("times and jumps must have equal length")
        if len(times) and (times.min() < 0.0 or times.max() > self.horizon):
            raise ValidationError("event times must lie in [0, T]")
        if len(times) > 1 and not np.all(np.diff(times) > 0):
            raise ValidationError("event times must be strictly increasing")
        if not np.isfinite(np.linalg.norm(jumps, axis=1).sum()):
            raise ValidationError("jump norms must have a finite sum")
        for name, value in (("drift", drift), ("times", times), ("jumps", jumps)):
            value = np.array(value)
            value.flags.writeable = False
            object.__setattr__(self, name, value)

    @property
    def events(self):
        """List of (time, jump vector) pairs sorted by time."""
        return list(zip(self.times.tolist(), [j for j in self.jumps]))

    def value_at(self, t: float) -> np.ndarray:
        if not 0.0 <= t <= self.horizon:
            raise ValidationError("t must lie in [0, T]")
        x = t * self.drift
        if len(self.times):
            x = x + self.jumps[self.times <= t].sum(axis=0)
        return x


# --------------------------------------------------------------------------
# generalized Dickman draws
# --------------------------------------------------------------------------

def gd_truncation_terms(theta: float, tol: float) -> int:
    """Smallest k with expected truncated tail (theta+1)*(theta/(theta+1))^(k+1) <= tol.

    The tail bound is the mean of the discarded series remainder: each term
    has expectation (theta/(theta+1))^i, so the remainder after k terms sums
    to (theta+1) * (theta/(theta+1))^(k+1).
    """
    if theta <= 0 or tol <= 0:
        raise ValidationError("theta and tol must be > 0")
    if theta + 1.0 <= tol:
        return 0
    q = theta / (theta + 1.0)
    k = math.ceil(math.log(tol / (theta + 1.0)) / math.log(q)) - 1
    return max(int(k), 0)


def sample_gd_batch(theta: float, tol: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """n draws from GD(theta) via the truncated product-of-uniforms series.

    Returns sum_{i=1..k} (U_1 ... U_i)^(1/theta) with k from
    ``gd_truncation_terms``, so the expected absolute truncation error is at
    most ``tol``.
    """
    k = gd_truncation_terms(theta, tol)
    out = np.zeros(n)
    w = np.ones(n)
    inv_theta = 1.0 / theta
    for _ in range(k):
        w = w * rng.random(n) ** inv_theta
        out += w
    return out


def sample_gd(theta: float, tol: float, rng: np.random.Generator) -> float:
    """One draw from the generalized Dickman distribution GD(theta)."""
    return float(sample_gd_batch(theta, tol, 1, rng)[0])


# --------------------------------------------------------------------------
# SN: truncated shot-noise series
# --------------------------------------------------------------------------

def sample_sn_batch(params: LStarParams, k: int, n: int,
                    rng: np.random.Generator, T: float = 1.0) -> np.ndarray:
    """n draws of the k-term shot-noise partial sum for L*_alpha(T*nu, T*gamma).

    gamma*T + sum_{i=1..k} w_i Y_i with Y_i ~ nu_1 and weights
    w_i = exp(-(alpha*Gamma_i/(T*theta))^(1/alpha)); for alpha = 1 the weights
    are generated as running products of uniforms raised to 1/(T*theta),
    which is the same law expressed without exponentials.

    k = 0 returns the drift alone (degenerate but convenient for sweeps).
    """
    if k < 0:
        raise ValidationError("k must be >= 0")
    if T <= 0:
        raise ValidationError("T must be > 0")
    bdlm = params.bdlm
    alpha = params.alpha
    t_theta = T * bdlm.theta
    out = np.tile(T * params.gamma, (n, 1))
    if k == 0:
        return out
    if alpha == 1.0:
        w = np.ones(n)
        inv = 1.0 / t_theta
        for _ in range(k):
            w = w * rng.random(n) ** inv
            y = bdlm.base_sampler(rng, n)
            out += w[:, None] * y
    else:
        g = np.zeros(n)
        inv_alpha = 1.0 / alpha
        for _ in range(k):
            g += rng.standard_exponential(n)
            w = np.exp(-((alpha / t_theta) * g) ** inv_alpha)
            y = bdlm.base_sampler(rng, n)
            out += w[:, None] * y
    return out


def sample_sn(params: LStarParams, k: int, rng: np.random.Generator) -> np.ndarray:
    """One draw of the k-term shot-noise approximation to L*_alpha(nu, gamma)."""
    return sample_sn_batch(params, k, 1, rng)[0]


def sample_levy_path(params: LStarParams, T: float, k: int,
                     rng: np.random.Generator) -> LevyPathSkeleton:
    """Skeleton of the Levy process {X_t} with X_t ~ L*_alpha(t*nu, t*gamma),
    truncated at k shot-noise terms.

    Each term contributes the jump w_i Y_i at the uniformly placed time T*V_i;
    the marginal at t is the partial series restricted to times <= t.
    """
    if T <= 0:
        raise ValidationError("T must be > 0")
    if k < 0:
        raise ValidationError("k must be >= 0")
    bdlm = params.bdlm
    alpha = params.alpha
    d = bdlm.dim
    if k == 0:
        return LevyPathSkeleton(T, params.gamma, np.empty(0), np.empty((0, d)))
    if alpha == 1.0:
        w = np.cumprod(rng.random(k)) ** (1.0 / (T * bdlm.theta))
    else:
        g = np.cumsum(rng.standard_exponential(k))
        w = np.exp(-((alpha / (T * bdlm.theta)) * g) ** (1.0 / alpha))
    y = bdlm.base_sampler(rng, k)
    times = T * rng.random(k)
    order = np.argsort(times, kind="stable")
    return LevyPathSkeleton(T, params.gamma, times[order], w[order, None] * y[order])


# --------------------------------------------------------------------------
# TA: triangular-array approximation
# --------------------------------------------------------------------------

def ta_term_count(alpha: float, c: float, n: int) -> int:
    """Number of array terms, floor(c * n^alpha / alpha)."""
    if n <= 0:
        raise ValidationError("n must be >= 1")
    if alpha <= 0 or c <= 0:
        raise ValidationError("alpha and c must be > 0")
    return int(math.floor(c * float(n) ** alpha / alpha))


def sample_ta_batch(alpha: float, nu0_sampler, c: float, n: int, n_reps: int,
                    rng: np.random.Generator) -> np.ndarray:
    """n_reps draws of the triangular array A_n = sum_{i<=N_n} T_i X_i^n.

    X_i = 1 - V_i^(1/alpha) with V_i uniform, so P(X_i > x) = (1-x)^alpha
    (slowly varying factor fixed to 1), T_i ~ nu0, and
    N_n = floor(c * n^alpha / alpha). As n grows the law approaches
    L*_alpha(c * nu0, 0) with an O(1/n) moment bias at finite n.

    Parameters
    ----------
    nu0_sampler : callable(rng, size) -> (size, d) array
    n : sharpness of the power weights (the tuning parameter)
    """
    terms = ta_term_count(alpha, c, n)
    probe = np.atleast_2d(np.asarray(nu0_sampler(rng, 1), dtype=float))
    d = probe.shape[1]
    out = np.zeros((n_reps, d))
    inv_alpha = 1.0 / alpha
    npow = float(n)
    for _ in range(terms):
        x = 1.0 - rng.random(n_reps) ** inv_alpha
        w = x ** npow
        t = np.asarray(nu0_sampler(rng, n_reps), dtype=float).reshape(n_reps, d)
        out += w[:, None] * t
    return out


def sample_ta(alpha: float, nu0_sampler, c: float, n: int,
              rng: np.random.Generator) -> np.ndarray:
    """One triangular-array draw approximating L*_alpha(c * nu0, 0)."""
    return sample_ta_batch(alpha, nu0_sampler, c, n, 1, rng)[0]


# --------------------------------------------------------------------------
# DS: sums of Dickman draws along fixed directions
# --------------------------------------------------------------------------

def sample_ds_batch(sigma_k: SpectralMeasure, gd_tol: float, n_reps: int,
                    rng: np.random.Generator) -> np.ndarray:
    """n_reps draws from MD(sigma_k) for finite-support sigma_k.

    Sum over atoms of s_i * Y_i with independent Y_i ~ GD(a_i); exact apart
    from the GD series truncation controlled by ``gd_tol``.
    """
    if sigma_k.variant != FINITE:
        raise UnsupportedMeasureError(
            "the DS sampler needs a finite-support spectral measure; "
            "discretize the measure first")
    out = np.zeros((n_reps, sigma_k.dim))
    for s_i, a_i in zip(sigma_k.directions, sigma_k.masses):
        y = sample_gd_batch(float(a_i), gd_tol, n_reps, rng)
        out += y[:, None] * s_i
    return out


def sample_ds(sigma_k: SpectralMeasure, gd_tol: float,
              rng: np.random.Generator) -> np.ndarray:
    """One draw from MD(sigma_k), sigma_k with finite support."""
    return sample_ds_batch(sigma_k, gd_tol, 1, rng)[0]


# --------------------------------------------------------------------------
# distributional fixed point
# --------------------------------------------------------------------------

def fixed_point_map(x, w, u, theta: float):
    """The map (x, w, u) -> u^(1/theta) * (x + w) whose fixed point in law
    characterizes MD / Vervaat-perpetuity distributions.

    Accepts vectors or (n, d) batches for x and w; u may be scalar or (n,).
    """
    if theta <= 0:
        raise ValidationError("theta must be > 0")
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0.0) or np.any(u >= 1.0):
        raise ValidationError("u must lie in (0, 1)")
    if not (np.isfinite(x).all() and np.isfinite(w).all()):
        raise ValidationError("x and w must be finite")
    scale = u ** (1.0 / theta)
    if x.ndim == 2:
        scale = np.asarray(scale).reshape(-1, 1)
    return scale * (x + w)


# --------------------------------------------------------------------------
# provenance-carrying batch generation
# --------------------------------------------------------------------------

def generate_batch(method: str, sigma: SpectralMeasure, k: int, n_reps: int,
                   seed: int, gd_tol: float = _DEFAULT_GD_TOL,
                   params_doc: dict | None = None) -> SampleBatch:
    """Generate a SampleBatch from MD(sigma) by the named method.

    SN and TA use ``k`` as their tuning parameter. DS on a finite-support
    sigma is exact and records k = 0; on an angular-density sigma it first
    discretizes at level k with the default evenly spaced grid. Sampler-backed
    measures cannot be run through DS.
    """
    from .measures import md_from_spectral
    from .discretize import default_grid, discretize_angular

    rng = np.random.default_rng(seed)
    if method == "SN":
        data = sample_sn_batch(md_from_spectral(sigma), k, n_reps, rng)
    elif method == "TA":
        data = sample_ta_batch(1.0, sigma.sample_directions, sigma.mass, k,
                               n_reps, rng)
    elif method == "DS":
        if sigma.variant == FINITE:
            k = 0
        elif sigma.density is not None:
            sigma = discretize_angular(sigma, default_grid(k))
        else:
            raise UnsupportedMeasureError(
                "DS needs a finite-support or angular-density measure; run "
                "the discretize step first")
        data = sample_ds_batch(sigma, gd_tol, n_reps, rng)
    else:
        raise ValidationError(f"unknown method {method!r}")
    doc = json.dumps(params_doc, sort_keys=True) if params_doc else ""
    return SampleBatch(data=data, method=method, k=k, n_reps=n_reps,
                       seed=seed, params=doc)
