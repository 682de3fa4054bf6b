"""Domain types: spectral measures on the unit sphere, background driving
Levy measures (BDLMs), and parameter bundles for the L*_alpha family.

A spectral measure sigma is a finite Borel measure on S^{d-1}. It doubles as
the parameter of the multivariate Dickman distribution MD(sigma) and, via
``md_from_spectral``, as a sphere-supported BDLM. Three representations are
supported: finite support (atoms), a 2-d angular density on [0, 2*pi), and an
opaque direction sampler.

All types are immutable after construction; samplers receive an explicit
``numpy.random.Generator`` and keep no hidden state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import UnsupportedMeasureError, ValidationError

TWO_PI = 2.0 * math.pi

#: spectral-measure variant tags
FINITE = "finite"
ANGULAR = "angular"
SAMPLER = "sampler"

_UNIT_NORM_TOL = 1e-12
_MASS_CHECK_TOL = 1e-8


def angle_to_direction(phi):
    """Map an angle to the unit vector (cos(phi), sin(phi)) in R^2.

    Angles outside [0, 2*pi) are reduced modulo 2*pi rather than rejected.
    Accepts a scalar or an array; returns shape (2,) or (n, 2).
    """
    phi = np.asarray(phi, dtype=float) % TWO_PI
    out = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
    return out


def _as_unit_directions(directions, dim=None):
    s = np.atleast_2d(np.asarray(directions, dtype=float))
    if s.ndim != 2:
        raise ValidationError("directions must form a (k, d) array")
    if dim is not None and s.shape[1] != dim:
        raise ValidationError(f"directions have dim {s.shape[1]}, expected {dim}")
    norms = np.linalg.norm(s, axis=1)
    bad = np.abs(norms - 1.0) > _UNIT_NORM_TOL
    if bad.any():
        i = int(np.argmax(bad))
        raise ValidationError(
            f"direction {i} has |s|={norms[i]!r}; unit norm required within {_UNIT_NORM_TOL}"
        )
    return s


def _lock(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class SpectralMeasure:
    """A finite measure sigma on the unit sphere S^{d-1}.

    Use the classmethod constructors (``finite``, ``from_angles``,
    ``angular``, ``beta``, ``from_sampler``) rather than the raw dataclass
    constructor; they validate the invariants and fill the derived fields.
    """

    variant: str
    dim: int
    mass: float
    directions: np.ndarray | None = None
    masses: np.ndarray | None = None
    density: Callable[[np.ndarray], np.ndarray] | None = None
    angle_sampler: Callable[[np.random.Generator, int], np.ndarray] | None = None
    direction_sampler: Callable[[np.random.Generator, int], np.ndarray] | None = None
    moment_data: tuple[np.ndarray, np.ndarray] | None = None
    beta_params: tuple[float, float] | None = field(default=None, compare=False)

    # -- constructors ------------------------------------------------------

    @classmethod
    def finite(cls, directions, masses) -> "SpectralMeasure":
        """Finite-support measure sum_i a_i * delta_{s_i} with unit vectors s_i."""
        s = _as_unit_directions(directions)
        a = np.asarray(masses, dtype=float).reshape(-1)
        if len(a) != len(s):
            raise ValidationError("directions and masses must have equal length")
        if len(a) == 0:
            raise ValidationError("a finite spectral measure needs at least one atom")
        if not np.all(a > 0):
            raise ValidationError("every atom mass a_i must be > 0")
        theta = float(a.sum())
        if not math.isfinite(theta) or theta <= 0:
            raise ValidationError("total mass must be finite and > 0")
        return cls(variant=FINITE, dim=s.shape[1], mass=theta,
                   directions=_lock(s), masses=_lock(a))

    @classmethod
    def from_angles(cls, angles, masses) -> "SpectralMeasure":
        """Finite-support bivariate measure with atoms given by angles."""
        return cls.finite(angle_to_direction(angles), masses)

    @classmethod
    def angular(cls, density, mass=None, angle_sampler=None) -> "SpectralMeasure":
        """Bivariate measure with angular density f on [0, 2*pi).

        The total mass is integral of f, computed by quadrature; if ``mass``
        is supplied it is cross-checked against the quadrature value to 1e-8.
        ``angle_sampler(rng, n)`` draws angles from the normalized density and
        is required by the simulation methods (not by moment computations).
        """
        from .moments import integrate_angular  # deferred: avoids import cycle

        quad_mass = integrate_angular(lambda x: np.ones_like(x), density)
        if not math.isfinite(quad_mass) or quad_mass <= 0:
            raise ValidationError("total mass (integral of density) must be finite and > 0")
        if mass is not None and abs(quad_mass - mass) > _MASS_CHECK_TOL:
            raise ValidationError(
                f"declared mass {mass} differs from quadrature mass {quad_mass}"
                f" by more than {_MASS_CHECK_TOL}"
            )
        theta = float(mass if mass is not None else quad_mass)
        return cls(variant=ANGULAR, dim=2, mass=theta, density=density,
                   angle_sampler=angle_sampler)

    @classmethod
    def beta(cls, a, b, mass=1.0) -> "SpectralMeasure":
        """Angular measure whose angle is 2*pi times a Beta(a, b) variable.

        Density on [0, 2*pi): mass * (2*pi)^(1-a-b) / B(a,b) * x^(a-1) (2*pi-x)^(b-1),
        uniform when a == b == 1.
        """
        from scipy.special import beta as beta_fn

        if a <= 0 or b <= 0:
            raise ValidationError("beta parameters must be > 0")
        if mass <= 0 or not math.isfinite(mass):
            raise ValidationError("total mass must be finite and > 0")
        norm = mass * TWO_PI ** (1.0 - a - b) / beta_fn(a, b)

        def density(x, _n=norm, _a=a, _b=b):
            x = np.asarray(x, dtype=float)
            with np.errstate(divide="ignore", over="ignore"):
                out = _n * x ** (_a - 1.0) * (TWO_PI - x) ** (_b - 1.0)
            return out

        if a == 1.0 and b == 1.0:
            def angle_sampler(rng, n):
                return TWO_PI * rng.random(n)
        else:
            def angle_sampler(rng, n, _a=a, _b=b):
                return TWO_PI * rng.beta(_a, _b, n)

        sigma = cls(variant=ANGULAR, dim=2, mass=float(mass), density=density,
                    angle_sampler=angle_sampler, beta_params=(float(a), float(b)))
        return sigma

    @classmethod
    def from_sampler(cls, mass, dim, direction_sampler, moment_data=None) -> "SpectralMeasure":
        """Measure known only through a normalized direction sampler.

        ``direction_sampler(rng, n)`` must return an (n, dim) array of unit
        vectors distributed as sigma/mass. ``moment_data``, when given, is the
        pair (integral of s dsigma, integral of s s^T dsigma) enabling exact
        moment computations.
        """
        if mass <= 0 or not math.isfinite(mass):
            raise ValidationError("total mass must be finite and > 0")
        if dim < 1:
            raise ValidationError("dim must be >= 1")
        if moment_data is not None:
            m1 = _lock(np.asarray(moment_data[0], dtype=float).reshape(dim))
            m2 = _lock(np.asarray(moment_data[1], dtype=float).reshape(dim, dim))
            moment_data = (m1, m2)
        return cls(variant=SAMPLER, dim=int(dim), mass=float(mass),
                   direction_sampler=direction_sampler, moment_data=moment_data)

    # -- behaviour ---------------------------------------------------------

    @property
    def theta(self) -> float:
        """Total mass sigma(S^{d-1})."""
        return self.mass

    def validate(self) -> None:
        """Re-check the construction invariants, raising ValidationError."""
        if self.variant not in (FINITE, ANGULAR, SAMPLER):
            raise ValidationError(f"unknown variant {self.variant!r}")
        if not math.isfinite(self.mass) or self.mass <= 0:
            raise ValidationError("total mass must be finite and > 0")
        if self.variant == FINITE:
            _as_unit_directions(self.directions, self.dim)
            if not np.all(self.masses > 0):
                raise ValidationError("every atom mass a_i must be > 0")
        if self.variant == ANGULAR and self.dim != 2:
            raise ValidationError("angular-density measures are bivariate only")

    def sample_directions(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw n unit vectors from the normalized measure sigma/theta."""
        if self.variant == FINITE:
            p = self.masses / self.mass
            idx = rng.choice(len(p), size=n, p=p)
            return self.directions[idx]
        if self.variant == ANGULAR:
            if self.angle_sampler is None:
                raise UnsupportedMeasureError(
                    "this angular measure carries no angle sampler; attach one "
                    "to construct draws"
                )
            return angle_to_direction(self.angle_sampler(rng, n))
        s = np.asarray(self.direction_sampler(rng, n), dtype=float).reshape(n, self.dim)
        norms = np.linalg.norm(s, axis=1)
        if np.max(np.abs(norms - 1.0)) > _UNIT_NORM_TOL:
            raise ValidationError(
                "the attached direction sampler produced non-unit vectors")
        return s

    def angles(self) -> np.ndarray:
        """Atom angles in [0, 2*pi) (finite bivariate measures only)."""
        if self.variant != FINITE or self.dim != 2:
            raise UnsupportedMeasureError("angles are defined for finite bivariate measures")
        return np.arctan2(self.directions[:, 1], self.directions[:, 0]) % TWO_PI


def evenly_spaced_spectral(r: int, mass: float = 1.0) -> SpectralMeasure:
    """Finite bivariate measure with r evenly spaced directions of equal mass."""
    if r < 1:
        raise ValidationError("r must be >= 1")
    angles = TWO_PI * np.arange(r) / r
    return SpectralMeasure.from_angles(angles, np.full(r, mass / r))


# --------------------------------------------------------------------------
# JSON wire format
# --------------------------------------------------------------------------

def spectral_to_json(sigma: SpectralMeasure) -> dict:
    """Serialize a spectral measure to its JSON document.

    Finite bivariate measures become ``{"variant": "finite", "dim": 2,
    "atoms": [{"angle": ..., "mass": ...}, ...]}``; beta-density measures
    become ``{"variant": "beta", "alpha": ..., "beta": ..., "mass": ...}``.
    Other variants have no wire representation.
    """
    if sigma.variant == FINITE and sigma.dim == 2:
        ang = sigma.angles()
        atoms = [{"angle": float(a), "mass": float(m)}
                 for a, m in zip(ang, sigma.masses)]
        return {"variant": "finite", "dim": 2, "atoms": atoms}
    if sigma.variant == ANGULAR and sigma.beta_params is not None:
        a, b = sigma.beta_params
        return {"variant": "beta", "alpha": a, "beta": b, "mass": sigma.mass}
    raise UnsupportedMeasureError(
        f"no JSON representation for variant {sigma.variant!r} (dim={sigma.dim})"
    )


def spectral_from_json(doc: dict) -> SpectralMeasure:
    """Build a spectral measure from its JSON document."""
    try:
        variant = doc["variant"]
    except (TypeError, KeyError):
        raise ValidationError("spectral-measure document needs a 'variant' key") from None
    if variant == "finite":
        atoms = doc.get("atoms", [])
        if not atoms:
            raise ValidationError("finite spectral measure needs a nonempty 'atoms' list")
        angles = [a["angle"] for a in atoms]
        masses = [a["mass"] for a in atoms]
        if int(doc.get("dim", 2)) != 2:
            raise ValidationError("JSON finite measures are bivariate (angles)")
        return SpectralMeasure.from_angles(angles, masses)
    if variant == "beta":
        return SpectralMeasure.beta(doc["alpha"], doc["beta"], doc.get("mass", 1.0))
    raise ValidationError(f"unknown spectral-measure variant {variant!r}")


def model_label(doc: dict) -> str:
    """Short comma-free label for a model document, used in CSV output."""
    if doc.get("variant") == "beta":
        a, b, m = doc["alpha"], doc["beta"], doc.get("mass", 1.0)
        base = f"beta({a:g};{b:g})"
        return base if m == 1.0 else f"beta({a:g};{b:g};mass={m:g})"
    if doc.get("variant") == "finite":
        return f"finite(r={len(doc.get('atoms', []))})"
    return str(doc.get("variant", "model"))


# --------------------------------------------------------------------------
# BDLM and L*_alpha parameters
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BDLM:
    """A finite background driving Levy measure nu, described by its total
    mass theta and a sampler for the normalized measure nu_1 = nu/theta.

    Optional exact descriptions enable analytic moments: ``points``/``weights``
    for finite support, ``spectral`` for sphere-supported measures, or
    ``moment_data`` = (integral of y dnu, integral of y y^T dnu) supplied by
    the caller.

    The log-moment condition integral_{|x|>2} (log|x|)^log_moment_alpha nu(dx)
    < infinity is recorded, not checked: it cannot be verified from a sampler.
    Atoms at the origin are tolerated; the simulated law then corresponds to
    nu with the origin mass removed (uniform thinning), so moment formulas,
    which the origin cannot contribute to, remain valid.
    """

    theta: float
    dim: int
    base_sampler: Callable[[np.random.Generator, int], np.ndarray]
    log_moment_alpha: float = 1.0
    points: np.ndarray | None = None
    weights: np.ndarray | None = None
    spectral: SpectralMeasure | None = None
    moment_data: tuple[np.ndarray, np.ndarray] | None = None

    def __post_init__(self):
        if not math.isfinite(self.theta) or self.theta <= 0:
            raise ValidationError("theta = nu(R^d) must be finite and > 0")
        if self.dim < 1:
            raise ValidationError("dim must be >= 1")
        if self.log_moment_alpha <= 0:
            raise ValidationError("log_moment_alpha must be > 0")

    @classmethod
    def from_atoms(cls, points, weights, log_moment_alpha=1.0) -> "BDLM":
        """Finite-support nu = sum_j w_j * delta_{y_j} (y_j need not be unit)."""
        y = np.atleast_2d(np.asarray(points, dtype=float))
        w = np.asarray(weights, dtype=float).reshape(-1)
        if y.shape[0] != len(w):
            raise ValidationError("points and weights must have equal length")
        if not np.all(w > 0):
            raise ValidationError("every weight must be > 0")
        theta = float(w.sum())
        y = _lock(y)
        w = _lock(w)

        def base_sampler(rng, n, _y=y, _p=w / theta):
            idx = rng.choice(len(_p), size=n, p=_p)
            return _y[idx]

        return cls(theta=theta, dim=y.shape[1], base_sampler=base_sampler,
                   log_moment_alpha=log_moment_alpha, points=y, weights=w)

    @classmethod
    def from_spectral(cls, sigma: SpectralMeasure, log_moment_alpha=1.0) -> "BDLM":
        """Sphere-supported nu equal to the spectral measure sigma."""
        sigma.validate()
        points = sigma.directions if sigma.variant == FINITE else None
        weights = sigma.masses if sigma.variant == FINITE else None
        return cls(theta=sigma.mass, dim=sigma.dim,
                   base_sampler=sigma.sample_directions,
                   log_moment_alpha=log_moment_alpha,
                   points=points, weights=weights, spectral=sigma)

    @classmethod
    def from_sampler(cls, theta, dim, base_sampler, moment_data=None,
                     log_moment_alpha=1.0) -> "BDLM":
        """nu known only through total mass and a sampler for nu_1."""
        if moment_data is not None:
            m1 = _lock(np.asarray(moment_data[0], dtype=float).reshape(dim))
            m2 = _lock(np.asarray(moment_data[1], dtype=float).reshape(dim, dim))
            moment_data = (m1, m2)
        return cls(theta=float(theta), dim=int(dim), base_sampler=base_sampler,
                   log_moment_alpha=log_moment_alpha, moment_data=moment_data)

    @property
    def sphere_supported(self) -> bool:
        if self.spectral is not None:
            return True
        if self.points is not None:
            norms = np.linalg.norm(self.points, axis=1)
            return bool(np.all(np.abs(norms - 1.0) <= _UNIT_NORM_TOL))
        return False


@dataclass(frozen=True)
class LStarParams:
    """Parameters (alpha, nu, gamma) of an L*_alpha(nu, gamma) distribution."""

    alpha: float
    bdlm: BDLM
    gamma: np.ndarray = None

    def __post_init__(self):
        if not math.isfinite(self.alpha) or self.alpha <= 0:
            raise ValidationError("alpha must be finite and > 0")
        g = self.gamma
        g = np.zeros(self.bdlm.dim) if g is None else np.asarray(g, dtype=float).reshape(-1)
        if len(g) != self.bdlm.dim:
            raise ValidationError(
                f"gamma has dim {len(g)}, BDLM has dim {self.bdlm.dim}")
        object.__setattr__(self, "gamma", _lock(g))

    @property
    def dim(self) -> int:
        return self.bdlm.dim


def md_from_spectral(sigma: SpectralMeasure) -> LStarParams:
    """Parameters of MD(sigma) viewed as L*_1(sigma, 0).

    The multivariate Dickman distribution with spectral measure sigma is the
    alpha=1, zero-drift member of the L* family whose BDLM is sigma itself.
    """
    sigma.validate()
    return LStarParams(alpha=1.0, bdlm=BDLM.from_spectral(sigma),
                       gamma=np.zeros(sigma.dim))


def gd_params(theta: float) -> LStarParams:
    """Parameters of the univariate generalized Dickman law GD(theta)."""
    if theta <= 0:
        raise ValidationError("theta must be > 0")
    return LStarParams(alpha=1.0, bdlm=BDLM.from_atoms([[1.0]], [theta]),
                       gamma=np.zeros(1))
