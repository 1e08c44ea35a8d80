"""Density catalog: sampling models with analytic or semianalytic summaries.

Each model supplies pdf evaluation, exact sampling, the integral of f^rho,
absolute moments with their critical order, and the probability mass of
the dyadic annuli A_k (inner radius 2^k, outer 2^(k+1), with A_0 the ball
of radius 2). Those are exactly the quantities the convergence and
divergence conditions are phrased in, so the catalog doubles as ground
truth for the Monte Carlo experiments.

Models:

* :class:`UniformConvexUnion` - uniform on a disjoint union of balls and
  axis-aligned boxes (compact support, pdf bounded away from 0).
* :class:`GaussianStandard` - standard normal, the bounded-density
  exemplar with all moments finite.
* :class:`PowerLawTail` - pdf proportional to (1 + |x|)^(-beta), whose
  critical moment is beta - d.
* :class:`AnnulusBallCounterexample` - mass C * 2^(-r*k) on a unit ball
  inside each annulus A_k; every integral of f^rho is finite yet the
  critical moment is r, which is what makes the divergence experiments
  tick.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import betainc, gammainc

from .errors import ConfigError, QuadratureBudgetExceeded
from .limits import unit_ball_volume
from .points import PointSet

_NORMALIZATION_TOL = 1e-6


# ---------------------------------------------------------------------------
# geometry helpers


def _cap_volume(radius: float, height: float, d: int) -> float:
    """Volume of a spherical cap of the given height cut from a d-ball."""
    h = min(max(height, 0.0), 2.0 * radius)
    if h == 0.0 or radius <= 0.0:
        return 0.0
    if d == 1:
        return h
    w = unit_ball_volume(d - 1)
    val, _ = integrate.quad(
        lambda t: w * (radius * radius - t * t) ** ((d - 1) / 2.0),
        radius - h,
        radius,
        limit=100,
    )
    return val


def _ball_ball_volume(center_dist: float, r1: float, r2: float, d: int) -> float:
    """Volume of the intersection of two balls with centers ``center_dist`` apart."""
    if r1 <= 0.0 or r2 <= 0.0:
        return 0.0
    if center_dist >= r1 + r2:
        return 0.0
    if center_dist <= abs(r1 - r2):
        return unit_ball_volume(d) * min(r1, r2) ** d
    a1 = (center_dist**2 + r1**2 - r2**2) / (2.0 * center_dist)
    a2 = (center_dist**2 + r2**2 - r1**2) / (2.0 * center_dist)
    return _cap_volume(r1, r1 - a1, d) + _cap_volume(r2, r2 - a2, d)


def _box_ball_volume(lo, hi, radius: float) -> float:
    """Volume of an axis-aligned box intersected with a ball at the origin."""
    if radius <= 0.0:
        return 0.0
    if len(lo) == 1:
        return max(0.0, min(hi[0], radius) - max(lo[0], -radius))
    a = max(lo[0], -radius)
    b = min(hi[0], radius)
    if b <= a:
        return 0.0
    rest_lo, rest_hi = lo[1:], hi[1:]
    rsq = radius * radius

    def section(x: float) -> float:
        return _box_ball_volume(rest_lo, rest_hi, math.sqrt(max(rsq - x * x, 0.0)))

    val, _ = integrate.quad(section, a, b, limit=100)
    return val


def _ball_abs_moment_integral(center_norm: float, radius: float, d: int, power: float) -> float:
    """Integral of |x|^power over a ball of the given radius whose center
    sits ``center_norm`` away from the origin."""
    if d == 1:
        lo, hi = center_norm - radius, center_norm + radius
        pts = [0.0] if lo < 0.0 < hi else None
        val, _ = integrate.quad(lambda t: abs(t) ** power, lo, hi, points=pts, limit=100)
        return val
    # Split by the angle psi between the point offset and the center
    # direction: |c + t*theta|^2 = c^2 + t^2 + 2*c*t*cos(psi), and the
    # spherical slice at angle psi has area (d-1)*omega_{d-1}*sin(psi)^(d-2).
    ring = (d - 1) * unit_ball_volume(d - 1)
    csq = center_norm * center_norm

    def integrand(psi: float, t: float) -> float:
        norm_sq = csq + t * t + 2.0 * center_norm * t * math.cos(psi)
        return ring * math.sin(psi) ** (d - 2) * t ** (d - 1) * norm_sq ** (power / 2.0)

    val, _ = integrate.dblquad(integrand, 0.0, radius, 0.0, math.pi)
    return val


# ---------------------------------------------------------------------------
# support bodies for the uniform model


@dataclass(frozen=True)
class Box:
    """Axis-aligned box with strictly positive volume."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if len(lo) != len(hi) or not lo:
            raise ValueError("box corners must share a positive dimension")
        if not all(h > l for l, h in zip(lo, hi)):
            raise ValueError("box must have positive volume")
        if not all(map(math.isfinite, lo + hi)):
            raise ValueError("box corners must be finite")

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def volume(self) -> float:
        return math.prod(h - l for l, h in zip(self.lo, self.hi))

    @property
    def bounding_radius(self) -> float:
        return math.sqrt(sum(max(l * l, h * h) for l, h in zip(self.lo, self.hi)))

    @property
    def origin_distance(self) -> float:
        return math.sqrt(
            sum(max(l - 0.0, 0.0, 0.0 - h) ** 2 for l, h in zip(self.lo, self.hi))
        )

    def contains(self, x: np.ndarray) -> np.ndarray:
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return np.all((x >= lo) & (x <= hi), axis=-1)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return lo + (hi - lo) * rng.random((n, self.dim))

    def radial_volume(self, s: float) -> float:
        if s <= self.origin_distance:
            return 0.0
        if s >= self.bounding_radius:
            return self.volume
        return _box_ball_volume(self.lo, self.hi, s)

    def abs_moment_integral(self, power: float) -> float:
        ranges = list(zip(self.lo, self.hi))
        val, _ = integrate.nquad(
            lambda *x: math.sqrt(sum(v * v for v in x)) ** power, ranges
        )
        return val

    def numeric_volume(self) -> float:
        return _box_ball_volume(self.lo, self.hi, self.bounding_radius * (1.0 + 1e-9))


@dataclass(frozen=True)
class Ball:
    """Euclidean ball with strictly positive radius."""

    center: tuple
    radius: float

    def __post_init__(self):
        center = tuple(float(v) for v in self.center)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))
        if not center:
            raise ValueError("ball center must have a positive dimension")
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError("ball must have positive finite radius")
        if not all(map(math.isfinite, center)):
            raise ValueError("ball center must be finite")

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def volume(self) -> float:
        return unit_ball_volume(self.dim) * self.radius**self.dim

    @property
    def center_norm(self) -> float:
        return math.sqrt(sum(v * v for v in self.center))

    @property
    def bounding_radius(self) -> float:
        return self.center_norm + self.radius

    @property
    def origin_distance(self) -> float:
        return max(0.0, self.center_norm - self.radius)

    def contains(self, x: np.ndarray) -> np.ndarray:
        diff = x - np.asarray(self.center)
        return np.sum(diff * diff, axis=-1) <= self.radius**2

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        # uniform rejection from the bounding box
        center = np.asarray(self.center)
        out = np.empty((n, self.dim))
        need = n
        while need:
            cand = center + self.radius * (2.0 * rng.random((need, self.dim)) - 1.0)
            keep = self.contains(cand)
            got = int(keep.sum())
            if got:
                out[n - need : n - need + got] = cand[keep]
                need -= got
        return out

    def radial_volume(self, s: float) -> float:
        if s <= self.origin_distance:
            return 0.0
        if s >= self.bounding_radius:
            return self.volume
        return _ball_ball_volume(self.center_norm, self.radius, s, self.dim)

    def abs_moment_integral(self, power: float) -> float:
        return _ball_abs_moment_integral(self.center_norm, self.radius, self.dim, power)

    def numeric_volume(self) -> float:
        return _cap_volume(self.radius, 2.0 * self.radius, self.dim)


def _bodies_overlap(a, b) -> bool:
    if isinstance(a, Box) and isinstance(b, Box):
        return all(al < bh and bl < ah for al, ah, bl, bh in zip(a.lo, a.hi, b.lo, b.hi))
    if isinstance(a, Ball) and isinstance(b, Ball):
        return math.dist(a.center, b.center) < a.radius + b.radius
    if isinstance(a, Ball):
        a, b = b, a
    # a is the box, b the ball: closest box point to the ball center
    closest = [min(max(c, l), h) for c, l, h in zip(b.center, a.lo, a.hi)]
    return math.dist(closest, b.center) < b.radius


# ---------------------------------------------------------------------------
# the abstract model


class DensityModel(ABC):
    """A sampling density together with its analytic summaries.

    Subclasses are immutable after construction and verify their own
    normalization numerically (tolerance 1e-6) when built. Sampling takes
    a caller-supplied generator; one generator must not be shared across
    concurrent callers, but distinct generators may run in parallel.
    """

    name: str = "abstract"

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        self.dim = int(dim)

    # -- core surface -------------------------------------------------

    @abstractmethod
    def pdf(self, x) -> np.ndarray | float:
        """Density at one point (d,) or at rows of an (n, d) array."""

    @abstractmethod
    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """n i.i.d. draws as an (n, d) array."""

    @abstractmethod
    def i_rho(self, rho: float) -> float:
        """Integral of f^rho over the support; ``math.inf`` when divergent.

        Orders rho <= 0 only make sense on bounded supports with the pdf
        bounded away from zero; elsewhere the integral is infinite.
        """

    def i_rho_is_finite(self, rho: float) -> bool:
        return math.isfinite(self.i_rho(rho))

    @abstractmethod
    def moment(self, r: float) -> float:
        """r-th absolute moment E|X|^r; ``math.inf`` when divergent."""

    @abstractmethod
    def critical_moment(self) -> float:
        """Supremum of the orders with a finite absolute moment."""

    @abstractmethod
    def annulus_mass(self, k: int) -> float:
        """Probability of the annulus A_k (A_0 is the ball of radius 2)."""

    @abstractmethod
    def expect_of_intensity(self, h, tol: float = 1e-8) -> tuple[float, float]:
        """(value, error) of the integral of h(f(x)) f(x) dx."""

    # -- traits used by the convergence checks -------------------------

    @property
    @abstractmethod
    def sup_pdf(self) -> float:
        """Supremum of the density over R^d."""

    @property
    def inf_pdf_on_support(self) -> float:
        """Infimum of the density over its support (0 if not bounded away)."""
        return 0.0

    @property
    def bounded_convex_union_support(self) -> bool:
        """Whether the support is a finite union of bounded convex bodies."""
        return False

    @property
    def power_law_tail_exponent(self) -> float | None:
        """beta when the density decays like |x|^(-beta), else None."""
        return None

    def shell_regularity(self) -> bool | None:
        """Analytic verdict on the shell-mass ratio condition: consecutive
        annulus masses F(A_k)/F(A_{k-1}) bounded away from 0 and infinity
        for large k. None means no analytic certificate (check numerically).
        """
        return None

    # -- shared helpers -------------------------------------------------

    def to_config(self) -> dict:
        return {"model": self.name, "d": self.dim}

    def _check_radial_annulus(self, radial_cdf, k: int) -> float:
        if k < 0:
            raise ValueError(f"annulus index must be >= 0, got {k}")
        if k == 0:
            return radial_cdf(2.0)
        return radial_cdf(2.0 ** (k + 1)) - radial_cdf(2.0**k)

    def _assert_normalized(self, numeric_total: float) -> None:
        if abs(numeric_total - 1.0) > _NORMALIZATION_TOL:
            raise ValueError(
                f"{self.name}: pdf integrates to {numeric_total!r}, not 1"
            )

    def __repr__(self) -> str:
        params = {k: v for k, v in self.to_config().items() if k != "model"}
        inner = ", ".join(f"{k}={v}" for k, v in params.items())
        return f"{type(self).__name__}({inner})"


def _radial_expectation(profile, d: int, h, tol: float) -> tuple[float, float]:
    """(value, error) of the integral of h(f(x)) f(x) dx for a radial
    density f(x) = profile(|x|)."""
    area = d * unit_ball_volume(d)

    def integrand(s: float) -> float:
        g = profile(s)
        # below this intensity h(g) can overflow while the weighted term
        # g * h(g) sits far beneath any usable tolerance
        if g <= 1e-200:
            return 0.0
        return area * s ** (d - 1) * g * h(g)

    value, err = integrate.quad(
        integrand, 0.0, np.inf, limit=200, epsabs=tol / 10.0, epsrel=tol / 10.0
    )
    if not math.isfinite(value):
        raise QuadratureBudgetExceeded("radial outer integral did not converge")
    return value, err


# ---------------------------------------------------------------------------
# concrete models


class UniformConvexUnion(DensityModel):
    """Uniform density on a disjoint finite union of balls and boxes.

    Parameters
    ----------
    bodies : sequence of Box or Ball
        Bounded bodies with positive volume, pairwise disjoint, all of the
        same dimension. The pdf is constant 1/total_volume on the union.
    """

    name = "uniform_union"

    def __init__(self, bodies):
        bodies = tuple(bodies)
        if not bodies:
            raise ValueError("need at least one body")
        super().__init__(bodies[0].dim)
        if any(b.dim != self.dim for b in bodies):
            raise ValueError("all bodies must share one dimension")
        for i in range(len(bodies)):
            for k in range(i + 1, len(bodies)):
                if _bodies_overlap(bodies[i], bodies[k]):
                    raise ValueError(f"bodies {i} and {k} overlap")
        self.bodies = bodies
        self.total_volume = sum(b.volume for b in bodies)
        numeric = sum(b.numeric_volume() for b in bodies) / self.total_volume
        self._assert_normalized(numeric)

    @classmethod
    def unit_cube(cls, d: int) -> "UniformConvexUnion":
        return cls([Box(lo=(0.0,) * d, hi=(1.0,) * d)])

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = np.zeros(x.shape[:-1], dtype=bool)
        for b in self.bodies:
            inside |= b.contains(x)
        out = np.where(inside, 1.0 / self.total_volume, 0.0)
        return float(out) if out.ndim == 0 else out

    def sample(self, rng, n):
        probs = np.array([b.volume for b in self.bodies]) / self.total_volume
        idx = rng.choice(len(self.bodies), size=n, p=probs)
        out = np.empty((n, self.dim))
        for b_i, body in enumerate(self.bodies):
            mask = idx == b_i
            count = int(mask.sum())
            if count:
                out[mask] = body.sample(rng, count)
        return out

    def i_rho(self, rho):
        # exact for every real rho: the pdf is constant on a bounded support
        return self.total_volume ** (1.0 - rho)

    def moment(self, r):
        if r <= 0:
            raise ValueError(f"moment order must be positive, got {r}")
        return sum(b.abs_moment_integral(r) for b in self.bodies) / self.total_volume

    def critical_moment(self):
        return math.inf

    def annulus_mass(self, k):
        return self._check_radial_annulus(self._radial_cdf, k)

    def _radial_cdf(self, s: float) -> float:
        return sum(b.radial_volume(s) / self.total_volume for b in self.bodies)

    def expect_of_intensity(self, h, tol=1e-8):
        # f is constant on its support, so the integral collapses exactly
        return h(1.0 / self.total_volume), 0.0

    @property
    def sup_pdf(self):
        return 1.0 / self.total_volume

    @property
    def inf_pdf_on_support(self):
        return 1.0 / self.total_volume

    @property
    def bounded_convex_union_support(self):
        return True

    def shell_regularity(self):
        return False  # annulus masses vanish beyond the bounding radius

    def to_config(self):
        bodies = []
        for b in self.bodies:
            if isinstance(b, Box):
                bodies.append({"type": "box", "lo": list(b.lo), "hi": list(b.hi)})
            else:
                bodies.append(
                    {"type": "ball", "center": list(b.center), "radius": b.radius}
                )
        return {"model": self.name, "d": self.dim, "bodies": bodies}


class GaussianStandard(DensityModel):
    """Standard normal on R^d: mean zero, identity covariance."""

    name = "gaussian"

    def __init__(self, dim: int):
        super().__init__(dim)
        numeric, _ = integrate.quad(
            lambda s: self.dim
            * unit_ball_volume(self.dim)
            * s ** (self.dim - 1)
            * self._profile(s),
            0.0,
            np.inf,
        )
        self._assert_normalized(numeric)

    def _profile(self, s: float) -> float:
        return (2.0 * math.pi) ** (-self.dim / 2.0) * math.exp(-0.5 * s * s)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        sq = np.sum(x * x, axis=-1)
        out = (2.0 * math.pi) ** (-self.dim / 2.0) * np.exp(-0.5 * sq)
        return float(out) if out.ndim == 0 else out

    def sample(self, rng, n):
        return rng.standard_normal((n, self.dim))

    def i_rho(self, rho):
        if rho <= 0:
            return math.inf
        return rho ** (-self.dim / 2.0) * (2.0 * math.pi) ** (self.dim * (1.0 - rho) / 2.0)

    def moment(self, r):
        if r <= 0:
            raise ValueError(f"moment order must be positive, got {r}")
        # |X| is chi-distributed with d degrees of freedom
        return math.exp(
            0.5 * r * math.log(2.0)
            + math.lgamma((self.dim + r) / 2.0)
            - math.lgamma(self.dim / 2.0)
        )

    def critical_moment(self):
        return math.inf

    def annulus_mass(self, k):
        return self._check_radial_annulus(
            lambda s: float(gammainc(self.dim / 2.0, 0.5 * s * s)), k
        )

    def expect_of_intensity(self, h, tol=1e-8):
        return _radial_expectation(self._profile, self.dim, h, tol)

    @property
    def sup_pdf(self):
        return (2.0 * math.pi) ** (-self.dim / 2.0)

    def shell_regularity(self):
        return False  # shell masses decay super-geometrically


class PowerLawTail(DensityModel):
    """Heavy-tailed density f(x) = c_beta * (1 + |x|)^(-beta), beta > d.

    The normalizing constant is c_beta = 1 / (d * omega_d * B(d, beta - d)),
    the critical moment is beta - d, and the integral of f^rho is finite
    exactly when beta * rho > d.
    """

    name = "power_law"

    def __init__(self, dim: int, beta: float):
        super().__init__(dim)
        beta = float(beta)
        if not (beta > dim):
            raise ValueError(f"beta must exceed the dimension, got beta={beta}, d={dim}")
        self.beta = beta
        log_b = math.lgamma(dim) + math.lgamma(beta - dim) - math.lgamma(beta)
        self.c_beta = 1.0 / (dim * unit_ball_volume(dim) * math.exp(log_b))
        numeric, _ = integrate.quad(
            lambda s: dim * unit_ball_volume(dim) * s ** (dim - 1) * self._profile(s),
            0.0,
            np.inf,
            limit=200,
        )
        self._assert_normalized(numeric)

    def _profile(self, s: float) -> float:
        return self.c_beta * (1.0 + s) ** (-self.beta)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        norms = np.sqrt(np.sum(x * x, axis=-1))
        out = self.c_beta * (1.0 + norms) ** (-self.beta)
        return float(out) if out.ndim == 0 else out

    def _radial_cdf(self, s):
        # With t = 1/(1+s) the radial integral becomes an incomplete Beta
        # integral, so the CDF is 1 - I_{1/(1+s)}(beta - d, d).
        s = np.asarray(s, dtype=float)
        out = 1.0 - betainc(self.beta - self.dim, self.dim, 1.0 / (1.0 + s))
        return float(out) if out.ndim == 0 else out

    def _radial_ppf(self, u: np.ndarray) -> np.ndarray:
        hi = 1.0
        target = float(np.max(u))
        for _ in range(200):
            if self._radial_cdf(hi) >= target:
                break
            hi *= 2.0
        lo = np.zeros_like(u)
        hi = np.full_like(u, hi)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            below = self._radial_cdf(mid) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    def sample(self, rng, n):
        radii = self._radial_ppf(rng.random(n))
        directions = rng.standard_normal((n, self.dim))
        norms = np.linalg.norm(directions, axis=1)
        while np.any(norms == 0.0):  # pragma: no cover - probability zero
            bad = norms == 0.0
            directions[bad] = rng.standard_normal((int(bad.sum()), self.dim))
            norms = np.linalg.norm(directions, axis=1)
        return radii[:, None] * directions / norms[:, None]

    def i_rho(self, rho):
        if self.beta * rho <= self.dim:
            return math.inf
        value, _ = integrate.quad(
            lambda s: s ** (self.dim - 1) * (1.0 + s) ** (-self.beta * rho),
            0.0,
            np.inf,
            limit=200,
        )
        return self.c_beta**rho * self.dim * unit_ball_volume(self.dim) * value

    def i_rho_is_finite(self, rho):
        return self.beta * rho > self.dim

    def moment(self, r):
        if r <= 0:
            raise ValueError(f"moment order must be positive, got {r}")
        if r >= self.beta - self.dim:
            return math.inf
        log_b = (
            math.lgamma(self.dim + r)
            + math.lgamma(self.beta - self.dim - r)
            - math.lgamma(self.beta)
        )
        return self.c_beta * self.dim * unit_ball_volume(self.dim) * math.exp(log_b)

    def critical_moment(self):
        return self.beta - self.dim

    def annulus_mass(self, k):
        return self._check_radial_annulus(self._radial_cdf, k)

    def expect_of_intensity(self, h, tol=1e-8):
        return _radial_expectation(self._profile, self.dim, h, tol)

    @property
    def sup_pdf(self):
        return self.c_beta

    @property
    def power_law_tail_exponent(self):
        return self.beta

    def shell_regularity(self):
        return True  # shell-mass ratios converge to 2^(d - beta)

    def to_config(self):
        return {"model": self.name, "d": self.dim, "beta": self.beta}


class AnnulusBallCounterexample(DensityModel):
    """Piecewise-constant density concentrated on one unit ball per annulus.

    For k >= 2 the unit ball B_k sits at (3 * 2^(k-1), 0, ..., 0), which
    lies strictly inside the annulus A_k, and carries constant density
    C * 2^(-r*k). Consequences: F(A_k) = C * omega_d * 2^(-r*k) exactly,
    consecutive shell-mass ratios equal 2^(-r) for k >= 3, the critical
    moment equals r, and the integral of f^rho is finite for every
    rho > 0. The density is bounded but not continuous; boundedness is
    all the divergence analysis needs.
    """

    name = "counterexample"

    def __init__(self, dim: int, r: float):
        super().__init__(dim)
        r = float(r)
        if not (r > 0 and math.isfinite(r)):
            raise ValueError(f"decay rate r must be positive and finite, got {r}")
        self.r = r
        self._omega = unit_ball_volume(dim)
        # sum_{k>=2} 2^(-r k) = 2^(-2r) / (1 - 2^(-r))
        self._shell_sum = 2.0 ** (-2.0 * r) / (1.0 - 2.0 ** (-r))
        self.c_norm = 1.0 / (self._omega * self._shell_sum)
        numeric = self.c_norm * Ball(center=(0.0,) * dim, radius=1.0).numeric_volume() * self._shell_sum
        self._assert_normalized(numeric)

    def center_coordinate(self, k: int) -> float:
        return 3.0 * 2.0 ** (k - 1)

    def pdf(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        first = x[:, 0]
        rest_sq = np.sum(x[:, 1:] * x[:, 1:], axis=1)
        out = np.zeros(len(x))
        positive = first > 1.0
        if np.any(positive):
            k_est = np.floor(np.log2(first[positive] / 3.0) + 1.0).astype(int)
            vals = np.zeros(int(positive.sum()))
            for dk in (0, 1, -1):
                k = k_est + dk
                ok = k >= 2
                centers = 3.0 * 2.0 ** (k.astype(float) - 1.0)
                inside = ok & (
                    (first[positive] - centers) ** 2 + rest_sq[positive] <= 1.0
                )
                vals = np.where(
                    inside, self.c_norm * 2.0 ** (-self.r * k.astype(float)), vals
                )
            out[positive] = vals
        return float(out[0]) if np.asarray(x).ndim == 1 else out

    def sample(self, rng, n):
        # shell index first (shifted geometric), then uniform in that ball
        k = rng.geometric(1.0 - 2.0 ** (-self.r), size=n) + 1
        offsets = Ball(center=(0.0,) * self.dim, radius=1.0).sample(rng, n)
        offsets[:, 0] += 3.0 * 2.0 ** (k.astype(float) - 1.0)
        return offsets

    def i_rho(self, rho):
        if rho <= 0:
            # countably many balls of equal volume: f^rho does not integrate
            return math.inf
        rr = self.r * rho
        return (
            self._omega
            * self.c_norm**rho
            * 2.0 ** (-2.0 * rr)
            / (1.0 - 2.0 ** (-rr))
        )

    def moment(self, q):
        if q <= 0:
            raise ValueError(f"moment order must be positive, got {q}")
        if q >= self.r:
            return math.inf
        total = 0.0
        k = 2
        while True:
            mass = self.annulus_mass(k)
            center = self.center_coordinate(k)
            total += (
                mass
                * _ball_abs_moment_integral(center, 1.0, self.dim, q)
                / self._omega
            )
            # remaining terms are below a geometric envelope with ratio 2^(q-r)
            envelope = self.annulus_mass(k + 1) * (self.center_coordinate(k + 1) + 1.0) ** q
            if envelope / (1.0 - 2.0 ** (q - self.r)) < 1e-12 * total:
                return total
            k += 1
            if k > 500:  # pragma: no cover - the envelope shrinks geometrically
                raise QuadratureBudgetExceeded("moment series did not settle")

    def critical_moment(self):
        return self.r

    def annulus_mass(self, k):
        if k < 0:
            raise ValueError(f"annulus index must be >= 0, got {k}")
        if k < 2:
            return 0.0
        return self.c_norm * self._omega * 2.0 ** (-self.r * k)

    def expect_of_intensity(self, h, tol=1e-8):
        total = 0.0
        prev = None
        decreasing_run = 0
        for k in range(2, 503):
            term = self.annulus_mass(k) * h(self.c_norm * 2.0 ** (-self.r * k))
            total += term
            if prev is not None and abs(term) < abs(prev):
                decreasing_run += 1
                ratio = abs(term) / abs(prev) if prev else 0.0
                if decreasing_run >= 3 and ratio < 1.0:
                    tail_bound = abs(term) * ratio / (1.0 - ratio)
                    if tail_bound < 0.5 * tol * max(1.0, abs(total)):
                        return total, tail_bound
            else:
                decreasing_run = 0
            prev = term
        raise QuadratureBudgetExceeded("shell series did not settle within budget")

    @property
    def sup_pdf(self):
        return self.c_norm * 2.0 ** (-2.0 * self.r)

    def shell_regularity(self):
        return True  # ratio is exactly 2^(-r) for k >= 3

    def to_config(self):
        return {"model": self.name, "d": self.dim, "r": self.r}


# ---------------------------------------------------------------------------
# configuration and sampling entry points

_MODEL_KEYS = {
    "uniform_union": {"bodies"},
    "gaussian": set(),
    "power_law": {"beta"},
    "counterexample": {"r"},
}


def _body_from_config(spec: dict, d: int):
    kind = spec.get("type")
    if kind == "box":
        try:
            body = Box(lo=tuple(spec["lo"]), hi=tuple(spec["hi"]))
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"bad box body: {exc}") from None
    elif kind == "ball":
        try:
            body = Ball(center=tuple(spec["center"]), radius=spec["radius"])
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"bad ball body: {exc}") from None
    else:
        raise ConfigError(f"body type must be 'box' or 'ball', got {kind!r}")
    if body.dim != d:
        raise ConfigError(f"body dimension {body.dim} does not match d={d}")
    return body


def model_from_config(cfg: dict) -> DensityModel:
    """Build a catalog model from its JSON configuration.

    Recognized keys: ``model`` (one of uniform_union, gaussian, power_law,
    counterexample), ``d``, and the model-specific key ``bodies``,
    ``beta`` or ``r``.
    """
    name = cfg.get("model")
    if name not in _MODEL_KEYS:
        raise ConfigError(
            f"unknown model {name!r}; expected one of {sorted(_MODEL_KEYS)}"
        )
    if "d" not in cfg:
        raise ConfigError("model configuration needs the dimension key 'd'")
    d = cfg["d"]
    if not isinstance(d, int) or d < 1:
        raise ConfigError(f"'d' must be a positive integer, got {d!r}")
    missing = _MODEL_KEYS[name] - cfg.keys()
    if missing:
        raise ConfigError(f"model {name!r} needs key(s) {sorted(missing)}")
    try:
        if name == "uniform_union":
            bodies = [_body_from_config(b, d) for b in cfg["bodies"]]
            return UniformConvexUnion(bodies)
        if name == "gaussian":
            return GaussianStandard(d)
        if name == "power_law":
            return PowerLawTail(d, cfg["beta"])
        return AnnulusBallCounterexample(d, cfg["r"])
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def sample_n(model: DensityModel, n: int, seed) -> PointSet:
    """n i.i.d. draws from the model as a PointSet, deterministic in the seed."""
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    return PointSet(model.sample(rng, n))
