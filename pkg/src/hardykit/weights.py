"""Radial weight families and weighted quadrature on (0, oo).

A weight family is a radial density mu(r) > 0 together with its exact
logarithmic derivatives.  Everything downstream (Hardy profiles, spectral
assembly, the parabolic stepper) consumes only this interface:

    eval_mu(family, r)          mu(r)
    log_derivatives(family, r)  (mu'/mu, Delta mu / mu)
    weighted_integral(...)      omega_N * int f(r) r^power mu(r) r^{N-1} dr

Built-in kinds
--------------
Lebesgue          mu = 1
ExpPower          mu = exp(-b r^m),                b >= 0, m > 0
PowerExpPower     mu = r^{-beta} exp(-b r^m)
LogWeight         mu = theta(r) (log 1/r)^alpha    (theta = 1 on r <= 1/2,
                                                    0 on r >= 1)
Oscillating       mu = 2 + sin(log r) on r <= 1/2, C^2 blend to the
                  constant 2 on [1/2, 1]
Custom            user-supplied radial callables

The LogWeight / Oscillating profiles are only meaningful near the origin;
they are closed with a smooth bump-template transition on [1/2, 1] so that
integrals over (0, oo) make sense.  All near-origin analysis happens at
r < 1/2 where the closure is inactive.

Quadrature runs on the log axis s = log r, where power-law singularities
become exponentials: adaptive Gauss-Kronrod per block, with blocks doubling
toward s = -oo and a divergence flag when the block sums refuse to settle.
Weight logarithms are evaluated directly as functions of s, so integrands
stay meaningful far below the smallest positive float in r.

All types are immutable values and all operations are pure; everything here
is safe to share across threads.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.integrate import quad

from .errors import (
    DivergentIntegral,
    InvalidParams,
    NonPositiveRadius,
    QuadratureFailure,
)

__all__ = [
    "Kind",
    "WeightFamily",
    "RadialGrid",
    "RadialBump",
    "surface_measure",
    "eval_mu",
    "log_mu",
    "log_derivatives",
    "weighted_integral",
    "hat_element_integrals",
    "smooth_transition",
    "family_from_mapping",
]


def _quiet_overflow(fn):
    """Run fn with numpy overflow/divide noise silenced: infinities out of
    extreme radii are meaningful sentinels for the divergence detectors."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            return fn(*args, **kwargs)
    return wrapper


LOG_HALF = math.log(0.5)
_EXP_UNDERFLOW = -745.0  # exp() underflows to 0.0 below this
_MAX_TAIL_BLOCKS = 58    # deepest block reaches |log r| ~ 2^57
_DIVERGENCE_BLOWUP = 1e60


class Kind(str, Enum):
    LEBESGUE = "lebesgue"
    EXP_POWER = "exp_power"
    POWER_EXP_POWER = "power_exp_power"
    LOG_WEIGHT = "log_weight"
    OSCILLATING = "oscillating"
    CUSTOM = "custom"


def surface_measure(dimension: int) -> float:
    """omega_N, the surface measure of the unit sphere in R^N."""
    return 2.0 * math.pi ** (dimension / 2.0) / math.gamma(dimension / 2.0)


# ----------------------------------------------------------------------
# smooth transitions (the bump template exp(-1/(1-s^2)), rescaled)
# ----------------------------------------------------------------------

def smooth_transition(r, lo: float, hi: float):
    """C^1 transition from 1 at r <= lo to 0 at r >= hi.

    Rescaling of the bump template exp(1 - 1/(1-s^2)) to [lo, hi].  Smooth
    in (lo, hi) and C-infinity flat at the hi end; only C^1 at the lo seam,
    which is irrelevant here because every quantitative statement is made
    strictly inside or outside the transition window.
    """
    arr = np.asarray(r, dtype=float)
    scalar = arr.ndim == 0
    s = np.atleast_1d((arr - lo) / (hi - lo))
    out = np.ones_like(s)
    out[s >= 1.0] = 0.0
    mid = (s > 0.0) & (s < 1.0)
    sm = s[mid]
    out[mid] = np.exp(1.0 - 1.0 / (1.0 - sm * sm))
    return float(out[0]) if scalar else out


def _transition_logderivs(r, lo: float, hi: float):
    """(log theta)' and (log theta)'' on the open transition window."""
    r = np.asarray(r, dtype=float)
    c1 = 1.0 / (hi - lo)
    s = (r - lo) * c1
    g = 1.0 - s * s
    d1 = -2.0 * s / g**2 * c1
    d2 = (-2.0 / g**2 - 8.0 * s * s / g**3) * c1**2
    return d1, d2


# ----------------------------------------------------------------------
# the oscillating family's C^2 closure
# ----------------------------------------------------------------------

@lru_cache(maxsize=1)
def _oscillating_blend() -> np.ndarray:
    """Quintic Hermite coefficients blending 2 + sin(log r) into the
    constant 2 on [1/2, 1], matching value and two derivatives at both ends
    (keeps mu in H^2_loc)."""
    t = LOG_HALF
    val = 2.0 + math.sin(t)
    d1 = math.cos(t) / 0.5
    d2 = (-math.sin(t) - math.cos(t)) / 0.25
    A = np.zeros((6, 6))
    b = np.array([val, d1, d2, 2.0, 0.0, 0.0])
    for i, rr in enumerate((0.5, 1.0)):
        for k in range(3):
            for p in range(6):
                if p - k >= 0:
                    coef = 1.0
                    for q in range(k):
                        coef *= p - q
                    A[3 * i + k, p] = coef * rr ** (p - k)
    return np.linalg.solve(A, b)


def _poly_eval(coeffs: np.ndarray, r, order: int = 0):
    out = np.zeros_like(np.asarray(r, dtype=float))
    for p, c in enumerate(coeffs):
        if p - order < 0:
            continue
        fac = 1.0
        for q in range(order):
            fac *= p - q
        out = out + c * fac * np.asarray(r, dtype=float) ** (p - order)
    return out


# ----------------------------------------------------------------------
# families
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class WeightFamily:
    """Parametric radial density with analytic log-derivatives.

    Parameters are interpreted per `kind`; irrelevant ones are ignored.
    `custom_profile` is a triple (mu, mu'/mu, mu''/mu) of radial callables;
    the third entry may be None, in which case a five-point finite
    difference of log mu is used (documented accuracy loss ~1e-6).
    """

    kind: Kind
    dimension: int
    b: float = 0.0
    m: float = 1.0
    beta: float = 0.0
    alpha: float = 0.0
    custom_profile: Optional[Tuple[Callable, Callable, Optional[Callable]]] = None

    def __post_init__(self):
        if not isinstance(self.kind, Kind):
            object.__setattr__(self, "kind", Kind(self.kind))
        if int(self.dimension) != self.dimension or self.dimension < 3:
            raise InvalidParams(f"dimension must be an integer >= 3, got {self.dimension}")
        object.__setattr__(self, "dimension", int(self.dimension))
        if self.kind in (Kind.EXP_POWER, Kind.POWER_EXP_POWER):
            if self.b < 0:
                raise InvalidParams("exponential coefficient b must be >= 0")
            if self.m <= 0:
                raise InvalidParams("exponential power m must be > 0")
        if self.kind is Kind.CUSTOM:
            if self.custom_profile is None or len(self.custom_profile) != 3:
                raise InvalidParams("custom kind requires a (mu, mu'/mu, mu''/mu) triple")
        elif self.custom_profile is not None:
            raise InvalidParams("custom_profile is only valid with kind=custom")

    @property
    def power_order(self) -> float:
        """Exact power-law exponent of mu at the origin (mu ~ r^{-power_order})."""
        return self.beta if self.kind is Kind.POWER_EXP_POWER else 0.0

    @property
    def seams(self) -> Tuple[float, ...]:
        """Radii where the profile switches branches (quadrature split points)."""
        if self.kind in (Kind.LOG_WEIGHT, Kind.OSCILLATING):
            return (0.5, 1.0)
        return ()

    def analytic_N0(self) -> Optional[float]:
        """Closed-form effective dimension sup{d : r^{-d} in L^1_loc(dmu)}.

        N - beta for the power-singular kind and N for every other built-in;
        None for custom profiles (use the numeric estimators).
        """
        if self.kind is Kind.CUSTOM:
            return None
        return self.dimension - self.power_order

    def label(self) -> str:
        bits = [self.kind.value, f"N={self.dimension}"]
        if self.kind in (Kind.EXP_POWER, Kind.POWER_EXP_POWER):
            bits.append(f"b={self.b:g}")
            bits.append(f"m={self.m:g}")
        if self.kind is Kind.POWER_EXP_POWER:
            bits.append(f"beta={self.beta:g}")
        if self.kind is Kind.LOG_WEIGHT:
            bits.append(f"alpha={self.alpha:g}")
        return " ".join(bits)


def family_from_mapping(params: dict) -> WeightFamily:
    """Build a family from plain key=value strings (the config grammar)."""
    try:
        kind = Kind(str(params["kind"]).strip().lower())
    except (KeyError, ValueError) as exc:
        raise InvalidParams(f"unknown or missing weight kind: {params.get('kind')!r}") from exc
    def _f(key, default=0.0):
        return float(params.get(key, default))
    return WeightFamily(
        kind=kind,
        dimension=int(float(params.get("dimension", params.get("N", 3)))),
        b=_f("b"),
        m=_f("m", 1.0),
        beta=_f("beta"),
        alpha=_f("alpha"),
    )


def _check_radius(r):
    arr = np.asarray(r, dtype=float)
    if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
        raise NonPositiveRadius(f"radius must be positive and finite, got {r!r}")
    return arr


@_quiet_overflow
def eval_mu(family: WeightFamily, r):
    """mu(r).  Vectorized; scalar in, scalar out.

    For LogWeight/Oscillating beyond r = 1/2 this returns the smooth
    compactly-supported (resp. constant) closure value.
    """
    arr = _check_radius(r)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    k = family.kind
    if k is Kind.LEBESGUE:
        out = np.ones_like(arr)
    elif k is Kind.EXP_POWER:
        out = np.exp(-family.b * arr**family.m)
    elif k is Kind.POWER_EXP_POWER:
        out = arr ** (-family.beta) * np.exp(-family.b * arr**family.m)
    elif k is Kind.LOG_WEIGHT:
        theta = smooth_transition(arr, 0.5, 1.0)
        out = np.zeros_like(arr)
        pos = theta > 0.0
        out[pos] = theta[pos] * (-np.log(arr[pos])) ** family.alpha
    elif k is Kind.OSCILLATING:
        out = np.empty_like(arr)
        near = arr <= 0.5
        far = arr >= 1.0
        mid = ~near & ~far
        out[near] = 2.0 + np.sin(np.log(arr[near]))
        out[far] = 2.0
        if mid.any():
            out[mid] = _poly_eval(_oscillating_blend(), arr[mid])
    else:
        out = np.atleast_1d(np.asarray(family.custom_profile[0](arr), dtype=float))
    return float(out[0]) if scalar else out


@_quiet_overflow
def log_mu(family: WeightFamily, s):
    """log mu as a function of s = log r, stable for arbitrarily negative s.

    Returns -inf where mu vanishes (the compact-support closure).  This is
    the quantity the quadrature engine integrates against; it never forms
    r = exp(s), so it remains exact far below the smallest positive float.
    """
    s = np.asarray(s, dtype=float)
    scalar = s.ndim == 0
    s = np.atleast_1d(s)
    k = family.kind
    if k is Kind.LEBESGUE:
        out = np.zeros_like(s)
    elif k is Kind.EXP_POWER:
        out = -family.b * np.exp(np.minimum(family.m * s, 709.0)) if family.b else np.zeros_like(s)
    elif k is Kind.POWER_EXP_POWER:
        out = -family.beta * s
        if family.b:
            out = out - family.b * np.exp(np.minimum(family.m * s, 709.0))
    elif k is Kind.LOG_WEIGHT:
        out = np.full_like(s, -np.inf)
        core = s < -1e-15
        sc = s[core]
        val = family.alpha * np.log(-sc)
        trans = sc > LOG_HALF
        if trans.any():
            x = (np.exp(sc[trans]) - 0.5) / 0.5
            val[trans] += 1.0 - 1.0 / (1.0 - x * x)
        out[core] = val
    elif k is Kind.OSCILLATING:
        out = np.where(s <= LOG_HALF, np.log(2.0 + np.sin(s)), np.log(2.0))
        mid = (s > LOG_HALF) & (s < 0.0)
        if mid.any():
            out[mid] = np.log(_poly_eval(_oscillating_blend(), np.exp(s[mid])))
    else:
        r = np.exp(np.maximum(s, -700.0))  # custom callables only see r >= ~1e-304
        with np.errstate(divide="ignore"):
            out = np.log(np.asarray(family.custom_profile[0](r), dtype=float))
    return float(out[0]) if scalar else out


@_quiet_overflow
def log_derivatives(family: WeightFamily, r):
    """(d1, lap_ratio) = (mu'/mu, Delta mu / mu) at radius r.

    lap_ratio is the radial Laplacian ratio mu''/mu + (N-1)/r * mu'/mu.
    Where mu vanishes (beyond the LogWeight support) the ratios are
    undefined and returned as nan.
    """
    arr = _check_radius(r)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    k = family.kind
    N = family.dimension
    if k is Kind.LEBESGUE:
        d1 = np.zeros_like(arr)
        mu2 = np.zeros_like(arr)
    elif k is Kind.EXP_POWER:
        b, m = family.b, family.m
        d1 = -b * m * arr ** (m - 1.0)
        glog2 = -b * m * (m - 1.0) * arr ** (m - 2.0)
        mu2 = glog2 + d1 * d1
    elif k is Kind.POWER_EXP_POWER:
        b, m, beta = family.b, family.m, family.beta
        d1 = -beta / arr - b * m * arr ** (m - 1.0)
        glog2 = beta / arr**2 - b * m * (m - 1.0) * arr ** (m - 2.0)
        mu2 = glog2 + d1 * d1
    elif k is Kind.LOG_WEIGHT:
        alpha = family.alpha
        ell = -np.log(arr)
        with np.errstate(divide="ignore", invalid="ignore"):
            d1 = -alpha / (arr * ell)
            glog2 = alpha * (ell - 1.0) / (arr**2 * ell**2)
        trans = (arr > 0.5) & (arr < 1.0)
        if trans.any():
            td1, td2 = _transition_logderivs(arr[trans], 0.5, 1.0)
            d1[trans] += td1
            glog2[trans] += td2
        dead = arr >= 1.0
        d1[dead] = np.nan
        glog2[dead] = np.nan
        mu2 = glog2 + d1 * d1
    elif k is Kind.OSCILLATING:
        d1 = np.empty_like(arr)
        mu2 = np.empty_like(arr)
        t = np.log(arr)
        near = arr <= 0.5
        far = arr >= 1.0
        mid = ~near & ~far
        muv = 2.0 + np.sin(t[near])
        d1[near] = np.cos(t[near]) / (arr[near] * muv)
        mu2[near] = -(np.sin(t[near]) + np.cos(t[near])) / (arr[near] ** 2 * muv)
        d1[far] = 0.0
        mu2[far] = 0.0
        if mid.any():
            coeffs = _oscillating_blend()
            p0 = _poly_eval(coeffs, arr[mid])
            d1[mid] = _poly_eval(coeffs, arr[mid], 1) / p0
            mu2[mid] = _poly_eval(coeffs, arr[mid], 2) / p0
    else:
        mu_fn, d1_fn, lap2_fn = family.custom_profile
        d1 = np.atleast_1d(np.asarray(d1_fn(arr), dtype=float))
        if lap2_fn is not None:
            mu2 = np.atleast_1d(np.asarray(lap2_fn(arr), dtype=float))
        else:
            # five-point finite difference of g = log mu; mu''/mu = g'' + g'^2
            h = 1e-3 * arr
            g = lambda x: np.log(np.asarray(mu_fn(x), dtype=float))
            g2 = (-g(arr + 2 * h) + 16 * g(arr + h) - 30 * g(arr)
                  + 16 * g(arr - h) - g(arr - 2 * h)) / (12 * h * h)
            mu2 = g2 + d1 * d1
    lap = mu2 + (N - 1.0) / arr * d1
    if scalar:
        return float(d1[0]), float(lap[0])
    return d1, lap


# ----------------------------------------------------------------------
# weighted quadrature
# ----------------------------------------------------------------------

def _quad_block(F, a: float, b: float, rtol: float, pts=()):
    inner = [p for p in pts if a < p < b]
    try:
        out = quad(F, a, b, limit=300, epsrel=rtol, epsabs=1e-300,
                   points=inner or None, full_output=True)
    except Exception as exc:  # quadpack can raise on hopeless integrands
        raise QuadratureFailure(str(exc)) from exc
    val, abserr = out[0], out[1]
    if len(out) == 3:
        return val
    # warning path: non-finite or exploding values go straight to the
    # divergence detector; accept moderate values whose error estimate is
    # already at tolerance, otherwise retry with a bigger budget
    if not np.isfinite(val) or abs(val) > 1e50:
        return val
    if abserr <= 10.0 * rtol * abs(val) + 1e-280:
        return val
    out2 = quad(F, a, b, limit=800, epsrel=max(rtol, 1e-9), epsabs=1e-300,
                points=inner or None, full_output=True)
    val2, abserr2 = out2[0], out2[1]
    if not np.isfinite(val2) or abs(val2) > 1e50:
        return val2
    if len(out2) == 3 or abserr2 <= 1e-7 * abs(val2) + 1e-280:
        return val2
    if abs(val2 - val) <= 1e-6 * max(abs(val), abs(val2)) + 1e-290:
        return val2
    raise QuadratureFailure(f"quadrature did not settle on [{a:g}, {b:g}]")


def weighted_integral(
    family: WeightFamily,
    f: Optional[Callable] = None,
    r_lo: float = 0.0,
    r_hi: float = 1.0,
    *,
    power: float = 0.0,
    rtol: float = 1e-10,
) -> float:
    """omega_N * int_{r_lo}^{r_hi} f(r) r^power mu(r) r^{N-1} dr.

    `f` must be bounded on (r_lo, r_hi] and vectorization-friendly; put any
    singular power-law factor into `power`, where it is folded into the
    log-axis exponent and stays exact at arbitrarily small radii.  With
    f=None the integrand is r^power alone.

    Raises DivergentIntegral when adaptive refinement toward r_lo = 0 fails
    to settle -- this is the integrability probe used by the effective
    dimension estimator.
    """
    if r_lo < 0.0 or r_hi <= r_lo:
        raise InvalidParams(f"bad integration range ({r_lo}, {r_hi})")
    N = family.dimension
    total_pow = N + power

    def F(s: float) -> float:
        e = log_mu(family, s) + total_pow * s
        if e < _EXP_UNDERFLOW or e == -np.inf:
            return 0.0
        v = math.exp(e)
        if f is not None:
            try:
                v *= float(f(math.exp(s) if s > -700.0 else 0.0))
            except OverflowError:
                # singular integrand exploding during tail refinement:
                # evidence of divergence, not a quadrature defect
                return math.inf
        return v

    pts = [math.log(p) for p in family.seams if r_lo < p < r_hi]
    s_hi = math.log(r_hi)
    omega = surface_measure(N)
    if r_lo > 0.0:
        return omega * _quad_block(F, math.log(r_lo), s_hi, rtol, pts)

    if family.kind is Kind.OSCILLATING and f is None:
        # pure power moment of 2 + sin(log r): the tail below the seam has
        # an elementary antiderivative, and the generic blocks would need
        # exponentially many oscillation periods
        q = total_pow
        if q <= 0.0:
            raise DivergentIntegral(
                "oscillating weight: r^power moment diverges toward 0"
            )
        a = min(s_hi, LOG_HALF)
        tail = math.exp(q * a) * (
            2.0 / q + (q * math.sin(a) - math.cos(a)) / (q * q + 1.0)
        )
        head = _quad_block(F, a, s_hi, rtol, pts) if s_hi > a else 0.0
        return omega * (tail + head)

    acc = 0.0
    scale = None
    small = 0
    lo_off, hi_off = 1.0, 0.0
    for j in range(_MAX_TAIL_BLOCKS):
        v = _quad_block(F, s_hi - lo_off, s_hi - hi_off, rtol, pts)
        if not np.isfinite(v):
            raise DivergentIntegral(f"integrand blows up toward 0 (block {j})")
        acc += v
        if scale is None:
            scale = max(abs(acc), 1e-300)
        if abs(acc) > _DIVERGENCE_BLOWUP * scale:
            raise DivergentIntegral("block sums explode toward r = 0")
        if abs(v) <= rtol * abs(acc) + 1e-300:
            small += 1
            if small >= 2 and j >= 3:
                return omega * acc
        else:
            small = 0
        hi_off = lo_off
        lo_off *= 2.0
    raise DivergentIntegral("tail contributions refuse to settle toward r = 0")


# ----------------------------------------------------------------------
# grids and element quadrature for the discretized operators
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class RadialGrid:
    """Geometric grid r_i = r_min * rho^i on [r_min, r_max].

    The origin is excluded by construction; the singularity is never
    evaluated.
    """

    r_min: float
    r_max: float
    n_points: int

    def __post_init__(self):
        if self.r_min <= 0.0:
            raise InvalidParams("r_min must be positive (the origin is excluded)")
        if self.r_max <= self.r_min:
            raise InvalidParams("r_max must exceed r_min")
        if self.n_points < 16:
            raise InvalidParams("need at least 16 grid points")

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.geomspace(self.r_min, self.r_max, self.n_points)

    @property
    def ratio(self) -> float:
        return (self.r_max / self.r_min) ** (1.0 / (self.n_points - 1))


_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


@dataclass(frozen=True)
class ElementIntegrals:
    """Per-element integrals of hat-function products against dmu.

    With psi_L, psi_R the linear hats on element [r_k, r_{k+1}]:
      mass      int mu r^{N-1}
      mass_l/r  int psi_{L/R} mu r^{N-1}
      hardy_*   int psi psi / r^2 mu r^{N-1}
    All entries carry the omega_N surface factor.
    """

    h: np.ndarray
    mass: np.ndarray
    mass_l: np.ndarray
    mass_r: np.ndarray
    hardy_ll: np.ndarray
    hardy_lr: np.ndarray
    hardy_rr: np.ndarray


def hat_element_integrals(family: WeightFamily, nodes: np.ndarray) -> ElementIntegrals:
    """Fixed-order Gauss-Legendre element integrals (12 points/element).

    Elements of a geometric grid are narrow relative to their distance from
    the origin, so degree-12 quadrature of hat products against the smooth
    weight is exact to well below 1e-12 relative.
    """
    rl, rr = nodes[:-1], nodes[1:]
    h = rr - rl
    x = rl[:, None] + h[:, None] * (_GL_X[None, :] + 1.0) / 2.0
    w = h[:, None] * (_GL_W[None, :] / 2.0)
    base = eval_mu(family, x.ravel()).reshape(x.shape) * x ** (family.dimension - 1) * w
    base *= surface_measure(family.dimension)
    if not np.all(np.isfinite(base)):
        raise QuadratureFailure("weight not finite on the grid")
    psl = (rr[:, None] - x) / h[:, None]
    psr = (x - rl[:, None]) / h[:, None]
    inv_r2 = 1.0 / (x * x)
    return ElementIntegrals(
        h=h,
        mass=base.sum(axis=1),
        mass_l=(base * psl).sum(axis=1),
        mass_r=(base * psr).sum(axis=1),
        hardy_ll=(base * psl * psl * inv_r2).sum(axis=1),
        hardy_lr=(base * psl * psr * inv_r2).sum(axis=1),
        hardy_rr=(base * psr * psr * inv_r2).sum(axis=1),
    )


# ----------------------------------------------------------------------
# smooth radial bumps (shared test functions)
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class RadialBump:
    """Smooth bump supported on (lo, hi), normalized to 1 at the center.

    For lo = 0 the profile is exp(-1/(1 - (r/hi)^2)) scaled to 1 at r = 0,
    smooth as a function of x in R^N.  For lo > 0 it is the symmetric bump
    in the mapped coordinate s = (2r - lo - hi)/(hi - lo).
    """

    lo: float
    hi: float
    amplitude: float = 1.0

    def __call__(self, r):
        arr = np.asarray(r, dtype=float)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        if self.lo == 0.0:
            t = (arr / self.hi) ** 2
            inside = t < 1.0
            out = np.zeros_like(arr)
            out[inside] = math.e * np.exp(-1.0 / (1.0 - t[inside]))
        else:
            s = (2.0 * arr - self.lo - self.hi) / (self.hi - self.lo)
            inside = np.abs(s) < 1.0
            out = np.zeros_like(arr)
            out[inside] = math.e * np.exp(-1.0 / (1.0 - s[inside] ** 2))
        out *= self.amplitude
        return float(out[0]) if scalar else out

    def deriv(self, r):
        arr = np.asarray(r, dtype=float)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        val = np.atleast_1d(np.asarray(self(arr), dtype=float))
        out = np.zeros_like(val)
        if self.lo == 0.0:
            t = (arr / self.hi) ** 2
            inside = t < 1.0
            out[inside] = val[inside] * (-2.0 * arr[inside] / self.hi**2 / (1.0 - t[inside]) ** 2)
        else:
            c = 2.0 / (self.hi - self.lo)
            s = (2.0 * arr - self.lo - self.hi) / (self.hi - self.lo)
            inside = np.abs(s) < 1.0
            out[inside] = val[inside] * (-2.0 * s[inside] / (1.0 - s[inside] ** 2) ** 2 * c)
        return float(out[0]) if scalar else out
