"""Scalar numerics shared by the loss models.

Normal special functions, bracketed root finding, quadrature of
Gaussian-weighted integrands and the comonotonic threshold ``x(a)``.
Everything here is pure and reentrant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np
from scipy import integrate, optimize, special

from covbond.errors import NoBracket, NoConvergence

SQRT_2PI = math.sqrt(2.0 * math.pi)
# Infinite integration limits are cut here; Phi(-8.5) < 1e-17.
TAIL_CUTOFF = 8.5


@dataclass(frozen=True)
class Interval:
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"empty interval ({self.lower}, {self.upper})")


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_iter: int = 200

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_tol < 0 or self.abs_tol + self.rel_tol <= 0:
            raise ValueError("tolerances must be non-negative and not both zero")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")


DEFAULT_TOL = Tolerance()
ROOT_TOL = Tolerance(abs_tol=1e-15, rel_tol=4 * np.finfo(float).eps, max_iter=500)


def std_normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / SQRT_2PI


def std_normal_cdf(x: float) -> float:
    return float(special.ndtr(x))


def std_normal_logcdf(x: float) -> float:
    return float(special.log_ndtr(x))


def log_mills_ratio(x: float) -> float:
    """``log(Phi(-x) / phi(x)) - log(sqrt(2 pi)) = log Phi(-x) + x^2/2``.

    Stable for large positive ``x``, where the two terms nearly cancel.
    """
    if x > 0:
        return math.log(0.5 * float(special.erfcx(x / math.sqrt(2.0))))
    return float(special.log_ndtr(-x)) + 0.5 * x * x


def std_normal_inv_cdf(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise ValueError(f"inverse normal CDF needs 0 < p < 1, got {p}")
    return float(special.ndtri(p))


# Gauss-Legendre rules (positive half) for the Genz bivariate normal algorithm.
_GL = {}
for _n in (6, 12, 20):
    _nodes, _weights = np.polynomial.legendre.leggauss(_n)
    _half = _nodes > 0
    _x, _w = _nodes[_half], _weights[_half]
    _GL[_n] = (np.concatenate([1.0 - _x, 1.0 + _x]), np.concatenate([_w, _w]))


def _bvn_upper(h: float, k: float, r: float) -> float:
    """P[X > h, Y > k] for standard bivariate normal with correlation r.

    Drezner-Wesolowsky with Genz's refinements (Genz 2004, Stat. Comput.),
    accurate to about 1e-15.
    """
    if h == math.inf or k == math.inf:
        return 0.0
    if h == -math.inf:
        return 1.0 if k == -math.inf else std_normal_cdf(-k)
    if k == -math.inf:
        return std_normal_cdf(-h)
    ar = abs(r)
    x, w = _GL[6] if ar < 0.3 else _GL[12] if ar < 0.75 else _GL[20]
    hk = h * k
    if ar < 0.925:
        hs = 0.5 * (h * h + k * k)
        asr = 0.5 * math.asin(r)
        sn = np.sin(asr * x)
        bvn = float(np.dot(np.exp((sn * hk - hs) / (1.0 - sn * sn)), w))
        return bvn * asr / (2.0 * math.pi) + std_normal_cdf(-h) * std_normal_cdf(-k)

    if r < 0:
        k = -k
        hk = -hk
    bvn = 0.0
    if ar < 1.0:
        as_ = (1.0 - r) * (1.0 + r)
        a = math.sqrt(as_)
        bs = (h - k) ** 2
        asr = -0.5 * (bs / as_ + hk)
        c = (4.0 - hk) / 8.0
        d = (12.0 - hk) / 80.0
        if asr > -100.0:
            bvn = a * math.exp(asr) * (1.0 - c * (bs - as_) * (1.0 - d * bs) / 3.0 + c * d * as_ * as_)
        if hk > -100.0:
            b = math.sqrt(bs)
            sp = SQRT_2PI * std_normal_cdf(-b / a)
            bvn -= math.exp(-0.5 * hk) * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0)
        a *= 0.5
        xs = (a * x) ** 2
        asr_v = -0.5 * (bs / xs + hk)
        keep = asr_v > -100.0
        xs, asr_v, wk = xs[keep], asr_v[keep], w[keep]
        sp = 1.0 + c * xs * (1.0 + 5.0 * d * xs)
        rs = np.sqrt(1.0 - xs)
        ep = np.exp(-0.5 * hk * xs / (1.0 + rs) ** 2) / rs
        bvn = (a * float(np.dot(np.exp(asr_v) * (sp - ep), wk)) - bvn) / (2.0 * math.pi)
    if r > 0:
        return bvn + std_normal_cdf(-max(h, k))
    if h >= k:
        return -bvn
    if h < 0:
        lower = std_normal_cdf(k) - std_normal_cdf(h)
    else:
        lower = std_normal_cdf(-h) - std_normal_cdf(-k)
    return lower - bvn


def bivariate_normal_cdf(a: float, b: float, r: float) -> float:
    """P[X <= a, Y <= b] for standard normals with correlation ``r``."""
    if not -1.0 <= r <= 1.0:
        raise ValueError(f"correlation must lie in [-1, 1], got {r}")
    p = _bvn_upper(-a, -b, r)
    return min(1.0, max(0.0, p))


def bracketed_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: Tolerance = ROOT_TOL,
) -> float:
    """Root of ``f`` inside ``[lo, hi]`` by Brent's method."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.isnan(flo) or math.isnan(fhi) or (flo > 0) == (fhi > 0):
        raise NoBracket(f"no sign change on [{lo}, {hi}]: f={flo}, {fhi}")
    rtol = max(tol.rel_tol, 4 * np.finfo(float).eps)
    try:
        root, info = optimize.brentq(
            f, lo, hi, xtol=tol.abs_tol, rtol=rtol, maxiter=tol.max_iter,
            full_output=True, disp=False,
        )
    except RuntimeError as exc:
        raise NoConvergence(str(exc)) from exc
    if not info.converged:
        raise NoConvergence(f"brentq stopped after {info.iterations} iterations: {info.flag}")
    return float(root)


def expand_bracket(
    f: Callable[[float], float],
    start: float,
    step: float,
    max_steps: int = 200,
) -> float:
    """Walk from ``start`` by geometrically growing ``step`` until f changes sign.

    Returns the first point whose sign differs from ``f(start)``.
    """
    s0 = f(start) > 0
    x = start
    for _ in range(max_steps):
        x += step
        fx = f(x)
        if not math.isnan(fx) and (fx > 0) != s0:
            return x
        step *= 2.0
    raise NoBracket(f"no sign change found walking from {start}")


def gaussian_weighted_integral(
    g: Callable[[float], float],
    iv: Interval = Interval(-math.inf, math.inf),
    tol: Tolerance = DEFAULT_TOL,
    points: Optional[Iterable[float]] = None,
) -> float:
    """Integral of ``phi(x) * g(x)`` over ``iv``.

    Infinite limits are truncated at +-8.5. ``points`` are interior
    breakpoints (kinks or sharp transitions of ``g``) used as explicit
    subinterval endpoints.
    """
    lo = max(iv.lower, -TAIL_CUTOFF)
    hi = min(iv.upper, TAIL_CUTOFF)
    if not lo < hi:
        return 0.0
    cuts = sorted({p for p in (points or ()) if lo < p < hi and math.isfinite(p)})
    edges = [lo, *cuts, hi]

    def integrand(x):
        return math.exp(-0.5 * x * x) / SQRT_2PI * g(x)

    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, err, info = integrate.quad(
            integrand, a, b, epsabs=tol.abs_tol, epsrel=tol.rel_tol,
            limit=tol.max_iter, full_output=1,
        )[:3]
        if err > 100.0 * max(tol.abs_tol, tol.rel_tol * abs(val)) and err > 1e-14:
            raise NoConvergence(
                f"quadrature on [{a}, {b}] stalled: estimate {val}, error {err}", residual=err
            )
        total += val
    return total


def solve_threshold_x(a: float, mu: float, sigma: float, nu: float, tau: float) -> float:
    """Unique x with ``exp(mu + sigma x) + exp(nu + tau x) = a``."""
    if not a > 0:
        raise ValueError(f"threshold needs a > 0, got {a}")
    la = math.log(a)
    x_hi = min((la - mu) / sigma, (la - nu) / tau)

    def h(x):
        return np.logaddexp(mu + sigma * x, nu + tau * x) - la

    # h(x_hi) >= 0 exactly; a non-positive value means the other term is lost to rounding
    if h(x_hi) <= 0.0:
        return x_hi
    x_lo = expand_bracket(h, x_hi, -1.0) if h(x_hi - 1.0) >= 0 else x_hi - 1.0
    return bracketed_root(h, x_lo, x_hi)
