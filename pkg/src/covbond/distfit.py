"""Two-parameter distribution fitting.

Quantile/expected-shortfall matching (equivalently PD/LGD matching) for
location-scale and lognormal families, and mean-variance matching for the
location-scale, lognormal, Vasicek and Beta families.

Expected shortfall is the *lower* tail mean, ``ES_a(Y) = E[Y | Y <= q_a(Y)]``
for continuous ``Y``, so ``ES < quantile`` always.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from covbond.errors import InfeasibleMoments
from covbond.numerics import (
    bivariate_normal_cdf,
    bracketed_root,
    log_mills_ratio,
    std_normal_cdf,
    std_normal_inv_cdf,
    std_normal_pdf,
)

# Lower end of the bracket for the lognormal scale root.
S_FLOOR = 1e-12
VASICEK_R_BRACKET = (1e-14, 1.0 - 1e-10)


@dataclass(frozen=True)
class QuantileESTarget:
    """Confidence level ``alpha``, quantile ``q`` and expected shortfall ``t``."""

    alpha: float
    q: float
    t: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.t < self.q:
            raise ValueError(f"expected shortfall t={self.t} must be below quantile q={self.q}")

    @classmethod
    def from_pd_lgd(cls, pd: float, lgd: float, threshold: float) -> "QuantileESTarget":
        """Map (PD, LGD, default threshold D) to (alpha, q, t) = (PD, D, D(1 - LGD))."""
        el = pd * lgd
        return cls(alpha=pd, q=threshold, t=threshold * (pd - el) / pd)

    @classmethod
    def from_pd_el(cls, pd: float, el: float, threshold: float) -> "QuantileESTarget":
        return cls(alpha=pd, q=threshold, t=threshold * (pd - el) / pd)


@dataclass(frozen=True)
class LocScaleParams:
    m: float
    s: float

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError(f"scale must be positive, got {self.s}")


@dataclass(frozen=True)
class MeanVarTarget:
    mu: float
    sigma2: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise InfeasibleMoments(f"variance must be positive, got {self.sigma2}")


@dataclass(frozen=True)
class BetaParams:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"Beta parameters must be positive, got ({self.a}, {self.b})")

    @property
    def mean(self) -> float:
        return self.a / (self.a + self.b)

    @property
    def var(self) -> float:
        n = self.a + self.b
        return self.a * self.b / (n * n * (n + 1.0))


@dataclass(frozen=True)
class VasicekParams:
    """Vasicek law with mean ``Phi(m)`` and latent correlation ``s^2/(1+s^2)``.

    Samples are ``Phi(location + s X)`` with ``X`` standard normal; note
    ``location = m sqrt(1+s^2)``, since ``E[Phi(c + s X)] = Phi(c / sqrt(1+s^2))``.
    """

    m: float
    s: float

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError(f"scale must be positive, got {self.s}")

    @property
    def location(self) -> float:
        return self.m * math.sqrt(1.0 + self.s * self.s)

    @property
    def mean(self) -> float:
        return std_normal_cdf(self.m)

    @property
    def var(self) -> float:
        r = self.s * self.s / (1.0 + self.s * self.s)
        return bivariate_normal_cdf(self.m, self.m, r) - std_normal_cdf(self.m) ** 2


# --- quantile / expected shortfall matching ---------------------------------


def normal_es(alpha: float) -> float:
    """Lower-tail expected shortfall of the standard normal at level ``alpha``."""
    return -std_normal_pdf(std_normal_inv_cdf(alpha)) / alpha


def fit_locscale_quantile_es(
    target: QuantileESTarget, q_alpha_X: float, es_alpha_X: float
) -> LocScaleParams:
    """Solve ``m + s q_a(X) = q`` and ``m + s ES_a(X) = t`` for the generator ``X``."""
    gap = q_alpha_X - es_alpha_X
    if not gap > 0:
        raise ValueError(
            f"generator needs ES below its quantile, got ES={es_alpha_X}, q={q_alpha_X}"
        )
    s = (target.q - target.t) / gap
    return LocScaleParams(m=target.q - s * q_alpha_X, s=s)


def fit_normal_quantile_es(target: QuantileESTarget) -> LocScaleParams:
    a = std_normal_inv_cdf(target.alpha)
    phi_a = std_normal_pdf(a)
    denom = target.alpha * a + phi_a
    s = target.alpha * (target.q - target.t) / denom
    m = (target.alpha * target.t * a + target.q * phi_a) / denom
    return LocScaleParams(m=m, s=s)


def lognormal_quantile(params: LocScaleParams, alpha: float) -> float:
    return math.exp(params.m + params.s * std_normal_inv_cdf(alpha))


def lognormal_es(params: LocScaleParams, alpha: float) -> float:
    """Lower-tail expected shortfall of ``exp(m + s X)`` at level ``alpha``."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    a = std_normal_inv_cdf(alpha)
    m, s = params.m, params.s
    # s^2/2 + log Phi(a - s) rewritten so the s^2 terms cancel analytically
    return math.exp(m + a * s - 0.5 * a * a + log_mills_ratio(s - a)) / alpha


def lognormal_scale_equation(s: float, a: float, b: float) -> float:
    """``Phi(a - s) - b exp(a s - s^2/2)``; its unique root is the fitted scale."""
    return std_normal_cdf(a - s) - b * math.exp(a * s - 0.5 * s * s)


def lognormal_scale_upper_bound(a: float, b: float) -> float:
    """Minimiser of the scale equation, an upper bound for its root."""
    return std_normal_pdf(a) / b + a


def solve_lognormal_scale(a: float, b: float) -> float:
    """Unique positive root of ``Phi(a - s) = b exp(a s - s^2/2)``, ``0 < b < Phi(a)``.

    Taking logs gives ``log Phi(a - s) + (s - a)^2/2 = log b + a^2/2``, whose
    left side is a decreasing function of ``s - a`` that stays accurate when
    ``Phi(a - s)`` is tiny and ``s`` is large.
    """
    if not 0.0 < b < std_normal_cdf(a):
        raise ValueError(f"scale equation needs 0 < b < Phi(a), got a={a}, b={b}")
    level = math.log(b) + 0.5 * a * a

    def g(s):
        return log_mills_ratio(s - a) - level

    hi = lognormal_scale_upper_bound(a, b)
    return bracketed_root(g, S_FLOOR, hi)


def fit_lognormal_quantile_es(target: QuantileESTarget) -> LocScaleParams:
    if not 0.0 < target.t < target.q:
        raise ValueError(f"lognormal fit needs 0 < t < q, got t={target.t}, q={target.q}")
    a = std_normal_inv_cdf(target.alpha)
    b = target.alpha * target.t / target.q
    s = solve_lognormal_scale(a, b)
    return LocScaleParams(m=math.log(target.q) - s * a, s=s)


def lognormal_s_lower_bounds(target: QuantileESTarget) -> float:
    """Greatest applicable a-priori lower bound on the fitted lognormal scale.

    ``ES < mean`` means ``s^2 - 2 a s + 2 log(q/t) > 0``. With real roots
    this excludes the interval between them, which gives
    ``s > a + sqrt(a^2 - 2 log(q/t))`` only when the smaller root is not
    positive, i.e. ``a <= 0``. For ``a > 0`` the fit may lie below the smaller
    root, so no bound is taken. A mode below ``q`` (implied by ``t < q/2``)
    gives ``s > -a``. Returns 0 when neither is informative.
    """
    a = std_normal_inv_cdf(target.alpha)
    bound = 0.0
    disc = a * a - 2.0 * math.log(target.q / target.t)
    if disc >= 0 and a <= 0:
        bound = max(bound, a + math.sqrt(disc))
    if target.t < 0.5 * target.q:
        bound = max(bound, -a)
    return bound


# --- mean / variance matching ------------------------------------------------


def mv_fit_locscale(target: MeanVarTarget, gen_mean: float, gen_var: float) -> LocScaleParams:
    if not gen_var > 0:
        raise ValueError(f"generator variance must be positive, got {gen_var}")
    s = math.sqrt(target.sigma2 / gen_var)
    return LocScaleParams(m=target.mu - s * gen_mean, s=s)


def mv_fit_lognormal(target: MeanVarTarget) -> LocScaleParams:
    """Lognormal with the given mean and variance.

    Uses ``m = log(mu) - s^2/2``; the often quoted ``log(mu^2/(mu^2+sigma^2))``
    does not reproduce the mean.
    """
    if not target.mu > 0:
        raise InfeasibleMoments(f"lognormal mean must be positive, got {target.mu}")
    s2 = math.log1p(target.sigma2 / (target.mu * target.mu))
    return LocScaleParams(m=math.log(target.mu) - 0.5 * s2, s=math.sqrt(s2))


def _check_unit_interval(target: MeanVarTarget) -> None:
    mu, v = target.mu, target.sigma2
    if not 0.0 < mu < 1.0:
        raise InfeasibleMoments(f"mean must lie in (0, 1), got {mu}")
    if not v < mu * (1.0 - mu):
        raise InfeasibleMoments(
            f"variance {v} must be below mean*(1-mean) = {mu * (1.0 - mu)}"
        )


def mv_fit_vasicek(target: MeanVarTarget) -> VasicekParams:
    """``m = Phi^-1(mu)``, then solve ``Phi2(m, m; r) = Phi(m)^2 + sigma2`` for ``r``."""
    _check_unit_interval(target)
    m = std_normal_inv_cdf(target.mu)
    level = std_normal_cdf(m) ** 2 + target.sigma2

    def h(r):
        return bivariate_normal_cdf(m, m, r) - level

    lo, hi = VASICEK_R_BRACKET
    if h(hi) <= 0:
        raise InfeasibleMoments(
            f"variance {target.sigma2} too close to the bound {target.mu * (1 - target.mu)}"
        )
    r = lo if h(lo) >= 0 else bracketed_root(h, lo, hi)
    return VasicekParams(m=m, s=math.sqrt(r / (1.0 - r)))


def mv_fit_beta(target: MeanVarTarget) -> BetaParams:
    _check_unit_interval(target)
    mu = target.mu
    factor = mu * (1.0 - mu) / target.sigma2 - 1.0
    return BetaParams(a=mu * factor, b=(1.0 - mu) * factor)
