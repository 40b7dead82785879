"""Adjusted lognormal one-asset model.

Total issuer assets ``A = exp(kappa + psi xi)``; the cover pool is ``eps A``
and the remaining assets ``(1 - eps) A``. The encumbrance ratio ``eps`` is
chosen so that the cover pool's expected shortfall below ``(1+v) C``
matches a target cover-pool EL, then capped at 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from covbond.errors import NotEquivalent
from covbond.numerics import (
    Interval,
    bracketed_root,
    expand_bracket,
    gaussian_weighted_integral,
    std_normal_cdf,
)
from covbond.two_assets import (
    QUAD_TOL,
    DebtStructure,
    LossReport,
    RiskInputs,
    TwoAssetParams,
    _report,
    calibrate_pool,
)

EQUIVALENCE_TOL = 1e-12


@dataclass(frozen=True)
class OneAssetParams:
    kappa: float
    psi: float
    epsilon: float

    def __post_init__(self):
        if not self.psi > 0:
            raise ValueError(f"psi must be positive, got {self.psi}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"encumbrance ratio must lie in [0, 1], got {self.epsilon}")

    @property
    def theta(self) -> float:
        """Log-location of the cover pool, ``kappa + log(eps)``."""
        return self.kappa + math.log(self.epsilon) if self.epsilon > 0 else -math.inf


@dataclass(frozen=True)
class AdjustmentResult:
    theta: float
    epsilon_raw: float
    epsilon: float
    capped: bool


def calibrate_issuer_one(debt: DebtStructure, issuer: RiskInputs) -> tuple[float, float]:
    """``(kappa, psi)`` matching issuer PD and EL at total debt ``C + S + U``."""
    return calibrate_pool(debt.total, issuer)


def cover_shortfall(theta: float, psi: float, threshold: float) -> float:
    """``E[(K - exp(theta + psi xi))^+]`` for ``K = threshold``."""
    d = (math.log(threshold) - theta) / psi
    return threshold * std_normal_cdf(d) - math.exp(theta + 0.5 * psi * psi) * std_normal_cdf(d - psi)


def min_matchable_el(kappa: float, psi: float, C: float, v: float) -> float:
    """Smallest cover-pool EL reachable with ``eps <= 1``."""
    if not C > 0:
        raise ValueError(f"needs C > 0, got {C}")
    k = (1.0 + v) * C
    return cover_shortfall(kappa, psi, k) / k


def adjust_encumbrance(kappa: float, psi: float, C: float, v: float, el_cover: float) -> AdjustmentResult:
    if not 0.0 < el_cover < 1.0:
        raise ValueError(f"cover EL must lie in (0, 1), got {el_cover}")
    if not C > 0:
        raise ValueError(f"needs C > 0, got {C}")
    k = (1.0 + v) * C
    target = k * el_cover

    def f(theta):
        return cover_shortfall(theta, psi, k) - target

    # f decreases from k - target > 0 (theta -> -inf) to -target (theta -> inf).
    hi = math.log(k) + 40.0 * psi
    if f(hi) > 0:
        hi = expand_bracket(f, hi, psi)
    lo = hi - psi
    if f(lo) <= 0:
        lo = expand_bracket(f, lo, -psi)
    theta = bracketed_root(f, lo, hi)
    raw = math.exp(theta - kappa)
    return AdjustmentResult(theta=theta, epsilon_raw=raw, epsilon=min(1.0, raw), capped=raw > 1.0)


def encumbrance_from_balance(C: float, v: float, a0: float) -> float:
    """Encumbrance ratio ``(1+v) C / A0`` from today's total asset value."""
    if not a0 > 0:
        raise ValueError(f"total assets must be positive, got {a0}")
    eps = (1.0 + v) * C / a0
    if not eps < 1.0:
        raise ValueError(f"collateral (1+v)C = {(1 + v) * C} must be below total assets {a0}")
    return eps


def adjusted_one_asset(
    debt: DebtStructure, issuer: RiskInputs, el_cover: float
) -> tuple[OneAssetParams, AdjustmentResult]:
    """Full two-step calibration: issuer fit, then encumbrance adjustment.

    Without covered bonds (``C = 0``) the ratio is 0 and no adjustment runs.
    """
    kappa, psi = calibrate_issuer_one(debt, issuer)
    if debt.C == 0:
        adj = AdjustmentResult(theta=-math.inf, epsilon_raw=0.0, epsilon=0.0, capped=False)
    else:
        adj = adjust_encumbrance(kappa, psi, debt.C, debt.v, el_cover)
    return OneAssetParams(kappa, psi, adj.epsilon), adj


def expected_losses_one(params: OneAssetParams, debt: DebtStructure) -> LossReport:
    kappa, psi, eps = params.kappa, params.psi, params.epsilon
    C, S, U, cs, total = debt.C, debt.S, debt.U, debt.senior, debt.total

    def z(a):
        return (math.log(a) - kappa) / psi

    # A < C / eps is the cover-pool shortfall region; it is empty without covered bonds.
    if C == 0:
        z_cover = -math.inf
        upper3, upper2 = -math.inf, z(cs)
    else:
        cover_level = C / eps if eps > 0 else math.inf
        z_cover = z(cover_level) if math.isfinite(cover_level) else math.inf
        upper3 = z(min(cover_level, cs))
        upper2 = z(max(cover_level, cs))
    mean_a = math.exp(kappa + 0.5 * psi * psi)

    p1 = std_normal_cdf(z(total)) - std_normal_cdf(z(cs))
    p2 = std_normal_cdf(upper2) - std_normal_cdf(z_cover)
    p3 = std_normal_cdf(upper3)

    def covered(x):
        a = math.exp(kappa + psi * x)
        return (C - eps * a) * (cs - a) / (cs - eps * a)

    def senior_short(x):
        a = math.exp(kappa + psi * x)
        return (cs - a) / (cs - eps * a)

    c_el = 0.0
    shortfall_part = 0.0
    if C > 0:
        iv3 = Interval(-math.inf, upper3)
        c_el = gaussian_weighted_integral(covered, iv3, QUAD_TOL)
        shortfall_part = gaussian_weighted_integral(senior_short, iv3, QUAD_TOL)
    s_el = 0.0
    if S > 0:
        s_el = S * shortfall_part + cs * p2
        s_el -= mean_a * (std_normal_cdf(upper2 - psi) - std_normal_cdf(z_cover - psi))
    u_el = 0.0
    if U > 0:
        u_el = U * std_normal_cdf(z(cs)) + total * p1
        u_el -= mean_a * (std_normal_cdf(z(total) - psi) - std_normal_cdf(z(cs) - psi))
    return _report(debt, p1, p2, p3, c_el, max(s_el, 0.0), max(u_el, 0.0))


def two_asset_to_one_asset(params: TwoAssetParams) -> OneAssetParams:
    """One-asset representation of a comonotonic model with equal volatilities."""
    if not params.comonotonic:
        raise NotEquivalent(f"needs rho = 1, got {params.rho}")
    if abs(params.sigma - params.tau) > EQUIVALENCE_TOL * max(1.0, params.sigma):
        raise NotEquivalent(f"needs sigma = tau, got {params.sigma} vs {params.tau}")
    kappa = float(_logaddexp(params.mu, params.nu))
    eps = math.exp(params.mu - kappa)
    return OneAssetParams(kappa=kappa, psi=params.sigma, epsilon=eps)


def _logaddexp(a: float, b: float) -> float:
    m = max(a, b)
    return m + math.log(math.exp(a - m) + math.exp(b - m))
