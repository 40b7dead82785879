"""Bivariate lognormal covered-bond model.

Cover pool ``X = exp(mu + sigma xi)`` and remaining assets
``Y = exp(nu + tau eta)`` with ``corr(xi, eta) = rho``. The issuer defaults
when ``Z = X + Y`` falls below total debt ``C + S + U``; recoveries follow the
waterfall in :func:`waterfall_losses`.

For ``rho < 1`` every quantity is a one-dimensional integral over ``xi``:
given ``xi = x``, ``log Y`` is normal with mean ``nu + tau rho x`` and
standard deviation ``tau sqrt(1 - rho^2)``, so all inner expectations are
lognormal closed forms. For ``rho = 1`` the pair is comonotonic and the
loss thresholds reduce to the root ``x(a)`` of ``exp(mu + sigma x) +
exp(nu + tau x) = a``.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy import optimize

from covbond.distfit import QuantileESTarget, fit_lognormal_quantile_es
from covbond.errors import Infeasible, NoBracket, NoConvergence
from covbond.numerics import (
    Interval,
    Tolerance,
    bracketed_root,
    expand_bracket,
    gaussian_weighted_integral,
    log_mills_ratio,
    solve_threshold_x,
    std_normal_cdf,
    std_normal_inv_cdf,
    std_normal_pdf,
)

log = logging.getLogger(__name__)

# Correlations at or above this are evaluated with the comonotonic formulas.
COMONOTONIC_RHO = 1.0 - 1e-9
QUAD_TOL = Tolerance(abs_tol=1e-14, rel_tol=1e-11, max_iter=400)
COPULA_RESIDUAL_TOL = 1e-8
_PENALTY = 1e3

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def _ncdf(x: float) -> float:
    return 0.5 * math.erfc(-x * _INV_SQRT2)


@dataclass(frozen=True)
class DebtStructure:
    """Face values of covered (C), senior unsecured (S) and junior (U) debt.

    ``v`` is the over-collateralisation level of the cover pool.
    """

    C: float
    S: float
    U: float
    v: float = 0.0

    def __post_init__(self):
        if min(self.C, self.S, self.U) < 0:
            raise ValueError(f"face values must be non-negative: {self}")
        if not self.C + self.S + self.U > 0:
            raise ValueError("total debt must be positive")
        if self.v < 0:
            raise ValueError(f"over-collateralisation must be non-negative, got {self.v}")

    @property
    def total(self) -> float:
        return self.C + self.S + self.U

    @property
    def senior(self) -> float:
        return self.C + self.S

    @property
    def other_threshold(self) -> float:
        """Default threshold of the non-cover assets, ``S + U - v C``."""
        return self.S + self.U - self.v * self.C


@dataclass(frozen=True)
class TwoAssetParams:
    mu: float
    sigma: float
    nu: float
    tau: float
    rho: float

    def __post_init__(self):
        if not (self.sigma > 0 and self.tau > 0):
            raise ValueError(f"volatilities must be positive: {self}")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [0, 1], got {self.rho}")

    @property
    def comonotonic(self) -> bool:
        return self.rho >= COMONOTONIC_RHO


@dataclass(frozen=True)
class RiskInputs:
    """Probability of loss ``pd`` and loss given default ``lgd`` of a pool."""

    pd: float
    lgd: float

    def __post_init__(self):
        if not 0.0 < self.pd < 1.0:
            raise ValueError(f"pd must lie in (0, 1), got {self.pd}")
        if not 0.0 < self.lgd < 1.0:
            raise ValueError(f"lgd must lie in (0, 1), got {self.lgd}")

    @property
    def el(self) -> float:
        return self.pd * self.lgd

    @classmethod
    def from_pd_el(cls, pd: float, el: float) -> "RiskInputs":
        return cls(pd=pd, lgd=el / pd)


@dataclass(frozen=True)
class LossReport:
    """Loss-event probabilities and expected loss rates.

    Event 1: junior-only loss; event 2: senior loss with the cover pool
    sufficient; event 3: cover pool short. Expected losses are fractions
    of each class's exposure; a class with zero face value reports ``None``.
    """

    p_event1: float
    p_event2: float
    p_event3: float
    el_covered: Optional[float]
    el_senior: Optional[float]
    el_junior: Optional[float]
    el_portfolio: float

    @property
    def issuer_pd(self) -> float:
        return self.p_event1 + self.p_event2 + self.p_event3

    def to_dict(self) -> dict:
        d = asdict(self)
        d["issuer_pd"] = self.issuer_pd
        return d


@dataclass(frozen=True)
class FeasibilityBounds:
    """Issuer PD/LGD ranges attainable by a comonotonic two-asset model.

    ``lgd_lower``/``lgd_upper`` are ``nan`` when ``pd >= pd_upper``.
    """

    pd_upper: float
    lgd_lower: float
    lgd_upper: float

    def contains(self, pd: float, lgd: float) -> bool:
        return 0.0 < pd < self.pd_upper and self.lgd_lower < lgd < self.lgd_upper


def _report(debt: DebtStructure, p1, p2, p3, c_el, s_el, u_el) -> LossReport:
    total_loss = c_el + s_el + u_el
    return LossReport(
        p_event1=min(1.0, max(0.0, p1)),
        p_event2=min(1.0, max(0.0, p2)),
        p_event3=min(1.0, max(0.0, p3)),
        el_covered=c_el / debt.C if debt.C > 0 else None,
        el_senior=s_el / debt.S if debt.S > 0 else None,
        el_junior=u_el / debt.U if debt.U > 0 else None,
        el_portfolio=total_loss / debt.total,
    )


# --- waterfall -------------------------------------------------------------


def waterfall_losses(x, y, debt: DebtStructure):
    """Loss rates ``(l_c, l_s, l_u)`` for cover-pool value ``x`` and other assets ``y``.

    Works elementwise on arrays. Classes with zero face value get loss 0.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    C, S, U = debt.C, debt.S, debt.U
    cs, total = debt.senior, debt.total
    z = x + y
    default = z < total
    senior_hit = default & (z < cs)
    ev1 = default & ~senior_hit
    ev2 = senior_hit & (x >= C)
    ev3 = senior_hit & (x < C)

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        l_u = np.where(ev1, 1.0 - (z - cs) / U if U > 0 else 0.0, 0.0)
        l_u = np.where(senior_hit, 1.0 if U > 0 else 0.0, l_u)
        share = (cs - z) / (cs - x)
        l_s = np.where(ev2, 1.0 - (z - C) / S if S > 0 else 0.0, 0.0)
        l_s = np.where(ev3, share if S > 0 else 0.0, l_s)
        l_c = np.where(ev3, (C - x) * share / C if C > 0 else 0.0, 0.0)

    out = (np.clip(l_c, 0.0, 1.0), np.clip(l_s, 0.0, 1.0), np.clip(l_u, 0.0, 1.0))
    if out[0].ndim == 0:
        return tuple(float(o) for o in out)
    return out


# --- rho < 1: conditional integrals -----------------------------------------


class _Conditional:
    """Inner expectations of Y given the cover-pool factor ``xi = x``."""

    def __init__(self, p: TwoAssetParams):
        self.p = p
        self.s = p.tau * math.sqrt((1.0 - p.rho) * (1.0 + p.rho))
        self.half_var = 0.5 * self.s * self.s

    def x_value(self, x: float) -> float:
        return math.exp(self.p.mu + self.p.sigma * x)

    def mean_log(self, x: float) -> float:
        return self.p.nu + self.p.tau * self.p.rho * x

    def prob_below(self, k: float, x: float) -> float:
        """P[Y < k | xi = x]."""
        if k <= 0:
            return 0.0
        return _ncdf((math.log(k) - self.mean_log(x)) / self.s)

    def partial_mean(self, k: float, x: float) -> float:
        """E[Y 1{Y < k} | xi = x]."""
        if k <= 0:
            return 0.0
        m = self.mean_log(x)
        d = (math.log(k) - m) / self.s
        return math.exp(m + self.half_var) * _ncdf(d - self.s)

    def put(self, k: float, x: float) -> float:
        """E[(k - Y)^+ | xi = x]."""
        if k <= 0:
            return 0.0
        m = self.mean_log(x)
        d = (math.log(k) - m) / self.s
        return max(0.0, k * _ncdf(d) - math.exp(m + self.half_var) * _ncdf(d - self.s))

    def transition(self, k: float) -> Optional[float]:
        """x where the conditional median of Z crosses ``k`` (sharp when rho ~ 1)."""
        p = self.p
        slope = p.tau * p.rho
        if slope > 0:
            return solve_threshold_x(k, p.mu, p.sigma, p.nu, slope)
        if k <= math.exp(p.nu):
            return None
        return (math.log(k - math.exp(p.nu)) - p.mu) / p.sigma

    def cut(self, k: float) -> float:
        """x above which ``X >= k``."""
        return (math.log(k) - self.p.mu) / self.p.sigma if k > 0 else -math.inf


def _integral(g, lo: float, hi: float, points=()) -> float:
    if not lo < hi:
        return 0.0
    return gaussian_weighted_integral(g, Interval(lo, hi), QUAD_TOL, points=points)


def _copula_report(p: TwoAssetParams, debt: DebtStructure) -> LossReport:
    cond = _Conditional(p)
    C, S, cs, total = debt.C, debt.S, debt.senior, debt.total
    x_c = cond.cut(C)
    x_cs = cond.cut(cs)
    x_tot = cond.cut(total)
    pts = [t for t in (cond.transition(cs), cond.transition(total)) if t is not None]
    pts_c = pts + [x_c]

    p_below_cs = lambda x: cond.prob_below(cs - cond.x_value(x), x)
    p_below_tot = lambda x: cond.prob_below(total - cond.x_value(x), x)
    put_cs = lambda x: cond.put(cs - cond.x_value(x), x)
    put_tot = lambda x: cond.put(total - cond.x_value(x), x)

    p_lt_cs = _integral(p_below_cs, -math.inf, x_cs, pts_c)
    p_lt_tot = _integral(p_below_tot, -math.inf, x_tot, pts_c)
    p3 = _integral(p_below_cs, -math.inf, min(x_c, x_cs), pts)
    p2 = p_lt_cs - p3
    p1 = p_lt_tot - p_lt_cs

    def covered(x):
        xv = cond.x_value(x)
        return (C - xv) / (cs - xv) * cond.put(cs - xv, x)

    def senior_short(x):
        xv = cond.x_value(x)
        return S / (cs - xv) * cond.put(cs - xv, x)

    c_el = _integral(covered, -math.inf, x_c, pts) if C > 0 else 0.0
    s_el = 0.0
    if S > 0:
        s_el = _integral(senior_short, -math.inf, min(x_c, x_cs), pts)
        s_el += _integral(put_cs, x_c, x_cs, pts)
    u_el = 0.0
    if debt.U > 0:
        u_el = _integral(put_tot, -math.inf, x_tot, pts_c) - _integral(put_cs, -math.inf, x_cs, pts_c)
    return _report(debt, p1, p2, p3, c_el, s_el, u_el)


# --- rho = 1: comonotonic formulas -------------------------------------------


def _x_of(a: float, p: TwoAssetParams) -> float:
    return solve_threshold_x(a, p.mu, p.sigma, p.nu, p.tau)


def _comonotonic_report(p: TwoAssetParams, debt: DebtStructure) -> LossReport:
    C, S, U, cs, total = debt.C, debt.S, debt.U, debt.senior, debt.total
    mu, sig, nu, tau = p.mu, p.sigma, p.nu, p.tau
    x_cs = _x_of(cs, p)
    x_tot = _x_of(total, p)
    x_c = (math.log(C) - mu) / sig if C > 0 else -math.inf
    upper3 = min(x_c, x_cs)
    mean_x = math.exp(mu + 0.5 * sig * sig)
    mean_y = math.exp(nu + 0.5 * tau * tau)

    p1 = std_normal_cdf(x_tot) - std_normal_cdf(x_cs)
    p2 = max(std_normal_cdf(x_cs) - std_normal_cdf(x_c), 0.0)
    p3 = std_normal_cdf(upper3)

    def covered(x):
        xv = math.exp(mu + sig * x)
        yv = math.exp(nu + tau * x)
        return (C - xv) * (cs - xv - yv) / (cs - xv)

    def y_share(x):
        return math.exp(nu + tau * x) / (cs - math.exp(mu + sig * x))

    c_el = 0.0
    if C > 0:
        c_el = _integral(covered, -math.inf, upper3)
    s_el = 0.0
    if S > 0:
        s_el = S * p3 - S * _integral(y_share, -math.inf, upper3)
        s_el += cs * p2
        s_el -= mean_x * max(std_normal_cdf(x_cs - sig) - std_normal_cdf(x_c - sig), 0.0)
        s_el -= mean_y * max(std_normal_cdf(x_cs - tau) - std_normal_cdf(x_c - tau), 0.0)
    u_el = 0.0
    if U > 0:
        u_el = U * std_normal_cdf(x_cs) + total * p1
        u_el -= mean_x * (std_normal_cdf(x_tot - sig) - std_normal_cdf(x_cs - sig))
        u_el -= mean_y * (std_normal_cdf(x_tot - tau) - std_normal_cdf(x_cs - tau))
    return _report(debt, p1, p2, p3, c_el, max(s_el, 0.0), max(u_el, 0.0))


# --- public evaluation --------------------------------------------------------


def expected_losses(params: TwoAssetParams, debt: DebtStructure) -> LossReport:
    if params.comonotonic:
        return _comonotonic_report(params, debt)
    return _copula_report(params, debt)


def loss_event_probs(params: TwoAssetParams, debt: DebtStructure) -> tuple[float, float, float]:
    r = expected_losses(params, debt)
    return r.p_event1, r.p_event2, r.p_event3


def issuer_pd_el(params: TwoAssetParams, threshold: float) -> tuple[float, float]:
    """Issuer PD ``P[Z < D]`` and EL ``E[(D - Z)^+] / D`` at debt level ``D``."""
    pd, shortfall = _issuer_moments(params, threshold)
    return pd, shortfall / threshold


def _issuer_moments(params: TwoAssetParams, D: float) -> tuple[float, float]:
    """``(P[Z < D], E[(D - Z)^+])``."""
    if params.comonotonic:
        xd = _x_of(D, params)
        pd = std_normal_cdf(xd)
        partial = math.exp(params.mu + 0.5 * params.sigma ** 2) * std_normal_cdf(xd - params.sigma)
        partial += math.exp(params.nu + 0.5 * params.tau ** 2) * std_normal_cdf(xd - params.tau)
        return pd, max(D * pd - partial, 0.0)
    cond = _Conditional(params)
    x_d = cond.cut(D)
    pts = [t for t in (cond.transition(D),) if t is not None]
    pd = _integral(lambda x: cond.prob_below(D - cond.x_value(x), x), -math.inf, x_d, pts)
    short = _integral(lambda x: cond.put(D - cond.x_value(x), x), -math.inf, x_d, pts)
    return pd, short


def issuer_default_partial_mean(params: TwoAssetParams, D: float) -> float:
    """``E[Z 1{Z < D}]``, summed as cover-pool part plus remaining-asset part."""
    if params.comonotonic:
        xd = _x_of(D, params)
        return (math.exp(params.mu + 0.5 * params.sigma ** 2) * std_normal_cdf(xd - params.sigma)
                + math.exp(params.nu + 0.5 * params.tau ** 2) * std_normal_cdf(xd - params.tau))
    cond = _Conditional(params)
    x_d = cond.cut(D)
    pts = [t for t in (cond.transition(D),) if t is not None]

    def g(x):
        xv = cond.x_value(x)
        k = D - xv
        return xv * cond.prob_below(k, x) + cond.partial_mean(k, x)

    return _integral(g, -math.inf, x_d, pts)


# --- calibration ----------------------------------------------------------------


def calibrate_pool(threshold: float, risk: RiskInputs) -> tuple[float, float]:
    """Lognormal ``(location, scale)`` whose PD/EL at ``threshold`` match ``risk``."""
    target = QuantileESTarget.from_pd_el(risk.pd, risk.el, threshold)
    fit = fit_lognormal_quantile_es(target)
    return fit.m, fit.s


def calibrate_cover_pool(C: float, v: float, cover: RiskInputs) -> tuple[float, float]:
    if not C > 0:
        raise ValueError(f"cover pool calibration needs C > 0, got {C}")
    return calibrate_pool((1.0 + v) * C, cover)


def feasibility_bounds(mu: float, sigma: float, d_issuer: float, p_issuer: float) -> FeasibilityBounds:
    pd_upper = std_normal_cdf((math.log(d_issuer) - mu) / sigma)
    if not 0.0 < p_issuer < pd_upper:
        return FeasibilityBounds(pd_upper, math.nan, math.nan)
    a = std_normal_inv_cdf(p_issuer)
    cover_partial = math.exp(mu + 0.5 * sigma * sigma) * std_normal_cdf(a - sigma)
    scale = p_issuer * d_issuer
    lgd_lower = (p_issuer * math.exp(mu + sigma * a) - cover_partial) / scale
    lgd_upper = 1.0 - cover_partial / scale
    return FeasibilityBounds(pd_upper, lgd_lower, lgd_upper)


def _infeasibility(bounds: FeasibilityBounds, issuer: RiskInputs) -> Optional[Infeasible]:
    if not issuer.pd < bounds.pd_upper:
        return Infeasible(
            f"issuer PD {issuer.pd} must be below {bounds.pd_upper}",
            constraint="pd_upper", bounds=bounds,
        )
    if not issuer.lgd > bounds.lgd_lower:
        return Infeasible(
            f"issuer LGD {issuer.lgd} must exceed {bounds.lgd_lower}",
            constraint="lgd_lower", bounds=bounds,
        )
    if not issuer.lgd < bounds.lgd_upper:
        return Infeasible(
            f"issuer LGD {issuer.lgd} must be below {bounds.lgd_upper}",
            constraint="lgd_upper", bounds=bounds,
        )
    return None


def calibrate_issuer_comonotonic(
    mu: float, sigma: float, d_issuer: float, issuer: RiskInputs
) -> tuple[float, float]:
    """Remaining-asset ``(nu, tau)`` reproducing issuer PD/LGD when ``rho = 1``.

    With the issuer's default point ``x_D = Phi^-1(pd)`` fixed, ``nu`` is
    pinned by ``exp(mu + sigma x_D) + exp(nu + tau x_D) = D`` and the EL
    equation leaves one strictly decreasing function of ``tau`` to invert.
    """
    bounds = feasibility_bounds(mu, sigma, d_issuer, issuer.pd)
    err = _infeasibility(bounds, issuer)
    if err is not None:
        raise err
    D, pd = d_issuer, issuer.pd
    xd = std_normal_inv_cdf(pd)
    rest = D - math.exp(mu + sigma * xd)
    cover_partial = math.exp(mu + 0.5 * sigma * sigma) * std_normal_cdf(xd - sigma)
    target = D * pd * (1.0 - issuer.lgd) - cover_partial
    log_target = math.log(target)
    log_rest = math.log(rest)

    def h(tau):
        # log(rest * exp(tau^2/2 - tau x_D) * Phi(x_D - tau) / target), written stably
        return log_rest + log_mills_ratio(tau - xd) - 0.5 * xd * xd - log_target

    # h(0) = log(rest * pd / target) > 0 inside the bounds; h -> -inf as tau grows.
    if not h(0.0) > 0:
        raise Infeasible("issuer LGD at the lower feasibility bound", constraint="lgd_lower", bounds=bounds)
    hi = expand_bracket(h, 0.0, 1.0, max_steps=2000)
    tau = bracketed_root(h, 0.0, hi)
    if not tau > 0:
        raise Infeasible("calibrated tau is not positive", constraint="lgd_lower", bounds=bounds)
    nu = log_rest - tau * xd
    return nu, tau


def calibrate_normal_toy(
    C: float,
    v: float,
    cover: RiskInputs,
    d_issuer: float,
    issuer: RiskInputs,
    rho: float,
) -> tuple[float, float, float, float, float]:
    """Closed-form jointly normal analogue: returns ``(mu, sigma, nu, tau, psi)``.

    ``psi`` is the implied standard deviation of total assets; a solution
    exists iff ``psi > sigma``.
    """
    a_c = std_normal_inv_cdf(cover.pd)
    k = (1.0 + v) * C
    sigma = k * cover.el / (cover.pd * a_c + std_normal_pdf(a_c))
    mu = k - sigma * a_c
    a_i = std_normal_inv_cdf(issuer.pd)
    psi = d_issuer * issuer.el / (issuer.pd * a_i + std_normal_pdf(a_i))
    if not psi > sigma:
        raise Infeasible(
            f"issuer volatility psi={psi} must exceed cover volatility sigma={sigma}",
            constraint="psi_gt_sigma",
        )
    nu = d_issuer - mu - psi * a_i
    tau = math.sqrt(psi * psi - (1.0 - rho * rho) * sigma * sigma) - sigma * rho
    if nu <= 0:
        warnings.warn(f"normal toy model has non-positive mean nu={nu} for the remaining assets")
    return mu, sigma, nu, tau, psi


def calibrate_issuer_copula(
    mu: float,
    sigma: float,
    rho: float,
    d_issuer: float,
    issuer: RiskInputs,
    initial: Optional[tuple[float, float]] = None,
) -> tuple[float, float]:
    """Solve the issuer PD and EL equations for ``(nu, tau)`` at ``rho < 1``.

    Existence is not guaranteed. The system is solved by Levenberg-Marquardt least
    squares in ``(nu, log tau)`` on relative residuals; failure to bring both
    below 1e-8 raises :class:`NoConvergence` with the best residual.
    """
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"copula calibration needs 0 <= rho < 1, got {rho}")
    D, pd = d_issuer, issuer.pd
    partial_target = D * pd * (1.0 - issuer.lgd)

    def residuals(z):
        try:
            nu, tau = z[0], math.exp(z[1])
            prm = TwoAssetParams(mu, sigma, nu, tau, rho)
            p_model = _issuer_moments(prm, D)[0]
            partial = issuer_default_partial_mean(prm, D)
        except (OverflowError, ValueError, NoConvergence, NoBracket):
            # outside the numerically representable region
            return np.array([_PENALTY, _PENALTY])
        return np.array([(p_model - pd) / pd, (partial - partial_target) / partial_target])

    if initial is None:
        initial = _copula_start(mu, sigma, D, issuer)
    best = None
    starts = [initial, (math.log(max(D - math.exp(mu), 0.05 * D)), sigma)]
    for nu0, tau0 in starts:
        try:
            sol = optimize.least_squares(
                residuals, x0=[nu0, math.log(tau0)], method="lm",
                xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=400,
            )
        except (NoConvergence, NoBracket, ValueError) as exc:
            log.debug("copula calibration start %s failed: %s", (nu0, tau0), exc)
            continue
        res = float(np.max(np.abs(sol.fun)))
        if best is None or res < best[0]:
            best = (res, sol.x)
        if res < COPULA_RESIDUAL_TOL:
            return float(sol.x[0]), float(math.exp(sol.x[1]))
    residual = best[0] if best else math.inf
    raise NoConvergence(
        f"no (nu, tau) reproduces issuer PD={pd}, LGD={issuer.lgd} at rho={rho}; "
        f"best relative residual {residual:.3g}",
        residual=residual,
    )


def _copula_start(mu, sigma, D, issuer) -> tuple[float, float]:
    try:
        return calibrate_issuer_comonotonic(mu, sigma, D, issuer)
    except Infeasible:
        pass
    # moment-match the normal toy's remaining-asset law as a rough start
    a_i = std_normal_inv_cdf(issuer.pd)
    psi = D * issuer.el / (issuer.pd * a_i + std_normal_pdf(a_i))
    tau = max(psi / max(D, 1e-12), 0.05)
    mean_y = max(D - math.exp(mu + 0.5 * sigma * sigma) - psi * a_i, 0.05 * D)
    return math.log(mean_y) - 0.5 * tau * tau, tau


def margins_calibrate(
    debt: DebtStructure, cover: RiskInputs, other: RiskInputs, rho: float
) -> TwoAssetParams:
    """Fit each pool to its own PD/EL: cover at ``(1+v) C``, the rest at ``S + U - v C``."""
    threshold = debt.other_threshold
    if not threshold > 0:
        raise Infeasible(
            f"remaining-asset threshold S+U-vC = {threshold} must be positive",
            constraint="other_threshold",
        )
    mu, sigma = calibrate_cover_pool(debt.C, debt.v, cover)
    nu, tau = calibrate_pool(threshold, other)
    return TwoAssetParams(mu, sigma, nu, tau, rho)
