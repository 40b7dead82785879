"""Monte-Carlo validation of the closed and semi-closed loss formulas.

Draws are generated in fixed-size chunks; chunk ``i`` uses its own Philox
stream keyed by ``(seed, i)``, so results do not depend on how chunks are
scheduled across workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from covbond.one_asset import OneAssetParams
from covbond.two_assets import DebtStructure, LossReport, TwoAssetParams, waterfall_losses

QUANTITIES = ("p_event1", "p_event2", "p_event3", "el_covered", "el_senior", "el_junior", "el_portfolio")


@dataclass(frozen=True)
class McConfig:
    n_samples: int = 10_000_000
    seed: int = 42
    chunk: int = 1_000_000
    workers: int = 1

    def __post_init__(self):
        if self.n_samples < 1 or self.chunk < 1 or self.workers < 1:
            raise ValueError(f"invalid Monte-Carlo configuration: {self}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n: int

    def within(self, value: Optional[float], k: float = 3.0) -> bool:
        if value is None:
            return math.isnan(self.mean)
        return abs(value - self.mean) <= k * self.std_error


@dataclass(frozen=True)
class McLossReport:
    p_event1: McEstimate
    p_event2: McEstimate
    p_event3: McEstimate
    el_covered: McEstimate
    el_senior: McEstimate
    el_junior: McEstimate
    el_portfolio: McEstimate

    def to_dict(self) -> dict:
        return {f.name: {"mean": getattr(self, f.name).mean,
                         "std_error": getattr(self, f.name).std_error,
                         "n": getattr(self, f.name).n} for f in fields(self)}

    def compare(self, closed: LossReport, k: float = 3.0) -> dict[str, bool]:
        """Per-quantity verdict: closed form within ``k`` standard errors."""
        return {name: getattr(self, name).within(getattr(closed, name), k) for name in QUANTITIES}


def _chunk_sizes(cfg: McConfig) -> list[int]:
    full, rest = divmod(cfg.n_samples, cfg.chunk)
    return [cfg.chunk] * full + ([rest] if rest else [])


def _rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def _chunk_stats(x: np.ndarray, y: np.ndarray, debt: DebtStructure) -> np.ndarray:
    """Per-quantity (count, mean, M2) for one chunk; rows follow QUANTITIES."""
    l_c, l_s, l_u = waterfall_losses(x, y, debt)
    z = x + y
    default = z < debt.total
    senior_hit = default & (z < debt.senior)
    ev1 = default & ~senior_hit
    ev2 = senior_hit & (x >= debt.C)
    ev3 = senior_hit & (x < debt.C)
    portfolio = (debt.C * l_c + debt.S * l_s + debt.U * l_u) / debt.total
    cols = [ev1.astype(float), ev2.astype(float), ev3.astype(float), l_c, l_s, l_u, portfolio]
    n = x.size
    out = np.empty((len(cols), 3))
    for i, c in enumerate(cols):
        m = c.mean()
        out[i] = (n, m, float(np.sum((c - m) ** 2)))
    return out


def _combine(stats: list[np.ndarray]) -> np.ndarray:
    # Chan et al. pairwise update, applied in chunk order.
    acc = stats[0].copy()
    for s in stats[1:]:
        n_a, n_b = acc[:, 0], s[:, 0]
        n = n_a + n_b
        delta = s[:, 1] - acc[:, 1]
        acc[:, 1] = acc[:, 1] + delta * n_b / n
        acc[:, 2] = acc[:, 2] + s[:, 2] + delta ** 2 * n_a * n_b / n
        acc[:, 0] = n
    return acc


def _run(cfg: McConfig, draw) -> np.ndarray:
    sizes = _chunk_sizes(cfg)
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            stats = list(pool.map(draw, range(len(sizes)), sizes))
    else:
        stats = [draw(i, n) for i, n in enumerate(sizes)]
    return _combine(stats)


def _to_report(acc: np.ndarray, debt: DebtStructure) -> McLossReport:
    absent = {"el_covered": debt.C == 0, "el_senior": debt.S == 0, "el_junior": debt.U == 0}
    est = {}
    for i, name in enumerate(QUANTITIES):
        n, mean, m2 = acc[i]
        if absent.get(name):
            est[name] = McEstimate(math.nan, math.nan, int(n))
            continue
        var = m2 / (n - 1) if n > 1 else 0.0
        est[name] = McEstimate(float(mean), float(math.sqrt(var / n)), int(n))
    return McLossReport(**est)


def mc_loss_report(params: TwoAssetParams, debt: DebtStructure, cfg: McConfig = McConfig()) -> McLossReport:
    """Simulate the two-asset model; ``rho = 1`` uses a single normal per draw."""
    rho = params.rho
    single = rho >= 1.0
    resid = math.sqrt(max(0.0, (1.0 - rho) * (1.0 + rho)))

    def draw(index, n):
        rng = _rng(cfg.seed, index)
        xi = rng.standard_normal(n)
        if single:
            eta = xi
        else:
            eta = rho * xi + resid * rng.standard_normal(n)
        x = np.exp(params.mu + params.sigma * xi)
        y = np.exp(params.nu + params.tau * eta)
        return _chunk_stats(x, y, debt)

    return _to_report(_run(cfg, draw), debt)


def mc_one_asset(params: OneAssetParams, debt: DebtStructure, cfg: McConfig = McConfig()) -> McLossReport:
    """Simulate ``A = exp(kappa + psi xi)`` split into ``eps A`` and ``(1 - eps) A``."""

    def draw(index, n):
        rng = _rng(cfg.seed, index)
        a = np.exp(params.kappa + params.psi * rng.standard_normal(n))
        return _chunk_stats(params.epsilon * a, (1.0 - params.epsilon) * a, debt)

    return _to_report(_run(cfg, draw), debt)
