"""Scenario configuration and the numerical study tables.

A :class:`ScenarioConfig` is the JSON-serialisable description consumed by
the CLI. :func:`table1`, :func:`table2` and :func:`table3` rebuild the
correlation, encumbrance and model-comparison studies as
:class:`ResultTable` objects.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence, Union

from covbond.errors import Infeasible
from covbond.one_asset import OneAssetParams, adjusted_one_asset, expected_losses_one
from covbond.two_assets import (
    DebtStructure,
    LossReport,
    RiskInputs,
    TwoAssetParams,
    calibrate_cover_pool,
    calibrate_issuer_comonotonic,
    calibrate_issuer_copula,
    calibrate_normal_toy,
    expected_losses,
    feasibility_bounds,
    margins_calibrate,
)

MODELS = ("two_assets_margins", "two_assets_issuer", "one_asset_adjusted", "normal_toy")
SWEEP_AXES = ("rho", "C", "lgd_cover")

# Inputs of the three numerical studies.
STUDY_DEBT = DebtStructure(C=0.3, S=0.6, U=0.1, v=0.2)
STUDY_RISK = RiskInputs(pd=0.01, lgd=0.45)
TABLE1_RHOS = (0.0, 0.3, 0.6, 0.9, 1.0)
TABLE2_CS = tuple(i / 10 for i in range(9))
TABLE2_EL_COVER = 0.0045
TABLE3_LGDS = (0.30, 0.45, 0.60)
TABLE3_EL_COVER = 0.003


@dataclass(frozen=True)
class Sweep:
    axis: str
    values: tuple[float, ...]

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ValueError(f"sweep axis must be one of {SWEEP_AXES}, got {self.axis!r}")


@dataclass(frozen=True)
class ScenarioConfig:
    debt: DebtStructure
    model: str = "two_assets_margins"
    cover: Optional[RiskInputs] = None
    other: Optional[RiskInputs] = None
    issuer: Optional[RiskInputs] = None
    rho: float = 1.0
    el_cover: Optional[float] = None
    sweep: Optional[Sweep] = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        needs = {
            "two_assets_margins": ("cover", "other"),
            "two_assets_issuer": ("cover", "issuer"),
            "one_asset_adjusted": ("issuer",),
            "normal_toy": ("cover", "issuer"),
        }[self.model]
        missing = [n for n in needs if getattr(self, n) is None]
        if missing:
            raise ValueError(f"model {self.model} needs {', '.join(missing)}")
        if self.model == "one_asset_adjusted" and self.cover_el is None:
            raise ValueError("model one_asset_adjusted needs el_cover or cover")

    @property
    def cover_el(self) -> Optional[float]:
        if self.el_cover is not None:
            return self.el_cover
        return self.cover.el if self.cover is not None else None

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        def risk(key):
            d = data.get(key)
            if d is None:
                return None
            if "lgd" in d:
                return RiskInputs(pd=float(d["pd"]), lgd=float(d["lgd"]))
            return RiskInputs.from_pd_el(float(d["pd"]), float(d["el"]))

        sweep = data.get("sweep")
        return cls(
            debt=DebtStructure(**{k: float(v) for k, v in data["debt"].items()}),
            model=data.get("model", "two_assets_margins"),
            cover=risk("cover"),
            other=risk("other"),
            issuer=risk("issuer"),
            rho=float(data.get("rho", 1.0)),
            el_cover=None if data.get("el_cover") is None else float(data["el_cover"]),
            sweep=None if sweep is None else Sweep(sweep["axis"], tuple(float(v) for v in sweep["values"])),
        )

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ScenarioConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def expand(self) -> list[tuple[Optional[float], "ScenarioConfig"]]:
        """Concrete scenarios, one per sweep value, in sweep order."""
        if self.sweep is None:
            return [(None, self)]
        out = []
        for value in self.sweep.values:
            base = replace(self, sweep=None)
            if self.sweep.axis == "rho":
                cfg = replace(base, rho=value)
            elif self.sweep.axis == "C":
                d = self.debt
                cfg = replace(base, debt=DebtStructure(value, d.senior - value, d.U, d.v))
            else:
                el = self.cover_el
                cfg = replace(base, cover=RiskInputs(pd=el / value, lgd=value), el_cover=el)
            out.append((value, cfg))
        return out


@dataclass(frozen=True)
class Calibrated:
    """A calibrated scenario: which model, its parameters and its loss report."""

    model: str
    params: Union[TwoAssetParams, OneAssetParams, tuple]
    report: Optional[LossReport]
    extra: dict = field(default_factory=dict)


def calibrate(cfg: ScenarioConfig, with_report: bool = True) -> Calibrated:
    debt = cfg.debt
    if cfg.model == "two_assets_margins":
        params = margins_calibrate(debt, cfg.cover, cfg.other, cfg.rho)
        return Calibrated(cfg.model, params, expected_losses(params, debt) if with_report else None)
    if cfg.model == "two_assets_issuer":
        mu, sigma = calibrate_cover_pool(debt.C, debt.v, cfg.cover)
        if cfg.rho >= 1.0:
            nu, tau = calibrate_issuer_comonotonic(mu, sigma, debt.total, cfg.issuer)
        else:
            nu, tau = calibrate_issuer_copula(mu, sigma, cfg.rho, debt.total, cfg.issuer)
        params = TwoAssetParams(mu, sigma, nu, tau, cfg.rho)
        return Calibrated(cfg.model, params, expected_losses(params, debt) if with_report else None)
    if cfg.model == "one_asset_adjusted":
        params, adj = adjusted_one_asset(debt, cfg.issuer, cfg.cover_el)
        extra = {"theta": adj.theta, "epsilon_raw": adj.epsilon_raw, "capped": adj.capped}
        return Calibrated(cfg.model, params, expected_losses_one(params, debt) if with_report else None, extra)
    mu, sigma, nu, tau, psi = calibrate_normal_toy(
        debt.C, debt.v, cfg.cover, debt.total, cfg.issuer, cfg.rho
    )
    if not tau > 0:
        raise Infeasible(f"normal toy tau={tau} not positive", constraint="psi_gt_sigma")
    return Calibrated(cfg.model, (mu, sigma, nu, tau, psi), None, {"psi": psi})


# --- tables -------------------------------------------------------------------


@dataclass(frozen=True)
class ResultTable:
    """Rows of raw fractions rendered as percentages with three decimals."""

    title: str
    header: tuple[str, ...]
    rows: tuple[tuple[str, tuple[Optional[float], ...]], ...]

    def row(self, label: str) -> tuple[Optional[float], ...]:
        for name, values in self.rows:
            if name == label:
                return values
        raise KeyError(label)

    def rendered(self) -> list[list[str]]:
        out = [list(self.header)]
        for name, values in self.rows:
            out.append([name] + ["NA" if v is None else f"{100.0 * v:.3f}" for v in values])
        return out

    def raw(self) -> list[list[str]]:
        out = [list(self.header)]
        for name, values in self.rows:
            out.append([name] + ["NA" if v is None else f"{v:.15g}" for v in values])
        return out

    def to_csv(self, raw: bool = False) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerows(self.raw() if raw else self.rendered())
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "unit": "fraction",
            "header": list(self.header),
            "rows": {name: list(values) for name, values in self.rows},
        }


def _pct_labels(values: Sequence[float]) -> tuple[str, ...]:
    return tuple(f"{100.0 * v:.1f}" for v in values)


def table1(rhos: Sequence[float] = TABLE1_RHOS) -> ResultTable:
    """Margins-calibrated two-asset model across correlations."""
    reports = [expected_losses(margins_calibrate(STUDY_DEBT, STUDY_RISK, STUDY_RISK, r), STUDY_DEBT)
               for r in rhos]
    return ResultTable(
        title="Expected loss (% of exposure) by correlation",
        header=("Correlation rho", *_pct_labels(rhos)),
        rows=(
            ("Covered bonds EL", tuple(r.el_covered for r in reports)),
            ("Senior unsecured EL", tuple(r.el_senior for r in reports)),
            ("Junior EL", tuple(r.el_junior for r in reports)),
            ("All EL", tuple(r.el_portfolio for r in reports)),
        ),
    )


def table2_debt(C: float) -> DebtStructure:
    return DebtStructure(C=C, S=0.9 - C, U=0.1, v=0.2)


def table2(cs: Sequence[float] = TABLE2_CS) -> ResultTable:
    """Adjusted one-asset model across covered-bond exposures."""
    eps, reports = [], []
    for c in cs:
        debt = table2_debt(c)
        params, _ = adjusted_one_asset(debt, STUDY_RISK, TABLE2_EL_COVER)
        eps.append(params.epsilon)
        reports.append(expected_losses_one(params, debt))
    return ResultTable(
        title="Expected loss (% of exposure) by covered bonds exposure",
        header=("Covered bonds exposure C", *_pct_labels(cs)),
        rows=(
            ("Adjusted encumbrance ratio", tuple(eps)),
            ("Covered bonds EL", tuple(r.el_covered for r in reports)),
            ("Senior unsecured EL", tuple(r.el_senior for r in reports)),
            ("Junior EL", tuple(r.el_junior for r in reports)),
        ),
    )


@dataclass(frozen=True)
class ModelComparison:
    lgd_cover: float
    cover: RiskInputs
    two_asset: TwoAssetParams
    two_asset_report: LossReport
    issuer: RiskInputs
    one_asset: OneAssetParams
    one_asset_report: LossReport
    capped: bool


def compare_models(lgd_cover: float, el_cover: float = TABLE3_EL_COVER) -> ModelComparison:
    """Comonotonic margins-calibrated model vs the adjusted one-asset model fed
    with the issuer PD/EL the two-asset model implies."""
    debt = STUDY_DEBT
    cover = RiskInputs(pd=el_cover / lgd_cover, lgd=lgd_cover)
    two = margins_calibrate(debt, cover, STUDY_RISK, 1.0)
    rep2 = expected_losses(two, debt)
    issuer = RiskInputs.from_pd_el(rep2.issuer_pd, rep2.el_portfolio)
    one, adj = adjusted_one_asset(debt, issuer, el_cover)
    return ModelComparison(lgd_cover, cover, two, rep2, issuer, one, expected_losses_one(one, debt), adj.capped)


def table3(lgds: Sequence[float] = TABLE3_LGDS) -> ResultTable:
    comps = [compare_models(l) for l in lgds]
    header = ["LGD_cover"]
    for l in lgds:
        header += [f"{100 * l:.0f} 2 assets", f"{100 * l:.0f} 1 asset"]

    def both(fn):
        return tuple(v for c in comps for v in (fn(c), fn(c)))

    def pair(fn2, fn1):
        return tuple(v for c in comps for v in (fn2(c), fn1(c)))

    return ResultTable(
        title="Margins-calibrated two-asset vs adjusted one-asset model (%)",
        header=tuple(header),
        rows=(
            ("p_cover", both(lambda c: c.cover.pd)),
            ("p_issuer", both(lambda c: c.issuer.pd)),
            ("EL_issuer", both(lambda c: c.issuer.el)),
            ("Covered bonds EL", pair(lambda c: c.two_asset_report.el_covered, lambda c: c.one_asset_report.el_covered)),
            ("Senior unsecured EL", pair(lambda c: c.two_asset_report.el_senior, lambda c: c.one_asset_report.el_senior)),
            ("Junior EL", pair(lambda c: c.two_asset_report.el_junior, lambda c: c.one_asset_report.el_junior)),
        ),
    )


TABLES = {1: table1, 2: table2, 3: table3}


# --- feasibility region ------------------------------------------------------

EXAMPLE_COVER_SETS = (RiskInputs(pd=0.0005, lgd=0.30), RiskInputs(pd=0.005, lgd=0.50))


def feasibility_grid(
    debt: DebtStructure,
    cover_sets: Sequence[RiskInputs],
    pds: Sequence[float],
    lgds: Sequence[float],
) -> list[tuple[float, float, tuple[bool, ...]]]:
    """Issuer ``(pd, lgd)`` cells and, per cover set, whether a comonotonic
    two-asset model can reproduce them."""
    pools = [calibrate_cover_pool(debt.C, debt.v, c) for c in cover_sets]
    out = []
    for pd in pds:
        bounds = [feasibility_bounds(mu, sigma, debt.total, pd) for mu, sigma in pools]
        for lgd in lgds:
            out.append((pd, lgd, tuple(b.contains(pd, lgd) for b in bounds)))
    return out
