"""Command-line front end.

Exit codes: 0 success, 2 infeasible inputs or model error, 3 I/O error.
All inputs are fractions; tables render percentages with three decimals.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, is_dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np

from covbond import distfit
from covbond.distfit import MeanVarTarget, QuantileESTarget
from covbond.errors import CovBondError, Infeasible
from covbond.oracle import McConfig, mc_loss_report, mc_one_asset
from covbond.scenarios import (
    EXAMPLE_COVER_SETS,
    TABLES,
    Calibrated,
    ScenarioConfig,
    calibrate,
    feasibility_grid,
)
from covbond.two_assets import DebtStructure, LossReport, RiskInputs

EXIT_OK, EXIT_MODEL, EXIT_IO = 0, 2, 3


def _quantity(value: Optional[float]) -> dict:
    if value is None:
        return {"fraction": None, "percent": None}
    return {"fraction": value, "percent": 100.0 * value}


def report_json(report: LossReport) -> dict:
    return {k: _quantity(v) for k, v in report.to_dict().items()}


def _params_json(cal: Calibrated) -> dict:
    if is_dataclass(cal.params):
        out = asdict(cal.params)
    else:
        out = dict(zip(("mu", "sigma", "nu", "tau", "psi"), cal.params))
    out.update(cal.extra)
    # theta is -inf without covered bonds; JSON has no infinities
    return {k: _finite(v) if isinstance(v, float) else v for k, v in out.items()}


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    Path(out).write_text(text, encoding="utf-8", newline="\n")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(f"not serialisable: {o!r}")


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            if k == "percent":
                continue
            key = prefix if k == "fraction" else (f"{prefix}.{k}" if prefix else k)
            yield from _flatten(v, key)
    else:
        yield prefix, obj


def _csv_cell(v) -> str:
    if v is None:
        return "NA"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.15g}"
    return str(v)


def scenarios_csv(result: dict) -> str:
    """One row per scenario; nested fields become dotted column names."""
    rows = [dict(_flatten(entry)) for entry in result["scenarios"]]
    header = list(rows[0]) if rows else []
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_csv_cell(r.get(k)) for k in header])
    return buf.getvalue()


def _finite(x: float) -> Optional[float]:
    return x if math.isfinite(x) else None


# --- fit ---------------------------------------------------------------------


def _quantile_es_target(args) -> Optional[QuantileESTarget]:
    if args.pd is not None and (args.el is not None or args.lgd is not None):
        if args.q is None:
            raise ValueError("--q (default threshold) is required with --pd")
        el = args.el if args.el is not None else args.pd * args.lgd
        return QuantileESTarget.from_pd_el(args.pd, el, args.q)
    if args.alpha is not None and args.q is not None and args.t is not None:
        return QuantileESTarget(args.alpha, args.q, args.t)
    return None


def cmd_fit(args) -> dict:
    fam = args.family
    target = _quantile_es_target(args)
    if args.mean is not None and args.var is not None:
        mv = MeanVarTarget(args.mean, args.var)
        if fam == "normal":
            p = distfit.mv_fit_locscale(mv, 0.0, 1.0)
        elif fam == "locscale":
            if args.gen_mean is None or args.gen_var is None:
                raise ValueError("locscale mean-variance fit needs --gen-mean and --gen-var")
            p = distfit.mv_fit_locscale(mv, args.gen_mean, args.gen_var)
        elif fam == "lognormal":
            p = distfit.mv_fit_lognormal(mv)
            mean = math.exp(p.m + 0.5 * p.s ** 2)
            var = math.expm1(p.s ** 2) * math.exp(2 * p.m + p.s ** 2)
            return {"family": fam, "m": p.m, "s": p.s,
                    "residuals": {"mean": mean - mv.mu, "var": var - mv.sigma2}}
        elif fam == "vasicek":
            p = distfit.mv_fit_vasicek(mv)
            return {"family": fam, "m": p.m, "s": p.s, "location": p.location,
                    "residuals": {"mean": p.mean - mv.mu, "var": p.var - mv.sigma2}}
        else:
            p = distfit.mv_fit_beta(mv)
            return {"family": fam, "a": p.a, "b": p.b,
                    "residuals": {"mean": p.mean - mv.mu, "var": p.var - mv.sigma2}}
        return {"family": fam, "m": p.m, "s": p.s, "residuals": {"mean": 0.0, "var": 0.0}}

    if target is None:
        raise ValueError("give --alpha/--q/--t, --pd/--lgd|--el/--q, or --mean/--var")
    if fam == "lognormal":
        p = distfit.fit_lognormal_quantile_es(target)
        q_fit = distfit.lognormal_quantile(p, target.alpha)
        t_fit = distfit.lognormal_es(p, target.alpha)
    elif fam in ("normal", "locscale"):
        if fam == "normal":
            p = distfit.fit_normal_quantile_es(target)
            gq, ges = distfit.std_normal_inv_cdf(target.alpha), distfit.normal_es(target.alpha)
        else:
            if args.gen_q is None or args.gen_es is None:
                raise ValueError("locscale quantile-ES fit needs --gen-q and --gen-es")
            gq, ges = args.gen_q, args.gen_es
            p = distfit.fit_locscale_quantile_es(target, gq, ges)
        q_fit, t_fit = p.m + p.s * gq, p.m + p.s * ges
    else:
        raise ValueError(f"family {fam} supports mean-variance targets only")
    return {"family": fam, "alpha": target.alpha, "q": target.q, "t": target.t,
            "m": p.m, "s": p.s,
            "residuals": {"quantile": q_fit - target.q, "es": t_fit - target.t}}


# --- calibrate / el / mc -----------------------------------------------------------


def _load_config(args) -> ScenarioConfig:
    if args.config is None:
        raise ValueError("--config is required")
    try:
        cfg = ScenarioConfig.load(args.config)
    except OSError:
        raise
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed config: {exc}") from exc
    if getattr(args, "rho", None) is not None:
        cfg = replace(cfg, rho=args.rho)
    if getattr(args, "model", None) is not None:
        cfg = replace(cfg, model=args.model)
    return cfg


def _scenarios(cfg: ScenarioConfig, with_report: bool) -> list[dict]:
    out = []
    for idx, (value, sub) in enumerate(cfg.expand()):
        cal = calibrate(sub, with_report=with_report)
        entry = {"index": idx, "model": cal.model, "params": _params_json(cal)}
        if cfg.sweep is not None:
            entry["sweep"] = {"axis": cfg.sweep.axis, "value": value}
        if cal.report is not None:
            entry["report"] = report_json(cal.report)
        out.append((entry, sub, cal))
    return out


def cmd_calibrate(args) -> dict:
    cfg = _load_config(args)
    return {"scenarios": [e for e, _, _ in _scenarios(cfg, with_report=False)]}


def cmd_el(args) -> dict:
    cfg = _load_config(args)
    if cfg.model == "normal_toy":
        raise ValueError("normal_toy provides calibration only; use 'calibrate'")
    return {"scenarios": [e for e, _, _ in _scenarios(cfg, with_report=True)]}


def cmd_mc(args) -> dict:
    cfg = _load_config(args)
    if cfg.model == "normal_toy":
        raise ValueError("normal_toy has no Monte-Carlo loss report")
    mc_cfg = McConfig(n_samples=args.samples, seed=args.seed, chunk=min(args.samples, 1_000_000))
    out = []
    for entry, sub, cal in _scenarios(cfg, with_report=True):
        if cal.model == "one_asset_adjusted":
            mc = mc_one_asset(cal.params, sub.debt, mc_cfg)
        else:
            mc = mc_loss_report(cal.params, sub.debt, mc_cfg)
        verdicts = mc.compare(cal.report, k=3.0)
        entry["mc"] = {
            name: {
                "mean": _finite(est["mean"]),
                "std_error": _finite(est["std_error"]),
                "n": est["n"],
                "unit": "fraction",
                "verdict": "PASS" if verdicts[name] else "FAIL",
            }
            for name, est in mc.to_dict().items()
        }
        entry["verdict"] = "PASS" if all(verdicts.values()) else "FAIL"
        out.append(entry)
    return {"samples": args.samples, "seed": args.seed, "scenarios": out}


# --- region / table ------------------------------------------------------------


def _grid(spec) -> np.ndarray:
    lo, hi, n = float(spec[0]), float(spec[1]), int(spec[2])
    return np.linspace(lo, hi, n)


def cmd_region(args) -> str:
    if args.config is not None:
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
        debt = DebtStructure(**{k: float(v) for k, v in data["debt"].items()})
        sets = [RiskInputs(float(c["pd"]), float(c["lgd"])) for c in data.get("cover_sets", [])]
    else:
        debt = DebtStructure(0.3, 0.6, 0.1, 0.2)
        sets = []
    if args.cover:
        sets = [RiskInputs(float(pd), float(lgd)) for pd, lgd in args.cover]
    if not sets:
        sets = list(EXAMPLE_COVER_SETS)
    if args.point:
        cells = []
        for pd, lgd in args.point:
            cells += feasibility_grid(debt, sets, [float(pd)], [float(lgd)])
    else:
        cells = feasibility_grid(debt, sets, _grid(args.pd_range), _grid(args.lgd_range))
    if len(sets) == 2:
        names = ["feasible_small_set", "feasible_large_set"]
    else:
        names = [f"feasible_set{i + 1}" for i in range(len(sets))]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["pd", "lgd", *names])
    for pd, lgd, flags in cells:
        w.writerow([f"{pd:.15g}", f"{lgd:.15g}", *("true" if f else "false" for f in flags)])
    return buf.getvalue()


def cmd_table(args):
    table = TABLES[args.id]()
    if args.format == "json":
        return _dump(table.to_dict())
    if args.out is not None:
        out = Path(args.out)
        raw_path = out.with_name(out.stem + "_raw" + (out.suffix or ".csv"))
        raw_path.write_text(table.to_csv(raw=True), encoding="utf-8", newline="\n")
    return table.to_csv()


# --- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="covbond", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", help="scenario JSON file")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"), default=None)

    p = sub.add_parser("fit", help="fit a two-parameter distribution")
    common(p, config=False)
    p.add_argument("--family", required=True,
                   choices=("normal", "lognormal", "locscale", "vasicek", "beta"))
    for name in ("alpha", "q", "t", "pd", "lgd", "el", "mean", "var",
                 "gen-q", "gen-es", "gen-mean", "gen-var"):
        p.add_argument(f"--{name}", type=float)

    for name, helptext in (("calibrate", "calibrate model parameters"),
                           ("el", "expected-loss report")):
        p = sub.add_parser(name, help=helptext)
        common(p)
        p.add_argument("--rho", type=float)
        p.add_argument("--model")

    p = sub.add_parser("mc", help="Monte-Carlo validation against the closed forms")
    common(p)
    p.add_argument("--rho", type=float)
    p.add_argument("--model")
    p.add_argument("--samples", type=int, default=10_000_000)
    p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("region", help="issuer PD/LGD feasibility grid (comonotonic model)")
    common(p)
    p.add_argument("--cover", nargs=2, action="append", metavar=("PD", "LGD"))
    p.add_argument("--pd-range", nargs=3, default=("0.0005", "0.025", "50"), metavar=("LO", "HI", "N"))
    p.add_argument("--lgd-range", nargs=3, default=("0.01", "0.99", "50"), metavar=("LO", "HI", "N"))
    p.add_argument("--point", nargs=2, action="append", metavar=("PD", "LGD"))

    p = sub.add_parser("table", help="reproduce a numerical study table")
    common(p, config=False)
    p.add_argument("id", type=int, choices=sorted(TABLES))
    return parser


COMMANDS = {
    "fit": cmd_fit,
    "calibrate": cmd_calibrate,
    "el": cmd_el,
    "mc": cmd_mc,
    "region": cmd_region,
    "table": cmd_table,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = COMMANDS[args.command](args)
        if isinstance(result, str):
            text = result
        elif args.format == "csv" and "scenarios" in result:
            text = scenarios_csv(result)
        elif args.format == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            flat = dict(_flatten(result))
            w.writerow(list(flat))
            w.writerow([_csv_cell(v) for v in flat.values()])
            text = buf.getvalue()
        else:
            text = _dump(result)
        _emit(text, args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Infeasible as exc:
        detail = {"error": str(exc), "constraint": exc.constraint}
        if exc.bounds is not None:
            detail["bounds"] = {k: _finite(v) for k, v in asdict(exc.bounds).items()}
        print(json.dumps(detail), file=sys.stderr)
        return EXIT_MODEL
    except (CovBondError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
