"""Command-line pipeline: extract, describe, fitdist, km, fit, select, predict, report."""

import argparse
import hashlib
import json
import logging
import os
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .aft import (
    acceleration_factor,
    build_design_matrix,
    correlation_matrix,
    collinearity_screen,
    fit_aft,
    load_model,
    lr_test,
    make_spec,
    parse_formula,
    predict_interval,
    predict_mean,
    predict_median,
    predict_quantile,
    predict_survival_curve,
    stepwise_select,
    wald_summary,
)
from .aft.design import NUMERIC_COVARIATES
from .exceptions import NonConvergenceError, ParseError, YieldSurvError
from .ingest import load_geometry, parse_recording
from .scenario import ITYPES, ExtractionConfig, describe, extract_scenarios, format_scenarios, read_scenarios
from .survival import aft_diagnostic_points, fit_all, kaplan_meier, kde_density
from .survival.distributions import FAMILIES
from .utils.io import csv_text, write_outputs

logger = logging.getLogger("yieldsurv")

EXIT_OK, EXIT_INPUT, EXIT_EMPTY, EXIT_NONCONVERGENCE = 0, 2, 3, 4
DEFAULT_FORMULA = "srt ~ v_m + lv_i + lv_m + dav + mtype + itype"


class EmptyResult(YieldSurvError):
    pass


def _out(args, name):
    return os.path.join(args.out, name)


def _require_file(path, what):
    if path is None:
        raise ParseError(f"missing required input: {what}")
    if not os.path.isfile(path):
        raise ParseError(f"{what} not found: {path}")
    return path


def _scenarios(args):
    records = read_scenarios(_require_file(args.scenarios, "--scenarios"))
    if not records:
        raise EmptyResult(f"{args.scenarios}: scenario table has no rows")
    return records


def _frame_text(df, index_label):
    rows = [{index_label: idx, **row} for idx, row in zip(df.index, df.to_dict("records"))]
    return csv_text(rows, [index_label, *df.columns])


# --- commands ---------------------------------------------------------------

def cmd_extract(args):
    geometry = load_geometry(_require_file(args.geometry, "--geometry"))
    recording = parse_recording(
        _require_file(args.tracks, "--tracks"),
        _require_file(args.tracks_meta, "--tracks-meta"),
        _require_file(args.recording_meta, "--recording-meta"),
    )
    cfg = ExtractionConfig(
        approach_window_max=args.approach_window,
        min_drop=args.min_drop,
        vru_overlap_margin=args.vru_margin,
        turn_threshold=args.turn_threshold,
        arm_filter=args.arm,
    )
    records, exclusions = extract_scenarios(recording, geometry, cfg, return_exclusions=True)
    outputs = {
        _out(args, "scenarios.csv"): format_scenarios(records),
        _out(args, "exclusions.csv"): csv_text(
            [asdict(e) for e in exclusions], ["track_id", "reason", "message"]),
    }
    if not records:
        write_outputs({k: v for k, v in outputs.items() if k.endswith("exclusions.csv")})
        raise EmptyResult(f"no scenarios extracted ({len(exclusions)} tracks excluded)")
    return outputs


def cmd_describe(args):
    table = describe(_scenarios(args))
    return {_out(args, "describe.csv"): _frame_text(table, "itype")}


def cmd_fitdist(args):
    records = _scenarios(args)
    srt = np.array([r.srt for r in records])
    fits = fit_all(srt, families=args.families or FAMILIES)
    rows = []
    for f in fits:
        row = {"family": f.family, "logL": f.log_likelihood, "AIC": f.aic, "BIC": f.bic,
               "n": f.n}
        for j, (name, value) in enumerate(zip(f.param_names, f.params), start=1):
            row[f"param{j}_name"] = name
            row[f"param{j}"] = value
        rows.append(row)
    table = csv_text(rows, ["family", "param1_name", "param1", "param2_name", "param2",
                            "logL", "AIC", "BIC", "n"])

    density = []
    groups = [("all", srt)] + [
        (it, np.array([r.srt for r in records if r.itype == it])) for it in ITYPES
    ]
    for name, values in groups:
        if len(values) < 2 or np.ptp(values) == 0:
            continue
        grid, dens = kde_density(values)
        density += [{"group": f"kde:{name}", "x": x, "y": y} for x, y in zip(grid, dens)]
    grid = np.linspace(srt.min() * 0.5, srt.max() * 1.5, 512)
    for f in fits:
        density += [{"group": f"fit:{f.family}", "x": x, "y": y}
                    for x, y in zip(grid, f.pdf(grid))]
    return {
        _out(args, "fitdist.csv"): table,
        _out(args, "density.csv"): csv_text(density, ["group", "x", "y"]),
    }


def cmd_km(args):
    records = _scenarios(args)
    key = args.group_by
    outputs, diagnostics = {}, []
    levels = sorted({getattr(r, key) for r in records}) if key else ["all"]
    for level in levels:
        group = [r for r in records if key is None or getattr(r, key) == level]
        curve = kaplan_meier([r.srt for r in group])
        rows = [{"time": t, "survival": s, "at_risk": n, "events": d, "greenwood_var": v}
                for t, s, n, d, v in zip(curve.event_times, curve.survival, curve.at_risk,
                                         curve.events, curve.greenwood_var)]
        outputs[_out(args, f"km_{level}.csv")] = csv_text(
            rows, ["time", "survival", "at_risk", "events", "greenwood_var"])
        for family in ("loglogistic", "lognormal"):
            try:
                x, y = aft_diagnostic_points(curve, family)
            except YieldSurvError:
                continue
            diagnostics += [{"group": f"{family}:{level}", "x": a, "y": b} for a, b in zip(x, y)]
    outputs[_out(args, "km_diagnostics.csv")] = csv_text(diagnostics, ["group", "x", "y"])
    return outputs


def _summary_text(fit):
    return csv_text(wald_summary(fit), ["name", "coef", "std_error", "z", "p"])


def _fit_or_trace(args, design, family):
    try:
        return fit_aft(design, family, max_iter=args.max_iter)
    except NonConvergenceError as exc:
        trace_path = _out(args, "optimizer_trace.json")
        write_outputs({trace_path: json.dumps(exc.trace, indent=2) + "\n"})
        exc.trace_path = trace_path
        raise


def _model_outputs(args, fit, records, prefix):
    null_design = build_design_matrix(records, make_spec(()))
    null = fit_aft(null_design, fit.family, max_iter=args.max_iter)
    test = lr_test(fit, null)
    return {
        _out(args, f"{prefix}.json"): json.dumps(fit.to_dict(), indent=2) + "\n",
        _out(args, f"{prefix}_summary.csv"): _summary_text(fit),
        _out(args, f"{prefix}_lr_test.json"): json.dumps(
            {**test, "logL_model": fit.log_likelihood, "logL_null": null.log_likelihood},
            indent=2) + "\n",
    }


def cmd_fit(args):
    records = _scenarios(args)
    _, spec = parse_formula(args.formula)
    design = build_design_matrix(records, spec)
    fit = _fit_or_trace(args, design, args.family)
    return _model_outputs(args, fit, records, "model")


def cmd_select(args):
    records = _scenarios(args)
    _, spec = parse_formula(args.formula)
    numeric = list(NUMERIC_COVARIATES)
    corr = correlation_matrix(records, numeric)
    excluded = collinearity_screen(corr, args.collinearity_threshold)
    candidates = [t for t in spec.terms if t not in excluded]
    cand_spec = spec.subset(candidates)
    best, trace = stepwise_select(records, cand_spec, args.family, args.direction,
                                  max_iter=args.max_iter)
    corr_rows = [{"column": c, **{k: float(v) for k, v in corr.loc[c].items()}} for c in numeric]
    outputs = _model_outputs(args, best, records, "selected_model")
    outputs.update({
        _out(args, "selection_trace.csv"): csv_text(
            trace, ["step", "action", "term", "aic", "terms", "accepted"]),
        _out(args, "correlation.csv"): csv_text(corr_rows, ["column", *numeric]),
        _out(args, "collinearity.json"): json.dumps(
            {"threshold": args.collinearity_threshold, "excluded": excluded,
             "candidates": candidates, "selected": list(best.spec.terms)}, indent=2) + "\n",
    })
    return outputs


def _parse_profile(pairs, spec):
    profile = {}
    for item in pairs or ():
        if "=" not in item:
            raise ParseError(f"--set expects name=value, got {item!r}")
        name, value = (s.strip() for s in item.split("=", 1))
        if name in spec.numeric:
            profile[name] = float(value)
        elif name in {c.name for c in spec.categorical}:
            profile[name] = value
        else:
            raise ParseError(f"--set: {name!r} is not a model covariate")
    return profile


def _time_grid(spec_text, median):
    if spec_text:
        lo, hi, step = (float(v) for v in spec_text.split(":"))
        return np.arange(lo, hi + 0.5 * step, step)
    return np.linspace(median / 20.0, median * 3.0, 60)


def cmd_predict(args):
    fit = load_model(_require_file(args.model, "--model"))
    profile = _parse_profile(args.set, fit.spec)
    median = predict_median(fit, profile)
    lo, hi, meta = predict_interval(fit, profile, args.level)
    rows = [
        {"quantity": "median", "value": median},
        {"quantity": "mean", "value": predict_mean(fit, profile)},
        {"quantity": "median_ci_lo", "value": lo},
        {"quantity": "median_ci_hi", "value": hi},
        {"quantity": "linear_predictor", "value": fit.linear_predictor(profile)},
    ]
    for q in args.quantiles or ():
        rows.append({"quantity": f"quantile_{q:g}", "value": predict_quantile(fit, profile, q)})
    grid = _time_grid(args.times, median)
    curve = predict_survival_curve(fit, profile, grid)
    factors = [{"name": n, "gamma": acceleration_factor(fit, n),
                "inverse": 1.0 / acceleration_factor(fit, n)}
               for n in fit.columns if n != "Intercept"]
    info = {"profile": profile, "ci_method": meta["method"], "level": args.level,
            "family": fit.family, "convention": "aft-canonical"}
    return {
        _out(args, "prediction.csv"): csv_text(rows, ["quantity", "value"]),
        _out(args, "prediction.json"): json.dumps(info, indent=2, sort_keys=True) + "\n",
        _out(args, "survival_curve.csv"): csv_text(
            [{"time": t, "survival": s} for t, s in zip(grid, curve)], ["time", "survival"]),
        _out(args, "acceleration_factors.csv"): csv_text(factors, ["name", "gamma", "inverse"]),
    }


def cmd_report(args):
    if not os.path.isdir(args.out):
        raise ParseError(f"output directory not found: {args.out}")
    entries = []
    for name in sorted(os.listdir(args.out)):
        path = os.path.join(args.out, name)
        if name == "report.json" or name.startswith(".") or not os.path.isfile(path):
            continue
        with open(path, "rb") as fh:
            data = fh.read()
        entries.append({"file": name, "bytes": len(data),
                        "sha256": hashlib.sha256(data).hexdigest()})
    if not entries:
        raise EmptyResult(f"no artifacts in {args.out}")
    index = {"version": __version__, "seed": args.seed, "artifacts": entries}
    return {_out(args, "report.json"): json.dumps(index, indent=2) + "\n"}


COMMANDS = {
    "extract": cmd_extract,
    "describe": cmd_describe,
    "fitdist": cmd_fitdist,
    "km": cmd_km,
    "fit": cmd_fit,
    "select": cmd_select,
    "predict": cmd_predict,
    "report": cmd_report,
}


# --- argument handling ------------------------------------------------------

# defaults applied after config-file merging; flags > config > these
DEFAULTS = {
    "out": ".",
    "seed": 0,
    "family": "loglogistic",
    "formula": DEFAULT_FORMULA,
    "max_iter": 100,
    "approach_window": 60.0,
    "min_drop": 0.5,
    "vru_margin": 1.0,
    "turn_threshold": 45.0,
    "group_by": "itype",
    "direction": "both",
    "collinearity_threshold": 0.7,
    "level": 0.95,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of option defaults; flags override it")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int)
    common.add_argument("--family", choices=FAMILIES)
    common.add_argument("--formula")
    common.add_argument("--max-iter", type=int, dest="max_iter")
    common.add_argument("-v", "--verbose", action="store_true", default=None)

    parser = argparse.ArgumentParser(prog="yieldsurv", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", parents=[common], help="extract yielding scenarios")
    p.add_argument("--tracks")
    p.add_argument("--tracks-meta", dest="tracks_meta")
    p.add_argument("--recording-meta", dest="recording_meta")
    p.add_argument("--geometry")
    p.add_argument("--arm")
    p.add_argument("--approach-window", type=float, dest="approach_window")
    p.add_argument("--min-drop", type=float, dest="min_drop")
    p.add_argument("--vru-margin", type=float, dest="vru_margin")
    p.add_argument("--turn-threshold", type=float, dest="turn_threshold")

    for name, help_ in (("describe", "per-scenario means"),
                        ("fitdist", "rank candidate distributions by AIC"),
                        ("km", "Kaplan-Meier curves per group"),
                        ("fit", "fit an AFT regression"),
                        ("select", "stepwise AIC selection")):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--scenarios", help="scenario table CSV")
        if name == "fitdist":
            p.add_argument("--families", nargs="+", choices=FAMILIES)
        if name == "km":
            p.add_argument("--group-by", dest="group_by", choices=["itype", "mtype"])
        if name == "select":
            p.add_argument("--direction", choices=["forward", "backward", "both"])
            p.add_argument("--collinearity-threshold", type=float,
                           dest="collinearity_threshold")

    p = sub.add_parser("predict", parents=[common], help="predict from a model JSON")
    p.add_argument("--model")
    p.add_argument("--set", action="append", metavar="NAME=VALUE",
                   help="covariate value; unset numeric covariates are 0, factors at reference")
    p.add_argument("--level", type=float)
    p.add_argument("--quantiles", type=float, nargs="+")
    p.add_argument("--times", help="survival-curve grid as start:stop:step")

    sub.add_parser("report", parents=[common], help="index the artifacts in --out")
    return parser


def resolve_args(args):
    config = {}
    if getattr(args, "config", None):
        path = _require_file(args.config, "--config")
        with open(path) as fh:
            try:
                config = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}: invalid JSON ({exc})") from None
    for key, value in config.items():
        key = key.replace("-", "_")
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    for key, value in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    if args.family not in FAMILIES:
        raise ParseError(f"unknown family {args.family!r}")
    return args


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args = resolve_args(args)
        if args.command in ("fit", "select") and args.family == "gamma":
            raise ParseError("gamma is available for fitdist only, not AFT regression")
        outputs = COMMANDS[args.command](args)
        for path in write_outputs(outputs):
            logger.info("wrote %s", path)
    except EmptyResult as exc:
        print(f"yieldsurv {args.command}: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except NonConvergenceError as exc:
        where = getattr(exc, "trace_path", None)
        print(f"yieldsurv {args.command}: {exc}" + (f"; trace in {where}" if where else ""),
              file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (YieldSurvError, ValueError, KeyError, OSError) as exc:
        print(f"yieldsurv {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
