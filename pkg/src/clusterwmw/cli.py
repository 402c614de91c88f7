"""Command line entry point: ``clusterwmw analyze | simulate | theory``.

Exit codes: 0 success, 2 malformed input or configuration, 3 negative or
degenerate variance, 4 no comparisons possible.
"""

from __future__ import annotations

import argparse
import json
import sys

from .dataset import read_csv
from .errors import (ClusterWMWError, DataError, DegenerateResampleError,
                     DegenerateVarianceError, NegativeVarianceError, NoComparisonsError,
                     NotPositiveDefiniteError)
from .estimators import EffectEstimate, p_tilde
from .inference import METHODS, default_resamples, run_method
from .simulation import (ScenarioConfig, mc_effect_oracle, run_experiment,
                         theoretical_effects, write_report)

DEFAULT_SEED = 20240101
RANDOMIZED = ("hat", "hat-star", "hoffman")

EXIT_OK, EXIT_INPUT, EXIT_VARIANCE, EXIT_NO_COMPARISONS = 0, 2, 3, 4


def _emit(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")


def _fail(code: int, message: str) -> int:
    sys.stderr.write(f"clusterwmw: {message}\n")
    return code


def analyze_document(ds, method: str, alpha: float = 0.05, resamples=None,
                     seed: int = DEFAULT_SEED) -> dict:
    """JSON-ready analysis result; raises the library errors unchanged."""
    if resamples is None:
        resamples = default_resamples(method)
    res = run_method(ds, method, alpha, resamples, seed)
    doc = {"method": method}
    warnings = []
    if isinstance(res, EffectEstimate):
        doc["estimate"] = res.value
        doc["alpha"] = alpha
        doc["warnings"] = warnings
        return doc
    var = res.variance
    doc.update(estimate=res.estimate.value, variance=var.value, statistic=res.statistic,
               reference=res.reference.value)
    if res.df is not None:
        doc["df"] = res.df
    doc.update(p_value=res.p_value, ci_lower=res.ci_lower, ci_upper=res.ci_upper, alpha=alpha)
    if method in RANDOMIZED:
        discarded = res.estimate.resamples_discarded
        used = res.estimate.resamples_used
        if method == "hoffman":
            used, discarded = var.resamples_used, var.resamples_discarded
        elif method == "hat":
            discarded = max(discarded, var.resamples_discarded)
        doc.update(seed=seed, resamples_used=used, resamples_discarded=discarded)
        if discarded:
            what = "retries before a usable resample" if method == "hat-star" else \
                "resamples discarded as degenerate"
            warnings.append(f"{discarded} {what}")
    doc["warnings"] = warnings
    return doc


def _point(ds, method: str) -> str:
    try:
        if method in ("hat", "hat-star"):
            return "unavailable"
        return repr(p_tilde(ds).value)
    except ClusterWMWError:
        return "unavailable"


def cmd_analyze(args) -> int:
    if not 0 < args.alpha < 1:
        return _fail(EXIT_INPUT, "alpha must lie in (0, 1)")
    if args.resamples is not None and args.resamples < 1:
        return _fail(EXIT_INPUT, "resamples must be at least 1")
    try:
        ds = read_csv(args.input)
        doc = analyze_document(ds, args.method, args.alpha, args.resamples, args.seed)
    except DataError as exc:
        return _fail(EXIT_INPUT, f"malformed input: {exc}")
    except (NegativeVarianceError, DegenerateVarianceError, DegenerateResampleError) as exc:
        return _fail(EXIT_VARIANCE, f"{exc} (point estimate {_point(ds, args.method)})")
    except NoComparisonsError as exc:
        return _fail(EXIT_NO_COMPARISONS, str(exc))
    _emit(doc)
    return EXIT_OK


def cmd_simulate(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    bad = [m for m in methods if m not in METHODS]
    if bad or not methods:
        return _fail(EXIT_INPUT, f"unknown method(s): {', '.join(bad) or '(none)'}")
    if args.reps < 1 or args.jobs < 1:
        return _fail(EXIT_INPUT, "--reps and --jobs must be positive")
    try:
        cfg = ScenarioConfig.read(args.config)
        seed = cfg.seed if args.seed is None else args.seed
        report = run_experiment(cfg, methods, args.reps, seed, jobs=args.jobs,
                                include_p0=args.include_p0)
    except (OSError, ValueError, NotPositiveDefiniteError) as exc:
        return _fail(EXIT_INPUT, f"invalid configuration: {exc}")
    csv_path, json_path = write_report(report, args.out)
    _emit({"seed": report.master_seed, "replications": report.replications,
           "csv": str(csv_path), "json": str(json_path),
           "methods": report.as_dict()["methods"]})
    return EXIT_OK


def cmd_theory(args) -> int:
    if args.c1 < 1 or args.c2 < 1:
        return _fail(EXIT_INPUT, "c1 and c2 must be positive integers")
    eff = theoretical_effects(args.c1, args.c2)
    doc = {"c1": args.c1, "c2": args.c2, "p": eff.p, "p0": eff.p0, "mu_d": eff.mu_d}
    if args.oracle_draws:
        if args.oracle_draws < 10**5:
            return _fail(EXIT_INPUT, "--oracle-draws must be at least 100000")
        orc = mc_effect_oracle(args.c1, args.c2, args.oracle_draws, args.seed)
        doc.update(p_mc=orc.p_mc, p0_mc=orc.p0_mc, se={"p": orc.se_p, "p0": orc.se_p0},
                   seed=args.seed)
    _emit(doc)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clusterwmw",
        description="WMW effect estimation and tests for clustered data with "
                    "informative cluster size.")
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="analyse a cluster,group,value CSV file")
    pa.add_argument("input")
    pa.add_argument("--method", choices=METHODS, default="tilde-t")
    pa.add_argument("--alpha", type=float, default=0.05)
    pa.add_argument("--resamples", type=int, default=None,
                    help="resamples for hat (default 10000) or hoffman (default 1000)")
    pa.add_argument("--seed", type=int, default=DEFAULT_SEED)
    pa.set_defaults(func=cmd_analyze)

    ps = sub.add_parser("simulate", help="run a simulation study from a scenario file")
    ps.add_argument("config")
    ps.add_argument("--reps", type=int, default=1000)
    ps.add_argument("--out", default="report")
    ps.add_argument("--methods", default="tilde-t",
                    help="comma-separated list from: " + ", ".join(METHODS))
    ps.add_argument("--jobs", type=int, default=1)
    ps.add_argument("--seed", type=int, default=None, help="overrides the seed in the file")
    ps.add_argument("--include-p0", action="store_true",
                    help="also report coverage of the observation-weighted effect")
    ps.set_defaults(func=cmd_simulate)

    pt = sub.add_parser("theory", help="closed-form effects of the size-informative design")
    pt.add_argument("--c1", type=int, required=True)
    pt.add_argument("--c2", type=int, required=True)
    pt.add_argument("--oracle-draws", type=int, default=0)
    pt.add_argument("--seed", type=int, default=DEFAULT_SEED)
    pt.set_defaults(func=cmd_theory)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ClusterWMWError as exc:  # anything not mapped above
        return _fail(EXIT_INPUT, str(exc))


if __name__ == "__main__":
    sys.exit(main())
