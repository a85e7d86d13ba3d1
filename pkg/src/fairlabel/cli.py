"""Command-line entry point: ``fairlabel <subcommand> ...``.

Failures print one JSON line ``{"error": <type>, "message": <text>}`` to
stderr and exit nonzero (2 for invalid input, 1 for I/O problems).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__, harness, ingest
from .classify import ClassifierSpec
from .data import Direction, Flip, FlipLog, Group, read_csv, write_csv
from .debias import METHODS, DebiasConfig, FixedThreshold, TuneToUnitDIR
from .errors import FairLabelError
from .metrics import cfr, disparate_impact_difference, disparate_impact_ratio, f1, mfr, miss_rate
from .synth import FAMILIES, BiasSpec, assign_protected, generate, generate_linear, inject_bias

METRICS = ("cfr", "miss_rate", "mfr", "dir", "did", "f1")


def _write_json(obj, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, sort_keys=True, indent=1, allow_nan=False) + "\n")


# -- subcommands -------------------------------------------------------------

def cmd_generate(args) -> None:
    params = {"n_samples": args.n, "n_features": args.n_features, "seed": args.seed}
    if args.family == "linear":
        params["p_noise"] = args.p_noise
    elif args.p_noise:
        raise FairLabelError("--p-noise applies only to the linear family")
    if args.family == "linear":
        ds, coef = generate_linear(FAMILIES["linear"](**params))
        if args.coef_out:
            _write_json({"coef": coef.coef.tolist(), "intercept": coef.intercept}, args.coef_out)
    else:
        if args.family == "hypercube" and args.n_features < 8:
            params["n_informative"] = args.n_features
        ds = generate(args.family, **params)
    if args.minority_fraction is not None:
        ds = assign_protected(ds, args.minority_fraction, args.seed)
    write_csv(ds, args.out)


def cmd_inject_bias(args) -> None:
    ds = read_csv(args.input)
    spec = BiasSpec(Group.parse(args.group), Direction(args.direction), args.severity, args.seed)
    biased, log = inject_bias(ds, spec)
    write_csv(biased, args.out)
    log.save(args.log)


def _debias_config(args) -> DebiasConfig:
    if args.threshold == "tune":
        threshold = TuneToUnitDIR()
    else:
        try:
            threshold = FixedThreshold(float(args.threshold))
        except ValueError:
            raise FairLabelError(f"--threshold must be a number or 'tune', got {args.threshold!r}") from None
    return DebiasConfig(
        classifier=ClassifierSpec(kind=args.classifier),
        threshold=threshold,
        run_fairmaj=args.method == "fairlabel" and not args.min_only,
        seed=args.seed,
    )


def cmd_debias(args) -> None:
    ds = read_csv(args.input)
    out, report = METHODS[args.method](ds, _debias_config(args))
    write_csv(out, args.out)
    if args.report:
        report.save(args.report)
    if args.flips:
        report.proposed_flips.save(args.flips)


def _proposed_log(path) -> FlipLog:
    """Accept either a bare flip list or a debias report holding one."""
    raw = json.loads(Path(path).read_text())
    if isinstance(raw, dict):
        raw = raw["flips"]
    return FlipLog(tuple(Flip.from_dict(d) for d in raw), str(path))


def cmd_evaluate(args) -> None:
    wanted = [m.strip() for m in args.metrics.split(",") if m.strip()]
    unknown = set(wanted) - set(METRICS)
    if unknown:
        raise FairLabelError(f"unknown metrics {sorted(unknown)}; choose from {list(METRICS)}")
    out: dict = {}
    needs_logs = {"cfr", "miss_rate", "mfr"} & set(wanted)
    if needs_logs:
        if not (args.flips_injected and args.flips_proposed):
            raise FairLabelError(f"{sorted(needs_logs)} need --flips-injected and --flips-proposed")
        injected = FlipLog.load(args.flips_injected)
        proposed = _proposed_log(args.flips_proposed)
        scorers = {"cfr": cfr, "miss_rate": miss_rate, "mfr": mfr}
        for m in sorted(needs_logs):
            out[m] = scorers[m](injected, proposed)
    if {"dir", "did", "f1"} & set(wanted):
        if not args.data:
            raise FairLabelError("dir, did and f1 need --data")
        ds = read_csv(args.data)
        if "dir" in wanted:
            out["dir"] = disparate_impact_ratio(ds.labels, ds.protected)
        if "did" in wanted:
            out["did"] = disparate_impact_difference(ds.labels, ds.protected)
        if "f1" in wanted:
            if not args.reference:
                raise FairLabelError("f1 needs --reference (the clean labels)")
            ref = read_csv(args.reference)
            out["f1"] = f1(ref.labels, ds.labels[ds.positions(ref.row_ids)])
    if args.out:
        _write_json(out, args.out)
    else:
        print(json.dumps(out, sort_keys=True))


def _emit(results, out_dir: Path, stem: str) -> None:
    harness.emit_results(results, out_dir / f"{stem}.json", "json")
    harness.emit_results(results, out_dir / f"{stem}.csv", "csv")


def cmd_experiment_synthetic(args) -> None:
    cfg = harness.SyntheticExperimentConfig()
    if args.config:
        cfg = harness.SyntheticExperimentConfig.from_dict(json.loads(Path(args.config).read_text()))
    if args.full_scale:
        cfg = replace(cfg, generator={**cfg.generator, "n_samples": 100_000})
    if args.repetitions is not None:
        cfg = replace(cfg, repetitions=args.repetitions)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    out_dir = Path(args.out)
    if args.rates:
        rates = [float(r) for r in args.rates.split(",") if r.strip()]
        _emit(harness.sweep_bias_rate(cfg, rates), out_dir, "sweep")
    else:
        _emit(harness.run_synthetic_experiment(cfg), out_dir, "synthetic")


def cmd_experiment_benchmark(args) -> None:
    cfg = harness.BenchmarkConfig(repetitions=args.repetitions, seed=args.seed)
    if args.min_only:
        cfg = replace(cfg, debias=replace(cfg.debias, run_fairmaj=False))
    res = harness.run_benchmark_experiment(args.dataset, cfg, args.data_path)
    _emit(res, Path(args.out), f"benchmark_{args.dataset}")


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fairlabel", description="Directional label-bias correction.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a clean synthetic dataset")
    g.add_argument("--family", choices=sorted(FAMILIES), default="linear")
    g.add_argument("--n", type=int, default=20_000)
    g.add_argument("--n-features", type=int, default=10)
    g.add_argument("--p-noise", type=float, default=0.0)
    g.add_argument("--minority-fraction", type=float, default=0.5,
                   help="tag rows Minority with this probability")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--coef-out", help="linear family: also write the true coefficients")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    b = sub.add_parser("inject-bias", help="flip labels within one group")
    b.add_argument("--in", dest="input", required=True)
    b.add_argument("--group", choices=["minority", "majority"], default="minority")
    b.add_argument("--direction", choices=[d.value for d in Direction], default="1to0")
    b.add_argument("--severity", type=float, default=0.2)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", required=True)
    b.add_argument("--log", required=True, help="injected flip log (JSON)")
    b.set_defaults(func=cmd_inject_bias)

    d = sub.add_parser("debias", help="propose and apply label flips")
    d.add_argument("--in", dest="input", required=True)
    d.add_argument("--method", choices=sorted(METHODS), default="fairlabel")
    d.add_argument("--classifier", choices=["logistic", "tree", "gbt"], default="gbt")
    d.add_argument("--threshold", default="0.5", help="a number in [0, 1] or 'tune'")
    d.add_argument("--min-only", action="store_true", help="fairlabel: skip the majority phase")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--out", required=True)
    d.add_argument("--report")
    d.add_argument("--flips", help="proposed flip log (JSON)")
    d.set_defaults(func=cmd_debias)

    e = sub.add_parser("evaluate", help="score flips and label fairness")
    e.add_argument("--data", help="dataset whose labels are scored")
    e.add_argument("--flips-injected")
    e.add_argument("--flips-proposed", help="flip log or debias report")
    e.add_argument("--reference", help="clean dataset for f1")
    e.add_argument("--metrics", default="cfr,mfr,dir,did")
    e.add_argument("--out")
    e.set_defaults(func=cmd_evaluate)

    x = sub.add_parser("experiment", help="end-to-end pipelines")
    xs = x.add_subparsers(dest="kind", required=True)
    s = xs.add_parser("synthetic")
    s.add_argument("--config", help="JSON config; defaults apply when omitted")
    s.add_argument("--rates", help="comma-separated bias rates to sweep")
    s.add_argument("--repetitions", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--full-scale", action="store_true", help="N=100,000 instead of the config size")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_experiment_synthetic)
    bm = xs.add_parser("benchmark")
    bm.add_argument("--dataset", choices=sorted(ingest.LOADERS), required=True)
    bm.add_argument("--data-path", help="file or directory; defaults to $FAIRLABEL_DATA or data/")
    bm.add_argument("--repetitions", type=int, default=5)
    bm.add_argument("--seed", type=int, default=0)
    bm.add_argument("--min-only", action="store_true")
    bm.add_argument("--out", required=True)
    bm.set_defaults(func=cmd_experiment_benchmark)
    return p


def _fail(exc: BaseException, code: int) -> int:
    line = json.dumps({"error": type(exc).__name__, "message": str(exc)})
    print(line, file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (FairLabelError, KeyError) as exc:
        return _fail(exc, 2)
    except OSError as exc:
        return _fail(exc, 1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
