"""Command-line driver: one subcommand per pipeline stage."""

from __future__ import annotations

import argparse
import sys

from . import pipeline


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", default=None, help="key = value config file")
    sub.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override any config key (repeatable)",
    )


def _run_config(args) -> pipeline.RunConfig:
    overrides = {}
    for item in args.overrides:
        if "=" not in item:
            raise SystemExit(f"--set expects KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        overrides[key.strip()] = value.strip()
    return pipeline.RunConfig.from_file(args.config, overrides)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="zigzagst",
        description="Zigzag persistence summaries of dynamic graphs and a "
        "topology-gated forecasting network.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    for name, helptext in (
        ("filtrate", "build complexes and Betti summary per snapshot"),
        ("zigzag", "compute a persistence diagram per sliding window"),
        ("zpi", "render diagram CSVs into persistence images"),
        ("train", "train the forecasting network"),
        ("ablate", "train the full model and all three ablations"),
        ("synth", "generate the planted-cycle synthetic dataset"),
        ("gradcheck", "finite-difference check of the model gradient"),
    ):
        sub = subs.add_parser(name, help=helptext)
        _add_common(sub)

    dist = subs.add_parser("distance", help="Wasserstein-1 distance of two diagram files")
    _add_common(dist)
    dist.add_argument("diagram_a")
    dist.add_argument("diagram_b")
    dist.add_argument("--dim", type=int, default=1)
    dist.add_argument("--pairing", action="store_true", help="also print the matching")

    fc = subs.add_parser("forecast", help="predict test windows from a checkpoint")
    _add_common(fc)
    fc.add_argument("--checkpoint", required=True)

    args = parser.parse_args(argv)
    config = _run_config(args)

    if args.command == "filtrate":
        out = pipeline.cmd_filtrate(config)
        print(f"wrote {len(out['complexes'])} complex dumps and {out['betti']}")
    elif args.command == "zigzag":
        out = pipeline.cmd_zigzag(config)
        print(f"wrote {out['windows']} diagram files to {config.outdir}")
        if config.check:
            print(f"betti consistency violations: {out['violations']}")
    elif args.command == "zpi":
        out = pipeline.cmd_zpi(config)
        print(f"wrote {len(out['zpi'])} images to {config.outdir}")
    elif args.command == "distance":
        out = pipeline.cmd_distance(config, args.diagram_a, args.diagram_b, args.dim)
        print(f"wasserstein1 = {out['cost']:.17g}")
        if args.pairing:
            print("a_birth,a_death,b_birth,b_death")
            for a, b in out["pairing"]:
                left = f"{a[0]:.17g},{a[1]:.17g}" if a else ","
                right = f"{b[0]:.17g},{b[1]:.17g}" if b else ","
                print(f"{left},{right}")
    elif args.command == "train":
        out = pipeline.cmd_train(config)
        mae, rmse, mape = out["test_metrics"]
        print(f"checkpoint: {out['checkpoint']}")
        print(f"test mae={mae:.6g} rmse={rmse:.6g} mape={mape:.6g}%")
    elif args.command == "forecast":
        out = pipeline.cmd_forecast(config, args.checkpoint)
        print(f"wrote predictions for {out['windows']} windows to {out['forecast']}")
    elif args.command == "ablate":
        out = pipeline.cmd_ablate(config)
        print("ablation,mae,rmse,mape")
        for name, mae, rmse, mape in out["rows"]:
            print(f"{name},{mae:.6g},{rmse:.6g},{mape:.6g}")
    elif args.command == "synth":
        out = pipeline.cmd_synth(config)
        print(f"wrote {out['snapshots']}, {out['features']}, {out['truth']}")
    elif args.command == "gradcheck":
        out = pipeline.cmd_gradcheck(config)
        status = "PASS" if out["passed"] else "FAIL"
        print(f"worst relative error {out['worst_relative_error']:.3e} [{status}]")
        return 0 if out["passed"] else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
