"""Command-line interface.

Subcommands: ``run`` executes the full study and writes all artifacts;
``table`` and ``plot`` re-render the table / figures from a saved
results directory.  Usage errors exit with argparse's status 2, runtime
failures with 1.
"""

import argparse
import json
import sys
from dataclasses import fields
from pathlib import Path

from extrabench.harness import (
    MODELS,
    ExperimentConfig,
    load_report,
    render_figure,
    render_table,
    run_experiment,
    save_report,
)

_CONFIG_KEYS = {f.name for f in fields(ExperimentConfig)}


def _add_common(p):
    p.add_argument("--config", help="flat JSON file with experiment settings")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--models", help="comma-separated model roster")
    p.add_argument("--mode", choices=["tuned", "defaults"], help="hyperparameter mode")
    p.add_argument("--out", default="out", help="output directory (default: ./out)")


def _parse_models(text, parser):
    names = tuple(m.strip() for m in text.split(",") if m.strip())
    unknown = [m for m in names if m not in MODELS]
    if unknown:
        parser.error(
            f"unknown model(s): {', '.join(unknown)}; choose from {', '.join(MODELS)}"
        )
    return names


def _build_config(args, parser) -> ExperimentConfig:
    values = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except FileNotFoundError:
            parser.error(f"config file not found: {args.config}")
        except json.JSONDecodeError as exc:
            parser.error(f"config file is not valid JSON: {exc}")
        bad = set(raw) - _CONFIG_KEYS
        if bad:
            parser.error(f"unknown config keys: {', '.join(sorted(bad))}")
        values.update(raw)
    if isinstance(values.get("models"), str):
        values["models"] = _parse_models(values["models"], parser)
    elif "models" in values:
        values["models"] = tuple(values["models"])
    # CLI flags override file values
    if args.seed is not None:
        values["seed"] = args.seed
    if args.models:
        values["models"] = _parse_models(args.models, parser)
    if args.mode:
        values["mode"] = args.mode
    values["out_dir"] = args.out
    try:
        return ExperimentConfig(**values)
    except (TypeError, ValueError) as exc:
        parser.error(str(exc))


def cli_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="extrabench",
        description="Train-range vs extrapolation benchmark for ten regressors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in [
        ("run", "run the full study and write all artifacts"),
        ("table", "re-render the gap table from saved results"),
        ("plot", "re-render the figures from saved results"),
    ]:
        _add_common(sub.add_parser(name, help=text))
    args = parser.parse_args(argv)

    try:
        if args.command == "run":
            cfg = _build_config(args, parser)
            report = run_experiment(cfg)
            if not report.rows:
                print("error: every model failed", file=sys.stderr)
                for name, msg in report.failures.items():
                    print(f"  {name}: {msg}", file=sys.stderr)
                return 1
            save_report(report, cfg.out_dir)
            text, _ = render_table(report)
            print(text, end="")
            if report.failures:
                for name, msg in report.failures.items():
                    print(f"warning: {name} failed: {msg}", file=sys.stderr)
                return 1
            return 0
        report = load_report(args.out)
        out = Path(args.out)
        if args.command == "table":
            text, csv_text = render_table(report)
            (out / "table.txt").write_text(text)
            (out / "table.csv").write_text(csv_text)
            print(text, end="")
            return 0
        figures, curves_csv = render_figure(report)
        (out / "curves.csv").write_text(curves_csv)
        for gname, svg in figures.items():
            (out / f"figure_{gname}.svg").write_text(svg)
        print(f"wrote {len(figures)} figure(s) to {out}")
        return 0
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
