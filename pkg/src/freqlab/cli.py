"""Command line front end.

    freqlab run CONFIG [--out DIR] [--format csv|json|all] [--seed N]
                [--grid SPEC] [--quiet]
    freqlab sweep CONFIG --axis key=v1,v2 [--axis ...] [--out DIR]
                [--workers N] [--quiet]
    freqlab verify CONFIG --check NAME [--quiet]
    freqlab report RESULTS_JSON [--out DIR] [--format csv|json|all]

Exit codes: 0 all checks pass (or not applicable), 1 at least one check
failed, 2 configuration error, 3 numerical or internal failure.  The
FREQLAB_OUT environment variable supplies the default output directory.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from . import reporting, runner, sweep as sweep_mod
from .config import load_config
from .errors import FreqlabError, ParseError, ValidationError
from .runner import REGISTRY_NAMES

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="freqlab",
        description="numerical verification runs for the parabolic "
        "frequency-function laboratory",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_format=True):
        sp.add_argument("--out", default=None, help="output directory")
        if with_format:
            sp.add_argument(
                "--format", choices=("csv", "json", "all"), default="all"
            )
        sp.add_argument("--quiet", action="store_true")

    run_p = sub.add_parser("run", help="run one scenario and all checks")
    run_p.add_argument("config")
    run_p.add_argument("--seed", type=int, default=None,
                       help="override coefficient and initial-data seeds")
    run_p.add_argument("--grid", default=None,
                       help="override primary grid, e.g. 257 or 65x65")
    common(run_p)

    sweep_p = sub.add_parser("sweep", help="calibration/hold-out sweep")
    sweep_p.add_argument("config")
    sweep_p.add_argument(
        "--axis", action="append", default=[], metavar="KEY=V1,V2",
        help="sweep axis as dotted config path with comma separated values",
    )
    sweep_p.add_argument("--workers", type=int, default=4)
    common(sweep_p, with_format=False)

    verify_p = sub.add_parser("verify", help="run a single named check")
    verify_p.add_argument("config")
    verify_p.add_argument("--check", required=True, choices=REGISTRY_NAMES)
    verify_p.add_argument("--quiet", action="store_true")

    report_p = sub.add_parser("report", help="re-render artifacts from records")
    report_p.add_argument("results")
    common(report_p)
    return p


def _out_dir(args) -> str:
    return args.out or os.environ.get("FREQLAB_OUT") or "results"


def _parse_scalar(tok: str):
    for cast in (int, float):
        try:
            return cast(tok)
        except ValueError:
            continue
    return tok


def _parse_axchain(key: str, raw: str):
    toks = [t for t in raw.split(",") if t]
    if not toks:
        raise ValidationError(f"axis {key!r} has no values")
    if key == "grid.sizes":
        # each token is one member's grid, axes separated by 'x'
        return [[[int(n) for n in tok.split("x")]] for tok in toks]
    return [_parse_scalar(t) for t in toks]


def _parse_axes(pairs) -> dict:
    axes = {}
    for item in pairs:
        if "=" not in item:
            raise ValidationError(f"axis {item!r} is not of the form key=v1,v2")
        key, raw = item.split("=", 1)
        axes[key.strip()] = _parse_axchain(key.strip(), raw)
    if not axes:
        raise ValidationError("sweep needs at least one --axis")
    return axes


def _apply_overrides(cfg, args):
    if getattr(args, "seed", None) is not None:
        cfg = replace(
            cfg,
            coefficients=replace(cfg.coefficients, seed=args.seed),
            initial=replace(cfg.initial, seed=args.seed),
        )
    if getattr(args, "grid", None) is not None:
        sizes = [[int(n) for n in args.grid.split("x")]]
        cfg = replace(cfg, grid=replace(cfg.grid, sizes=sizes))
        from .config import validate_config

        validate_config(cfg)
    return cfg


def _emit(records, out_dir, fmt, summary=None) -> list:
    written = []
    if fmt in ("csv", "all"):
        reporting.write_checks_csv(records, os.path.join(out_dir, "checks.csv"))
        reporting.write_traces_csv(records, os.path.join(out_dir, "traces.csv"))
        written += ["checks.csv", "traces.csv"]
    if fmt in ("json", "all"):
        reporting.write_records_json(
            records, os.path.join(out_dir, "records.json"), summary
        )
        written.append("records.json")
    return written


def _print_record(rec, quiet: bool) -> None:
    if quiet:
        return
    print(f"scenario {rec.scenario_id} [{rec.tag}]")
    for c in rec.checks:
        bits = [f"{c.name}: {c.status}"]
        if c.margin is not None:
            bits.append(f"margin={c.margin:.6e}")
        if c.fitted_constant is not None:
            bits.append(f"fitted={c.fitted_constant:.6e}")
        print("  " + "  ".join(bits))


def _status_exit(records) -> int:
    status = runner.worst_status(records)
    if status == "error":
        return EXIT_NUMERIC
    if status == "fail":
        return EXIT_FAIL
    return EXIT_PASS


def _cmd_run(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    rec = runner.run_scenario(cfg)
    out = _out_dir(args)
    _emit([rec], out, args.format)
    _print_record(rec, args.quiet)
    if not args.quiet:
        print(f"results written to {out}")
    return _status_exit([rec])


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    axes = _parse_axes(args.axis)
    out = _out_dir(args)

    def persist(records, summary=None):
        _emit(records, out, "all", summary)

    result = sweep_mod.run_sweep(cfg, axes, workers=args.workers, persist=persist)
    if not args.quiet:
        for rec in result.records:
            _print_record(rec, False)
        print(f"calibrated constants: {result.summary['calibrated']}")
        print(f"results written to {out}")
    return _status_exit(result.records)


def _cmd_verify(args) -> int:
    cfg = load_config(args.config)
    rec = runner.run_scenario(cfg, checks=[args.check])
    c = rec.checks[0]
    if not args.quiet:
        margin = "" if c.margin is None else f"  margin={c.margin:.6e}"
        note = f"  ({c.note})" if c.note else ""
        print(f"{c.name}: {c.status}{margin}{note}")
    return _status_exit([rec])


def _cmd_report(args) -> int:
    records, summary = reporting.load_records_json(args.results)
    out = _out_dir(args)
    written = _emit(records, out, args.format, summary)
    if not args.quiet:
        print(f"rewrote {', '.join(written)} in {out}")
    return EXIT_PASS


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "sweep": _cmd_sweep,
        "verify": _cmd_verify,
        "report": _cmd_report,
    }
    try:
        return handlers[args.command](args)
    except (ParseError, ValidationError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FreqlabError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
