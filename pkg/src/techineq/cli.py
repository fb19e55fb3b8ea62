"""Command line interface: ``techineq <subcommand> [options]``.

Exit codes: 0 success, 1 fatal stage error (or validation errors),
2 usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .pipeline import (STAGES, ConfigError, RunConfig, parse_bool, read_config_file, run,
                       validate)
from .synth import SyntheticProfile, generate_synthetic

PIPELINE_COMMANDS = {
    "ingest": ("ingest",),
    "freq": ("freq",),
    "ineq": ("ineq",),
    "lorenz": ("lorenz",),
    "classify": ("classify",),
    "decomp": ("decomp",),
    "rank": ("rank",),
    "run": STAGES,
}

HELP = {
    "validate": "check inputs and configuration without writing results",
    "ingest": "parse and join the raw files into events.tsv",
    "freq": "yearly frequency tables and descriptive statistics",
    "ineq": "Gini and Theil per year and scheme",
    "lorenz": "Lorenz curve points for --lorenz-years",
    "classify": "assign IPC events to NACE divisions",
    "decomp": "within/between Theil decomposition per year",
    "rank": "per-division Gini and Theil rankings per year",
    "run": "all stages in order",
}


def _year_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated year list: {text!r}") from None


def _schemes(text: str) -> tuple[str, ...]:
    return tuple(t.strip().upper() for t in text.split(",") if t.strip())


def _delimiter(text: str) -> str:
    text = {"\\t": "\t", "tab": "\t", "pipe": "|", "comma": ",", "semicolon": ";"}.get(text, text)
    if len(text) != 1:
        raise argparse.ArgumentTypeError("delimiter must be a single character")
    return text


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value file; flags override its entries")
    p.add_argument("--ipc", help="IPC file (pct_nbr, prio_year, app_year, IPC)")
    p.add_argument("--app-reg", help="application register (pct_nbr, appln_id)")
    p.add_argument("--cpc", help="CPC file (appln_id, CPC)")
    p.add_argument("--concordance", help="IPC prefix to NACE division table")
    p.add_argument("--events", help="read a canonical event file instead of the raw inputs")
    p.add_argument("--from", dest="start", type=int, help="first priority year (default 1977)")
    p.add_argument("--to", dest="end", type=int, help="last priority year (default 2018)")
    p.add_argument("--schemes", type=_schemes, help="comma list, e.g. ipc,cpc")
    p.add_argument("--split-dual", help="true/false")
    p.add_argument("--lorenz-years", type=_year_list, help="comma list of years")
    p.add_argument("--out", help="output directory")
    p.add_argument("--delimiter", type=_delimiter, help="input delimiter; sniffed when omitted")
    p.add_argument("--threads", type=int, help="worker threads for aggregation")
    p.add_argument("--freq-layout", choices=("long", "split"),
                   help="one long frequency file, or one file per year and scheme")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="techineq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("validate",) + tuple(PIPELINE_COMMANDS):
        _common(sub.add_parser(name, help=HELP[name]))
    sp = sub.add_parser("synth", help="write a synthetic fixture with ground truth")
    sp.add_argument("--out", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--patents", type=int, default=1000)
    sp.add_argument("--years", default="2000-2004", help="first-last priority year")
    sp.add_argument("--codes-per-patent", default="1-6", help="min-max")
    sp.add_argument("--ipc-vocabulary", type=int, default=400)
    sp.add_argument("--cpc-vocabulary", type=int, default=800)
    sp.add_argument("--skew", type=float, default=1.1, help="Zipf exponent; 0 is uniform")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if args.config:
        raw = read_config_file(args.config)
        conv = {
            "start": int, "end": int, "from": int, "to": int, "threads": int,
            "schemes": _schemes, "lorenz_years": _year_list,
            "split_dual": parse_bool, "delimiter": _delimiter,
        }
        for k, v in raw.items():
            k = {"from": "start", "to": "end"}.get(k, k)
            values[k] = conv.get(k, str)(v)
    for k in ("ipc", "app_reg", "cpc", "concordance", "events", "start", "end", "schemes",
              "lorenz_years", "out", "delimiter", "threads", "freq_layout"):
        v = getattr(args, k)
        if v is not None:
            values[k] = v
    if args.split_dual is not None:
        values["split_dual"] = parse_bool(args.split_dual)
    known = set(RunConfig.__dataclass_fields__)
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
    return RunConfig(**values)


def _range(text: str) -> tuple[int, int]:
    a, _, b = text.partition("-")
    return int(a), int(b or a)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    if args.command == "synth":
        try:
            profile = SyntheticProfile(
                patents=args.patents, years=_range(args.years),
                codes_per_patent=_range(args.codes_per_patent),
                ipc_vocabulary=args.ipc_vocabulary, cpc_vocabulary=args.cpc_vocabulary,
                skew=args.skew)
        except ValueError as err:
            parser.error(str(err))
        paths = generate_synthetic(args.out, args.seed, profile)
        for k, p in paths.items():
            print(f"{k}\t{p}")
        return 0

    try:
        config = config_from_args(args)
        if args.command != "validate":
            config.check(PIPELINE_COMMANDS[args.command])
    except ConfigError as err:
        parser.error(str(err))

    if args.command == "validate":
        diags = validate(config)
        for d in diags:
            print(f"{d.severity}\t{d.message}")
        if any(d.severity == "error" for d in diags):
            return 1
        print("ok")
        return 0

    try:
        manifest = run(config, PIPELINE_COMMANDS[args.command])
    except Exception as err:  # any fatal stage error
        print(f"techineq: error: {type(err).__name__}: {err}", file=sys.stderr)
        return 1
    print(json.dumps({"status": manifest.status, "out": str(Path(config.out)),
                      "outputs": sorted(manifest.outputs)}, indent=1))
    return 0


if __name__ == "__main__":
    sys.exit(main())
