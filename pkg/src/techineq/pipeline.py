"""
End-to-end pipeline: ingest, frequencies, inequality, concordance and
decomposition, writing tab-separated result tables and a JSON manifest.
"""
from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, NamedTuple

from . import __version__
from .concordance import (DEFAULT_RULE, ConcordanceError, classify_table, load_concordance,
                          partition_by_year)
from .decomposition import decompose, rank_divisions
from .frequency import build_distributions, describe, group_table
from .ingest import (APP_REG_COLUMNS, CPC_COLUMNS, DEFAULT_WINDOW, IPC_COLUMNS, IngestStats,
                     Scheme, SchemaError, filter_window, ingest, read_events, read_header, write_events)
from .measures import gini, lorenz, theil

logger = logging.getLogger(__name__)

STAGES = ("ingest", "freq", "ineq", "lorenz", "classify", "decomp", "rank")
_NEEDS_CONCORDANCE = {"classify", "decomp", "rank"}

# output file -> header; pinned by golden tests
COLUMNS = {
    "events.tsv": ("patent_id", "year", "scheme", "code"),
    "freq_tables.tsv": ("year", "scheme", "x", "n_codes"),
    "freq_stats.tsv": ("year", "scheme", "n", "total_uses", "mean", "max", "variance",
                       "cv", "skewness", "kurtosis"),
    "inequality.tsv": ("year", "scheme", "n", "mu", "gini", "theil"),
    "lorenz.tsv": ("year", "scheme", "X", "Y"),
    "classified.tsv": ("patent_id", "year", "code", "division", "context_flag"),
    "decomposition.tsv": ("year", "total", "within", "between", "within_share"),
    "split_comparison.tsv": ("year", "theil_unsplit", "theil_split", "difference"),
    "ranking": ("measure", "division", "value", "n_g", "mu_g", "share", "degenerate"),
}


class ConfigError(ValueError):
    """Invalid run configuration (a usage error)."""


@dataclass
class RunConfig:
    ipc: str | None = None
    app_reg: str | None = None
    cpc: str | None = None
    concordance: str | None = None
    events: str | None = None
    start: int = DEFAULT_WINDOW[0]
    end: int = DEFAULT_WINDOW[1]
    schemes: tuple[str, ...] = ("IPC", "CPC")
    split_dual: bool = True
    lorenz_years: tuple[int, ...] = ()
    out: str = "results"
    delimiter: str | None = None
    threads: int = 1
    freq_layout: str = "long"

    def check(self, stages: Iterable[str] = STAGES) -> None:
        stages = set(stages)
        if self.start > self.end:
            raise ConfigError(f"--from {self.start} is after --to {self.end}")
        if not self.schemes:
            raise ConfigError("at least one scheme must be selected")
        for s in self.schemes:
            if s.upper() not in ("IPC", "CPC"):
                raise ConfigError(f"unknown scheme {s!r}")
        if self.threads < 1:
            raise ConfigError("--threads must be at least 1")
        if self.freq_layout not in ("long", "split"):
            raise ConfigError("--freq-layout must be 'long' or 'split'")
        if self.events is None:
            if not self.ipc:
                raise ConfigError("--ipc is required (or --events)")
            if "CPC" in self.scheme_set and not (self.app_reg and self.cpc):
                raise ConfigError("CPC scheme needs --app-reg and --cpc")
        if stages & _NEEDS_CONCORDANCE and not self.concordance:
            raise ConfigError("--concordance is required for classify/decomp/rank")

    @property
    def scheme_set(self) -> set[str]:
        return {s.upper() for s in self.schemes}

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["schemes"] = sorted(self.scheme_set)
        d["lorenz_years"] = list(self.lorenz_years)
        return d


def parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "y", "on"):
        return True
    if t in ("0", "false", "no", "n", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def read_config_file(path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def _digest(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def fmt(v) -> str:
    if v is None:
        return "NA"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


class Diagnostic(NamedTuple):
    severity: str  # "error" | "warning" | "info"
    message: str


@dataclass
class RunManifest:
    config: dict
    status: str = "complete"
    ingest: dict = field(default_factory=dict)
    row_counts: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    error: str | None = None

    def to_dict(self) -> dict:
        d = {
            "software": {"name": "techineq", "version": __version__},
            "status": self.status,
            "config": self.config,
            "ingest": self.ingest,
            "row_counts": dict(sorted(self.row_counts.items())),
            "inputs": dict(sorted(self.inputs.items())),
            "outputs": dict(sorted(self.outputs.items())),
            "notes": self.notes,
        }
        if self.error is not None:
            d["error"] = self.error
        return d


class _Out:
    def __init__(self, root: Path, manifest: RunManifest):
        self.root = root
        self.manifest = manifest
        self.written: list[Path] = []

    def table(self, name: str, header, rows) -> Path:
        path = self.root / name
        path.parent.mkdir(parents=True, exist_ok=True)
        n = 0
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("\t".join(header) + "\n")
            for row in rows:
                fh.write("\t".join(fmt(v) for v in row) + "\n")
                n += 1
        self._done(name, path, n)
        return path

    def json(self, name: str, obj) -> Path:
        path = self.root / name
        path.write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n", encoding="utf-8")
        self._done(name, path, None)
        return path

    def _done(self, name, path, rows):
        self.written.append(path)
        if rows is not None:
            self.manifest.row_counts[name] = rows
        self.manifest.outputs[name] = _digest(path)


def _expand(stages: Iterable[str]) -> set[str]:
    stages = set(stages)
    unknown = stages - set(STAGES)
    if unknown:
        raise ConfigError(f"unknown stage(s): {sorted(unknown)}")
    return stages


def run(config: RunConfig, stages: Iterable[str] = STAGES) -> RunManifest:
    """Run the requested stages and write their outputs under ``config.out``.

    On a fatal error every file written by this run is removed, a manifest
    with ``status: failed`` is left behind and the exception propagates.
    """
    stages = _expand(stages)
    config.check(stages)
    root = Path(config.out)
    root.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(config=config.to_dict())
    out = _Out(root, manifest)
    try:
        _run(config, stages, out, manifest)
    except Exception as err:
        for p in out.written:
            p.unlink(missing_ok=True)
        manifest.status = "failed"
        manifest.error = f"{type(err).__name__}: {err}"
        manifest.outputs.clear()
        manifest.row_counts.clear()
        (root / "manifest.json").write_text(
            json.dumps(manifest.to_dict(), indent=1, sort_keys=True) + "\n", encoding="utf-8")
        raise
    (root / "manifest.json").write_text(
        json.dumps(manifest.to_dict(), indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return manifest


def _run(config: RunConfig, stages: set[str], out: _Out, manifest: RunManifest) -> None:
    schemes = [Scheme(s) for s in ("IPC", "CPC") if s in config.scheme_set]
    for name in ("ipc", "app_reg", "cpc", "concordance", "events"):
        p = getattr(config, name)
        if p and (name != "cpc" and name != "app_reg" or Scheme.CPC in schemes):
            manifest.inputs[name] = _digest(Path(p))

    if config.events:
        table = read_events(config.events).for_schemes(schemes)
        table = filter_window(table, config.start, config.end)
        stats = IngestStats.from_table(table)
    else:
        table, stats = ingest(config.ipc, config.app_reg, config.cpc,
                              (config.start, config.end), config.delimiter, schemes)
    manifest.ingest = stats.to_dict()

    if "ingest" in stages:
        path = out.root / "events.tsv"
        write_events(table, path)
        out._done("events.tsv", path, len(table))
        out.json("ingest_stats.json", stats.to_dict())

    dists = None
    if stages & {"freq", "ineq", "lorenz"}:
        dists = build_distributions(table, threads=config.threads)
        keys = sorted(dists, key=lambda k: (k[1].value, k[0]))

    if "freq" in stages:
        if config.freq_layout == "long":
            out.table("freq_tables.tsv", COLUMNS["freq_tables.tsv"],
                      ((y, s.value, x, m) for (y, s) in keys for x, m in group_table(dists[(y, s)]).rows))
        else:
            for (y, s) in keys:
                out.table(f"freq/{s.value}_{y}.tsv", ("x", "n_codes"), group_table(dists[(y, s)]).rows)
        rows = []
        for (y, s) in keys:
            d = describe(dists[(y, s)])
            rows.append((y, s.value, d.n, dists[(y, s)].total, d.mean, d.max, d.variance,
                         d.coefficient_of_variation, d.skewness, d.kurtosis))
        out.table("freq_stats.tsv", COLUMNS["freq_stats.tsv"], rows)

    if "ineq" in stages:
        rows = []
        for (y, s) in keys:
            t = group_table(dists[(y, s)])
            rows.append((y, s.value, t.n, t.mean, gini(t), theil(t)))
        out.table("inequality.tsv", COLUMNS["inequality.tsv"], rows)

    if "lorenz" in stages:
        rows = []
        for (y, s) in keys:
            if y in config.lorenz_years:
                c = lorenz(group_table(dists[(y, s)]))
                rows.extend((y, s.value, X, Y) for X, Y in c.points)
        missing = sorted(set(config.lorenz_years) - {y for y, _ in keys})
        if missing:
            manifest.notes.append(f"no data for Lorenz years {missing}")
        out.table("lorenz.tsv", COLUMNS["lorenz.tsv"], rows)

    if stages & _NEEDS_CONCORDANCE:
        conc = load_concordance(config.concordance)
        classified = classify_table(table, conc, DEFAULT_RULE)
        if "classify" in stages:
            out.table("classified.tsv", COLUMNS["classified.tsv"], classified)
        if stages & {"decomp", "rank"}:
            parts = partition_by_year(classified, config.split_dual)
            manifest.notes.append(
                f"split_dual={str(config.split_dual).lower()}; unsplit mode assigns each dual "
                "symbol to its majority division per year, ties to NACE 21")
        if "decomp" in stages:
            results = {y: decompose(p) for y, p in parts.items()}
            out.table("decomposition.tsv", COLUMNS["decomposition.tsv"],
                      ((y, r.total, r.within, r.between, r.within_share) for y, r in results.items()))
            other = partition_by_year(classified, not config.split_dual)
            rows = []
            for y in parts:
                split = parts[y] if config.split_dual else other[y]
                unsplit = other[y] if config.split_dual else parts[y]
                tu, ts = theil(unsplit.merged()), theil(split.merged())
                rows.append((y, tu, ts, ts - tu))
            out.table("split_comparison.tsv", COLUMNS["split_comparison.tsv"], rows)
        if "rank" in stages:
            for y, p in parts.items():
                rows = []
                for measure in ("gini", "theil"):
                    rk = rank_divisions(p, measure)
                    for r in rk.rows + (rk.all_row,):
                        rows.append((measure, r.division, r.value, r.n, r.mu, r.share, r.degenerate))
                out.table(f"rankings/ranking_{y}.tsv", COLUMNS["ranking"], rows)


def validate(config: RunConfig, stages: Iterable[str] | None = None) -> list[Diagnostic]:
    """Check the configuration and input headers without writing anything.

    Without explicit ``stages`` the concordance stages are checked only when
    a concordance file is configured.
    """
    if stages is None:
        stages = STAGES if config.concordance else set(STAGES) - _NEEDS_CONCORDANCE
    diags: list[Diagnostic] = []
    try:
        config.check(_expand(stages))
    except ConfigError as err:
        diags.append(Diagnostic("error", str(err)))

    def header_check(label, path, required):
        if not path:
            return
        p = Path(path)
        if not p.is_file():
            diags.append(Diagnostic("error", f"{label} file not found: {path}"))
            return
        try:
            cols, delim = read_header(p, config.delimiter)
        except (OSError, UnicodeDecodeError) as err:
            diags.append(Diagnostic("error", f"{label} file unreadable: {err}"))
            return
        missing = [c for c in required if c not in cols]
        if missing:
            diags.append(Diagnostic("error", f"{label} file {path} lacks column(s) {missing}"))
        else:
            diags.append(Diagnostic("info", f"{label} header ok (delimiter {delim!r})"))

    schemes = config.scheme_set
    if config.events:
        header_check("events", config.events, ("patent_id", "year", "scheme", "code"))
    else:
        header_check("IPC", config.ipc, IPC_COLUMNS)
        if "CPC" in schemes:
            if not config.cpc:
                diags.append(Diagnostic("error", "CPC scheme requested but no CPC file given"))
            header_check("app-register", config.app_reg, APP_REG_COLUMNS)
            header_check("CPC", config.cpc, CPC_COLUMNS)
    if config.concordance:
        if not Path(config.concordance).is_file():
            diags.append(Diagnostic("error", f"concordance file not found: {config.concordance}"))
        else:
            try:
                t = load_concordance(config.concordance)
                diags.append(Diagnostic("info", f"concordance ok ({len(t.entries)} entries)"))
            except (ConcordanceError, SchemaError) as err:
                diags.append(Diagnostic("error", f"concordance: {err}"))
    if config.lorenz_years:
        outside = [y for y in config.lorenz_years if not config.start <= y <= config.end]
        if outside:
            diags.append(Diagnostic("warning", f"Lorenz years outside the window: {outside}"))
    return diags
