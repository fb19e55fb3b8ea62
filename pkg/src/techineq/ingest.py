"""
Ingestion of patent-classification files.

Three header-named delimited files are read:

* the IPC file ``pct_nbr | prio_year | app_year | IPC``
* the application register ``pct_nbr | appln_id``
* the CPC file ``appln_id | CPC``

The IPC file defines each patent and its priority year; CPC codes are
attached to patents through the register. The result is an
:class:`EventTable`, a deduplicated, canonically sorted columnar store of
``(patent, year, scheme, code)`` observations.
"""
from __future__ import annotations

import csv
import io
import logging
import os
import re
from array import array
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_WINDOW = (1977, 2018)
SNIFF_DELIMITERS = ",;|\t"

IPC_COLUMNS = ("pct_nbr", "prio_year", "app_year", "IPC")
APP_REG_COLUMNS = ("pct_nbr", "appln_id")
CPC_COLUMNS = ("appln_id", "CPC")

_WS = re.compile(r"\s+")
_YEAR = re.compile(r"^\d{4}$")


class SchemaError(ValueError):
    """A required column is missing from a file header."""


class RowError(ValueError):
    """A single data row is unusable; carries a short reason tag."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class Scheme(str, Enum):
    IPC = "IPC"
    CPC = "CPC"

    def __str__(self) -> str:
        return self.value


SCHEMES = (Scheme.IPC, Scheme.CPC)


class RawIpcRecord(NamedTuple):
    pct_nbr: str
    prio_year: int
    app_year: int
    ipc_code: str


class RawAppRegRecord(NamedTuple):
    pct_nbr: str
    appln_id: str


class RawCpcRecord(NamedTuple):
    appln_id: str
    cpc_code: str


class PatentCodeEvent(NamedTuple):
    patent_id: str
    year: int
    scheme: Scheme
    code: str


def normalize_code(code: str) -> str:
    """Trim, collapse whitespace runs to one space and uppercase."""
    return _WS.sub(" ", code.strip()).upper()


@dataclass
class FileStats:
    rows_in: int = 0
    records_out: int = 0
    rejected: Counter = field(default_factory=Counter)

    @property
    def rejected_rows(self) -> int:
        return sum(self.rejected.values())

    def to_dict(self) -> dict:
        return {
            "rows_in": self.rows_in,
            "records_out": self.records_out,
            "rejected_rows": self.rejected_rows,
            "rejected_reasons": dict(sorted(self.rejected.items())),
        }


@dataclass
class IngestStats:
    patents: int = 0
    distinct_codes_per_scheme: dict = field(default_factory=dict)
    total_uses_per_scheme: dict = field(default_factory=dict)
    files: dict = field(default_factory=dict)
    unmatched_cpc: Counter = field(default_factory=Counter)
    duplicates_collapsed: dict = field(default_factory=dict)
    excluded_by_window: int = 0
    conflicting_prio_years: int = 0

    @classmethod
    def from_table(cls, table: "EventTable") -> "IngestStats":
        stats = cls()
        _summarize(table, stats)
        return stats

    @property
    def rejected_rows(self) -> Counter:
        total = Counter()
        for fs in self.files.values():
            total.update(fs.rejected)
        return total

    def to_dict(self) -> dict:
        return {
            "patents": self.patents,
            "distinct_codes_per_scheme": {str(k): v for k, v in sorted(self.distinct_codes_per_scheme.items())},
            "total_uses_per_scheme": {str(k): v for k, v in sorted(self.total_uses_per_scheme.items())},
            "rejected_rows": sum(self.rejected_rows.values()),
            "rejected_reasons": dict(sorted(self.rejected_rows.items())),
            "files": {k: v.to_dict() for k, v in sorted(self.files.items())},
            "unmatched_cpc": dict(sorted(self.unmatched_cpc.items())),
            "duplicates_collapsed": {str(k): v for k, v in sorted(self.duplicates_collapsed.items())},
            "excluded_by_window": self.excluded_by_window,
            "conflicting_prio_years": self.conflicting_prio_years,
        }


# ---------------------------------------------------------------------------
# delimited parsing

def sniff_delimiter(header: str) -> str:
    """Pick the delimiter among comma, semicolon, pipe and tab."""
    try:
        return csv.Sniffer().sniff(header, delimiters=SNIFF_DELIMITERS).delimiter
    except csv.Error:
        counts = {d: header.count(d) for d in SNIFF_DELIMITERS}
        best = max(counts, key=counts.get)
        if counts[best] == 0:
            return ","
        return best


def _open_text(source) -> tuple[io.TextIOBase, bool]:
    if isinstance(source, (str, os.PathLike)):
        return open(source, "r", encoding="utf-8", newline=""), True
    if isinstance(source, io.TextIOBase):
        return source, False
    # binary stream
    return io.TextIOWrapper(source, encoding="utf-8", newline=""), False


def read_header(source, delimiter: str | None = None) -> tuple[list[str], str]:
    """Return the header columns and the delimiter in use."""
    fh, owned = _open_text(source)
    try:
        line = fh.readline().rstrip("\r\n").lstrip("﻿")
    finally:
        if owned:
            fh.close()
    delim = delimiter or sniff_delimiter(line)
    return [c.strip() for c in next(csv.reader([line], delimiter=delim))], delim


def parse_delimited(
    source,
    schema: Sequence[str],
    delimiter: str | None = None,
    stats: FileStats | None = None,
    convert: Callable[[list[str]], object] | None = None,
) -> Iterator:
    """Stream records from a header-named delimited file.

    Columns are matched by header name, so their order is free and extra
    columns are ignored. Each data row yields the schema fields (trimmed)
    as a list, or ``convert(fields)`` when a converter is given. Rows with
    the wrong field count, or for which ``convert`` raises
    :class:`RowError`, are counted in ``stats.rejected`` and skipped.

    Raises
    ------
    SchemaError
        if a schema column is absent from the header.
    """
    stats = stats if stats is not None else FileStats()
    fh, owned = _open_text(source)
    try:
        header_line = fh.readline()
        if not header_line:
            raise SchemaError("empty file: no header row")
        header_line = header_line.rstrip("\r\n").lstrip("﻿")
        delim = delimiter or sniff_delimiter(header_line)
        header = [c.strip() for c in next(csv.reader([header_line], delimiter=delim))]
        positions = []
        for col in schema:
            if col not in header:
                raise SchemaError(f"missing required column {col!r} (header: {header})")
            positions.append(header.index(col))
        width = len(header)
        reader = csv.reader(fh, delimiter=delim, quoting=csv.QUOTE_NONE)
        for row in reader:
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            stats.rows_in += 1
            if len(row) != width:
                stats.rejected["field_count"] += 1
                continue
            fields = [row[p].strip() for p in positions]
            if convert is not None:
                try:
                    record = convert(fields)
                except RowError as err:
                    stats.rejected[err.reason] += 1
                    continue
            else:
                record = fields
            stats.records_out += 1
            yield record
    finally:
        if owned:
            fh.close()


def _year(text: str) -> int:
    if not _YEAR.match(text):
        raise RowError("bad_year")
    return int(text)


def _ipc_record(f: list[str]) -> RawIpcRecord:
    pct, prio, app, code = f
    code = normalize_code(code)
    if not pct or not code:
        raise RowError("empty_field")
    return RawIpcRecord(pct, _year(prio), _year(app), code)


def _app_reg_record(f: list[str]) -> RawAppRegRecord:
    if not f[0] or not f[1]:
        raise RowError("empty_field")
    return RawAppRegRecord(f[0], f[1])


def _cpc_record(f: list[str]) -> RawCpcRecord:
    code = normalize_code(f[1])
    if not f[0] or not code:
        raise RowError("empty_field")
    return RawCpcRecord(f[0], code)


def read_ipc(source, delimiter=None, stats=None) -> Iterator[RawIpcRecord]:
    return parse_delimited(source, IPC_COLUMNS, delimiter, stats, _ipc_record)


def read_app_reg(source, delimiter=None, stats=None) -> Iterator[RawAppRegRecord]:
    return parse_delimited(source, APP_REG_COLUMNS, delimiter, stats, _app_reg_record)


def read_cpc(source, delimiter=None, stats=None) -> Iterator[RawCpcRecord]:
    return parse_delimited(source, CPC_COLUMNS, delimiter, stats, _cpc_record)


# ---------------------------------------------------------------------------
# join and window

def join_cpc(
    ipc_side: Mapping[str, int],
    app_reg: Iterable[RawAppRegRecord],
    cpc: Iterable[RawCpcRecord],
    stats: IngestStats | None = None,
    dedup: bool = True,
) -> Iterator[PatentCodeEvent]:
    """Attach CPC codes to patents through the application register.

    ``ipc_side`` maps ``pct_nbr`` to its priority year and must be complete
    before probing. The register is consumed fully into a lookup; the CPC
    stream is then probed row by row. CPC rows whose ``appln_id`` has no
    register link, or whose linked patents are unknown to the IPC side, are
    counted in ``stats.unmatched_cpc`` and dropped.
    """
    # most applications link to a single patent; keep a bare string for those
    links: dict[str, str | tuple[str, ...]] = {}
    for rec in app_reg:
        old = links.get(rec.appln_id)
        if old is None:
            links[rec.appln_id] = rec.pct_nbr
        elif isinstance(old, str):
            if old != rec.pct_nbr:
                links[rec.appln_id] = tuple(sorted((old, rec.pct_nbr)))
        elif rec.pct_nbr not in old:
            links[rec.appln_id] = tuple(sorted(old + (rec.pct_nbr,)))
    seen: set[tuple[str, str]] = set()
    for rec in cpc:
        pcts = links.get(rec.appln_id)
        if not pcts:
            if stats is not None:
                stats.unmatched_cpc["no_register_link"] += 1
            continue
        hit = False
        for pct in (pcts,) if isinstance(pcts, str) else pcts:
            year = ipc_side.get(pct)
            if year is None:
                continue
            hit = True
            if dedup:
                key = (pct, rec.cpc_code)
                if key in seen:
                    continue
                seen.add(key)
            yield PatentCodeEvent(pct, year, Scheme.CPC, rec.cpc_code)
        if not hit and stats is not None:
            stats.unmatched_cpc["unknown_patent"] += 1


def filter_window(events, start: int, end: int, stats: IngestStats | None = None):
    """Keep events with ``start <= year <= end`` (both inclusive).

    Accepts an :class:`EventTable` (returns a table) or any iterable of
    :class:`PatentCodeEvent` (returns a generator).
    """
    if start > end:
        raise ValueError(f"window start {start} is after end {end}")
    if isinstance(events, EventTable):
        mask = (events.year >= start) & (events.year <= end)
        if stats is not None:
            stats.excluded_by_window += int((~mask).sum())
        return events.select(mask)

    def gen():
        for ev in events:
            if start <= ev.year <= end:
                yield ev
            elif stats is not None:
                stats.excluded_by_window += 1

    return gen()


# ---------------------------------------------------------------------------
# columnar event store

_SCHEME_CODE = {Scheme.IPC: 0, Scheme.CPC: 1}


@dataclass(frozen=True)
class EventTable:
    """Deduplicated events in columnar form.

    ``patents`` and ``codes`` are sorted vocabularies; the integer columns
    index into them. Rows are sorted by (scheme, year, patent, code), so two
    tables built from the same facts are identical whatever the input order.
    """

    patents: tuple
    codes: tuple
    patent: np.ndarray
    year: np.ndarray
    scheme: np.ndarray
    code: np.ndarray

    def __len__(self) -> int:
        return len(self.patent)

    def __iter__(self) -> Iterator[PatentCodeEvent]:
        pats, codes = self.patents, self.codes
        for p, y, s, c in zip(self.patent.tolist(), self.year.tolist(),
                              self.scheme.tolist(), self.code.tolist()):
            yield PatentCodeEvent(pats[p], y, SCHEMES[s], codes[c])

    def __eq__(self, other) -> bool:
        if not isinstance(other, EventTable):
            return NotImplemented
        return list(self) == list(other)

    def select(self, mask: np.ndarray) -> "EventTable":
        return EventTable(self.patents, self.codes, self.patent[mask],
                          self.year[mask], self.scheme[mask], self.code[mask])

    def for_scheme(self, scheme: Scheme) -> "EventTable":
        return self.select(self.scheme == _SCHEME_CODE[Scheme(scheme)])

    def for_schemes(self, schemes: Sequence[Scheme]) -> "EventTable":
        return self.select(np.isin(self.scheme, [_SCHEME_CODE[Scheme(s)] for s in schemes]))

    def years(self) -> list[int]:
        return sorted(set(self.year.tolist()))

    def iter_patents(self, scheme: Scheme = Scheme.IPC) -> Iterator[tuple[str, int, list[str]]]:
        """Yield ``(patent_id, year, codes)`` for each patent of ``scheme``."""
        sub = self.for_scheme(scheme)
        if not len(sub):
            return
        p = sub.patent
        starts = np.flatnonzero(np.r_[True, p[1:] != p[:-1]])
        ends = np.r_[starts[1:], len(p)]
        for s, e in zip(starts.tolist(), ends.tolist()):
            yield (sub.patents[int(p[s])], int(sub.year[s]),
                   [sub.codes[c] for c in sub.code[s:e].tolist()])

    @classmethod
    def from_events(cls, events: Iterable[PatentCodeEvent]) -> "EventTable":
        builder = _TableBuilder()
        for ev in events:
            builder.add(ev.patent_id, ev.year, Scheme(ev.scheme), ev.code)
        return builder.finish()[0]


class _TableBuilder:
    """Interns strings and accumulates compact integer columns."""

    def __init__(self):
        self._pat: dict[str, int] = {}
        self._code: dict[str, int] = {}
        self._cols = {k: array("q") for k in ("patent", "year", "scheme", "code")}

    def add(self, patent_id: str, year: int, scheme: Scheme, code: str) -> None:
        pi = self._pat.setdefault(patent_id, len(self._pat))
        ci = self._code.setdefault(code, len(self._code))
        c = self._cols
        c["patent"].append(pi)
        c["year"].append(year)
        c["scheme"].append(_SCHEME_CODE[scheme])
        c["code"].append(ci)

    def backfill_years(self, year_of: Mapping[str, int]) -> None:
        """Overwrite the year of every row added so far with ``year_of[patent]``."""
        if not self._pat:
            return
        by_index = np.fromiter((year_of[name] for name in self._pat), dtype=np.int64, count=len(self._pat))
        year = np.frombuffer(self._cols["year"], dtype=np.int64)
        year[:] = by_index[np.frombuffer(self._cols["patent"], dtype=np.int64)]
        del year  # release the buffer so the column can grow again

    def finish(self) -> tuple[EventTable, dict]:
        """Build the canonical table; also return per-scheme duplicate counts."""
        pat_names = sorted(self._pat)
        code_names = sorted(self._code)
        pat_remap = np.empty(len(pat_names), dtype=np.int64)
        for new, name in enumerate(pat_names):
            pat_remap[self._pat[name]] = new
        code_remap = np.empty(len(code_names), dtype=np.int64)
        for new, name in enumerate(code_names):
            code_remap[self._code[name]] = new

        cols = {k: np.frombuffer(v, dtype=np.int64) if len(v) else np.zeros(0, np.int64)
                for k, v in self._cols.items()}
        patent = pat_remap[cols["patent"]] if len(pat_names) else cols["patent"]
        code = code_remap[cols["code"]] if len(code_names) else cols["code"]
        scheme, year = cols["scheme"], cols["year"]

        # one use per (scheme, patent, code, year)
        ncode = max(len(code_names), 1)
        npat = max(len(pat_names), 1)
        y0 = int(year.min()) if len(year) else 0
        nyear = int(year.max()) - y0 + 1 if len(year) else 1
        key = ((scheme * npat + patent) * ncode + code) * nyear + (year - y0)
        _, first = np.unique(key, return_index=True)
        dups = {}
        for s in SCHEMES:
            sc = _SCHEME_CODE[s]
            dups[s] = int((scheme == sc).sum() - (scheme[first] == sc).sum())
        patent, year, scheme, code = patent[first], year[first], scheme[first], code[first]
        order = np.lexsort((code, patent, year, scheme))
        table = EventTable(
            tuple(pat_names), tuple(code_names),
            patent[order].astype(np.int32), year[order].astype(np.int32),
            scheme[order].astype(np.int8), code[order].astype(np.int32),
        )
        return table, dups


def _summarize(table: EventTable, stats: IngestStats) -> None:
    stats.patents = len(np.unique(table.patent))
    for s in SCHEMES:
        sub = table.for_scheme(s)
        stats.distinct_codes_per_scheme[s] = len(np.unique(sub.code))
        stats.total_uses_per_scheme[s] = len(sub)


def ingest(
    ipc_path,
    app_reg_path=None,
    cpc_path=None,
    window: tuple[int, int] = DEFAULT_WINDOW,
    delimiter: str | None = None,
    schemes: Sequence[Scheme] = SCHEMES,
) -> tuple[EventTable, IngestStats]:
    """Read, join, deduplicate and window the three input files.

    A patent's priority year is the earliest ``prio_year`` listed for it in
    the IPC file; that year is used for all of its IPC and CPC events.
    """
    start, end = window
    if start > end:
        raise ValueError(f"window start {start} is after end {end}")
    schemes = [Scheme(s) for s in schemes]
    stats = IngestStats()
    builder = _TableBuilder()

    stats.files["ipc"] = FileStats()
    prio: dict[str, int] = {}
    for rec in read_ipc(ipc_path, delimiter, stats.files["ipc"]):
        old = prio.get(rec.pct_nbr)
        if old is None or rec.prio_year < old:
            if old is not None:
                stats.conflicting_prio_years += 1
            prio[rec.pct_nbr] = rec.prio_year
        elif rec.prio_year != old:
            stats.conflicting_prio_years += 1
        if Scheme.IPC in schemes:
            # year is provisional until the whole file has been seen
            builder.add(rec.pct_nbr, rec.prio_year, Scheme.IPC, rec.ipc_code)
    builder.backfill_years(prio)

    if Scheme.CPC in schemes:
        if app_reg_path is None or cpc_path is None:
            raise ValueError("CPC scheme requested but the app-register or CPC file is missing")
        stats.files["app_reg"] = FileStats()
        stats.files["cpc"] = FileStats()
        events = join_cpc(
            prio,
            read_app_reg(app_reg_path, delimiter, stats.files["app_reg"]),
            read_cpc(cpc_path, delimiter, stats.files["cpc"]),
            stats,
            dedup=False,
        )
        for ev in events:
            builder.add(ev.patent_id, ev.year, Scheme.CPC, ev.code)

    table, dups = builder.finish()
    stats.duplicates_collapsed = dups
    table = filter_window(table, start, end, stats)
    _summarize(table, stats)
    logger.info("ingested %d events for %d patents", len(table), stats.patents)
    return table, stats


# ---------------------------------------------------------------------------
# canonical event file

EVENT_COLUMNS = ("patent_id", "year", "scheme", "code")


def write_events(table: EventTable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\t".join(EVENT_COLUMNS) + "\n")
        for ev in table:
            fh.write(f"{ev.patent_id}\t{ev.year}\t{ev.scheme.value}\t{ev.code}\n")


def read_events(path) -> EventTable:
    def convert(f):
        try:
            scheme = Scheme(f[2].upper())
        except ValueError:
            raise RowError("bad_scheme") from None
        return PatentCodeEvent(f[0], _year(f[1]), scheme, normalize_code(f[3]))

    stats = FileStats()
    table = EventTable.from_events(parse_delimited(path, EVENT_COLUMNS, "\t", stats, convert))
    if stats.rejected_rows:
        raise SchemaError(f"event file {path} has {stats.rejected_rows} malformed rows")
    return table
