"""
IPC to NACE division concordance.

Each IPC code occurrence is assigned one 2-digit NACE division by
longest-prefix match against a concordance table, with one built-in
context rule: codes of a few chemistry subclasses (and C12M) belong to
NACE 20 (C12M: NACE 32) when their patent also carries an A61K 8/ code,
and to NACE 21 otherwise. Codes matching no prefix fall into ``Co_IPC``.
"""
from __future__ import annotations

import csv
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, NamedTuple

from .decomposition import PartitionedDistribution
from .frequency import FrequencyDistribution
from .ingest import EventTable, Scheme, SchemaError, normalize_code, sniff_delimiter

CO_IPC = "Co_IPC"
DIVISIONS = tuple(str(d) for d in range(10, 33)) + ("42", "43", "62", CO_IPC)
_ALIASES = {"CO_IPC": CO_IPC, "CO-IPC": CO_IPC, "COIPC": CO_IPC, "CO IPC": CO_IPC}
CONCORDANCE_COLUMNS = ("ipc_prefix", "nace_division")

_KEY = re.compile(r"^([A-Z]\d{2}[A-Z])(\d*)(.*)$")


class ConcordanceError(ValueError):
    pass


def division_label(text: str) -> str:
    """Canonical division label, or ConcordanceError if unknown."""
    t = text.strip()
    if t.upper() in _ALIASES:
        return CO_IPC
    if t.isdigit():
        t = str(int(t))
    if t not in DIVISIONS:
        raise ConcordanceError(f"unknown NACE division {text!r}")
    return t


@lru_cache(maxsize=1 << 18)
def ipc_key(code: str) -> str:
    """Spacing- and padding-insensitive matching key for an IPC symbol.

    ``"A61K 8/02"``, ``"A61K0008/02"`` and ``"a61k   8/02"`` all map to
    ``"A61K8/02"``. Leading zeros of the main group are dropped.
    """
    s = normalize_code(code).replace(" ", "")
    m = _KEY.match(s)
    if not m:
        return s
    subclass, group, rest = m.groups()
    if group:
        group = group.lstrip("0") or "0"
    return subclass + group + rest


@dataclass(frozen=True)
class ConcordanceTable:
    entries: tuple[tuple[str, str], ...]
    _by_key: dict = field(init=False, repr=False, compare=False)
    _cache: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.entries:
            raise ConcordanceError("empty concordance table")
        by_key: dict[str, str] = {}
        for prefix, div in self.entries:
            div = division_label(div)
            k = ipc_key(prefix)
            if not k:
                raise ConcordanceError("empty IPC prefix")
            if by_key.get(k, div) != div:
                raise ConcordanceError(f"prefix {prefix!r} mapped to both {by_key[k]} and {div}")
            by_key[k] = div
        object.__setattr__(self, "_by_key", by_key)
        object.__setattr__(self, "_cache", {})

    @property
    def max_prefix(self) -> int:
        return max(len(k) for k in self._by_key)

    def lookup(self, code: str) -> str:
        """Division of the longest matching prefix, else ``Co_IPC``."""
        hit = self._cache.get(code)
        if hit is not None:
            return hit
        key = ipc_key(code)
        div = CO_IPC
        for i in range(min(len(key), self.max_prefix), 0, -1):
            d = self._by_key.get(key[:i])
            if d is not None:
                div = d
                break
        self._cache[code] = div
        return div


def load_concordance(source, delimiter: str | None = None) -> ConcordanceTable:
    """Read a two-column ``ipc_prefix, nace_division`` file.

    Raises ConcordanceError naming the offending row for unknown division
    labels or conflicting duplicate prefixes, and for an empty table.
    """
    opened = isinstance(source, (str, bytes)) or hasattr(source, "__fspath__")
    fh = open(source, encoding="utf-8", newline="") if opened else source
    try:
        header_line = fh.readline().rstrip("\r\n").lstrip("﻿")
        if not header_line:
            raise ConcordanceError("empty concordance file")
        delim = delimiter or sniff_delimiter(header_line)
        header = [c.strip() for c in next(csv.reader([header_line], delimiter=delim))]
        for col in CONCORDANCE_COLUMNS:
            if col not in header:
                raise SchemaError(f"missing required column {col!r} in concordance header")
        ip, dp = header.index("ipc_prefix"), header.index("nace_division")
        entries: list[tuple[str, str]] = []
        seen: dict[str, tuple[int, str]] = {}
        for lineno, row in enumerate(csv.reader(fh, delimiter=delim), start=2):
            if not row or not "".join(row).strip():
                continue
            if len(row) != len(header):
                raise ConcordanceError(f"row {lineno}: expected {len(header)} fields, got {len(row)}")
            prefix = normalize_code(row[ip])
            try:
                div = division_label(row[dp])
            except ConcordanceError as err:
                raise ConcordanceError(f"row {lineno}: {err}") from None
            k = ipc_key(prefix)
            if k in seen and seen[k][1] != div:
                raise ConcordanceError(
                    f"row {lineno}: prefix {prefix!r} conflicts with row {seen[k][0]} ({seen[k][1]} vs {div})")
            seen.setdefault(k, (lineno, div))
            entries.append((prefix, div))
    finally:
        if opened:
            fh.close()
    if not entries:
        raise ConcordanceError("empty concordance table")
    return ConcordanceTable(tuple(entries))


@dataclass(frozen=True)
class ConditionalRule:
    trigger_subclasses: frozenset = frozenset({"C07B", "C07C", "C07F", "C07G", "C12S", "C40B"})
    special_subclass: str = "C12M"
    context_group: str = "A61K008/"
    with_context_division: str = "20"
    special_with_context_division: str = "32"
    without_context_division: str = "21"

    @property
    def dual_subclasses(self) -> frozenset:
        return self.trigger_subclasses | {self.special_subclass}

    def is_context(self, code: str) -> bool:
        return ipc_key(code).startswith(ipc_key(self.context_group))

    def subclass(self, code: str) -> str:
        return ipc_key(code)[:4]

    def is_dual(self, code: str) -> bool:
        return self.subclass(code) in self.dual_subclasses

    def division(self, code: str, context: bool) -> str:
        if not context:
            return self.without_context_division
        if self.subclass(code) == self.special_subclass:
            return self.special_with_context_division
        return self.with_context_division


DEFAULT_RULE = ConditionalRule()


class ClassifiedEvent(NamedTuple):
    patent_id: str
    year: int
    code: str
    division: str
    context_flag: bool


def classify(events, table: ConcordanceTable, rule: ConditionalRule = DEFAULT_RULE) -> set[ClassifiedEvent]:
    """Classify the IPC events of a single patent.

    The context flag is set when any of the patent's codes lies in the
    A61K 8/ group; it decides the division of dual-classified subclasses.
    """
    events = list(events)
    if not events:
        return set()
    pids = {e.patent_id for e in events}
    if len(pids) != 1:
        raise ValueError(f"classify expects one patent, got {len(pids)}")
    if any(Scheme(e.scheme) is not Scheme.IPC for e in events):
        raise ValueError("only IPC events can be classified")
    context = any(rule.is_context(e.code) for e in events)
    out = set()
    for e in events:
        if rule.is_dual(e.code):
            div = rule.division(e.code, context)
        else:
            div = table.lookup(e.code)
        out.add(ClassifiedEvent(e.patent_id, e.year, e.code, div, context))
    return out


def classify_table(events: EventTable, table: ConcordanceTable,
                   rule: ConditionalRule = DEFAULT_RULE) -> list[ClassifiedEvent]:
    """Classify every IPC event of a table, patent by patent, in table order."""
    out: list[ClassifiedEvent] = []
    dual_cache: dict[str, bool] = {}
    ctx_cache: dict[str, bool] = {}
    for pid, year, codes in events.iter_patents(Scheme.IPC):
        context = False
        for c in codes:
            f = ctx_cache.get(c)
            if f is None:
                f = ctx_cache[c] = rule.is_context(c)
            context = context or f
        for c in codes:
            d = dual_cache.get(c)
            if d is None:
                d = dual_cache[c] = rule.is_dual(c)
            div = rule.division(c, context) if d else table.lookup(c)
            out.append(ClassifiedEvent(pid, year, c, div, context))
    return out


def split_identity(code: str, division: str) -> str:
    """Code identity of a dual-classified symbol in one division context."""
    return f"{code} @{division}"


def partition(classified: Iterable[ClassifiedEvent], year: int, split_dual: bool = True,
              rule: ConditionalRule = DEFAULT_RULE) -> PartitionedDistribution:
    """Split one year's classified IPC uses into per-division distributions.

    With ``split_dual`` a dual-classified symbol becomes one code identity
    per division it was used under. Without it, all its uses stay under the
    plain symbol, placed in the division that got most of its uses that
    year (ties go to the no-context division, NACE 21).
    """
    per_div: dict[str, Counter] = defaultdict(Counter)
    dual_uses: dict[str, Counter] = defaultdict(Counter)
    seen: set[tuple[str, str]] = set()
    for ev in classified:
        if ev.year != year:
            raise ValueError(f"event of year {ev.year} in partition of year {year}")
        if (ev.patent_id, ev.code) in seen:
            continue
        seen.add((ev.patent_id, ev.code))
        if rule.is_dual(ev.code):
            dual_uses[ev.code][ev.division] += 1
        else:
            per_div[ev.division][ev.code] += 1
    for code, by_div in dual_uses.items():
        if split_dual:
            for div, c in by_div.items():
                per_div[div][split_identity(code, div)] += c
        else:
            top = max(by_div.values())
            winners = sorted(d for d, c in by_div.items() if c == top)
            div = rule.without_context_division if rule.without_context_division in winners else winners[0]
            per_div[div][code] += sum(by_div.values())
    subsets = {
        div: FrequencyDistribution(year, Scheme.IPC, dict(sorted(per_div[div].items())))
        for div in sorted(per_div)
    }
    meta = {"split_dual": str(split_dual).lower()}
    if not split_dual:
        meta["unsplit_assignment"] = "majority division per year, ties to NACE 21"
    return PartitionedDistribution(year, subsets, meta)


def partition_by_year(classified: Iterable[ClassifiedEvent], split_dual: bool = True,
                      rule: ConditionalRule = DEFAULT_RULE) -> dict[int, PartitionedDistribution]:
    by_year: dict[int, list[ClassifiedEvent]] = defaultdict(list)
    for ev in classified:
        by_year[ev.year].append(ev)
    return {y: partition(by_year[y], y, split_dual, rule) for y in sorted(by_year)}
