"""
Synthetic REGPAT-style fixtures with known ground truth.

The generator draws patents, priority years and code sets from a seeded
RNG, writes the three input files (with some dirty rows: duplicates,
irregular spacing, malformed lines, dangling CPC links) and a JSON sidecar
holding the exact frequency tables implied by the clean draw.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

IPC_SUBCLASSES = (
    "A01B", "A23L", "A24B", "A61K", "A61P", "B01D", "B29C", "B60K", "C07B", "C07C",
    "C07F", "C07G", "C08F", "C12M", "C12S", "C40B", "D06M", "E04B", "F16H", "G01N",
    "G06F", "H01L", "H04L", "H04W", "Y10S",
)
CPC_SUBCLASSES = IPC_SUBCLASSES + ("Y02E", "Y02P", "Y10T")

# subclass -> division; Y10S left out on purpose (falls to Co_IPC)
CONCORDANCE = (
    ("A01B", "28"), ("A23L", "10"), ("A24B", "12"), ("A61K", "21"), ("A61K 8/", "20"),
    ("A61P", "21"), ("B01D", "28"), ("B29C", "22"), ("B60K", "29"), ("C07B", "21"),
    ("C07C", "21"), ("C07F", "21"), ("C07G", "21"), ("C08F", "20"), ("C12M", "21"),
    ("C12S", "21"), ("C40B", "21"), ("D06M", "13"), ("E04B", "43"), ("F16H", "28"),
    ("G01N", "26"), ("G06F", "26"), ("G06F 8/", "62"), ("H01L", "26"), ("H04L", "26"),
    ("H04W", "26"),
)


@dataclass
class SyntheticProfile:
    patents: int = 1000
    years: tuple[int, int] = (2000, 2004)
    codes_per_patent: tuple[int, int] = (1, 6)
    ipc_vocabulary: int = 400
    cpc_vocabulary: int = 800
    skew: float = 1.1
    duplicate_rate: float = 0.02
    messy_rate: float = 0.05
    second_appln_rate: float = 0.05
    malformed_rows: int = 3
    unmatched_cpc_rows: int = 5

    def __post_init__(self):
        self.years = tuple(self.years)
        self.codes_per_patent = tuple(self.codes_per_patent)
        lo, hi = self.codes_per_patent
        if self.patents < 1 or lo < 1 or hi < lo:
            raise ValueError("patent count and codes per patent must be positive")
        if self.years[0] > self.years[1]:
            raise ValueError("profile years are reversed")
        if hi > min(self.ipc_vocabulary, self.cpc_vocabulary):
            raise ValueError("codes per patent exceed the vocabulary")


UNIFORM = dict(skew=0.0)
SKEWED = dict(skew=1.4)


def _vocabulary(rng, subclasses, size, digits, seed_codes=()):
    codes = list(dict.fromkeys(seed_codes))
    seen = set(codes)
    while len(codes) < size:
        sub = subclasses[rng.integers(len(subclasses))]
        code = f"{sub} {rng.integers(1, 40)}/{rng.integers(0, 10 ** digits):0{digits}d}"
        if code not in seen:
            seen.add(code)
            codes.append(code)
    return codes[:size]


def _weights(n, skew, rng):
    w = 1.0 / np.arange(1, n + 1) ** skew
    rng.shuffle(w)
    return w / w.sum()


def _messy(code, rng):
    sub, rest = code.split(" ", 1)
    variants = (f"{sub}   {rest}", f" {code.lower()} ", f"{sub}\t{rest}".replace("\t", "  "))
    return variants[rng.integers(len(variants))]


def _tables(patent_codes, years):
    by_year: dict[int, Counter] = {}
    for pid, codes in patent_codes.items():
        c = by_year.setdefault(years[pid], Counter())
        c.update(codes)
    return {
        str(y): sorted(Counter(cnt.values()).items())
        for y, cnt in sorted(by_year.items())
    }


def generate_synthetic(out_dir, seed: int = 0, profile: SyntheticProfile | None = None) -> dict[str, Path]:
    """Write ``ipc.txt``, ``app_reg.txt``, ``cpc.txt``, ``concordance.csv``
    and ``truth.json`` into ``out_dir`` and return their paths."""
    profile = profile or SyntheticProfile()
    rng = np.random.default_rng(seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    ctx = [f"A61K 8/{i:02d}" for i in (2, 11, 19, 25, 49)]
    dual = [f"{s} {g}/00" for s in ("C07C", "C07B", "C12M", "C40B") for g in (1, 5)]
    ipc_vocab = _vocabulary(rng, IPC_SUBCLASSES, profile.ipc_vocabulary, 2, ctx + dual)
    cpc_vocab = _vocabulary(rng, CPC_SUBCLASSES, profile.cpc_vocabulary, 3)
    ipc_w = _weights(len(ipc_vocab), profile.skew, rng)
    cpc_w = _weights(len(cpc_vocab), profile.skew, rng)

    lo, hi = profile.codes_per_patent
    y0, y1 = profile.years
    pids = [f"WO{seed % 100:02d}{i:07d}" for i in range(profile.patents)]
    years, ipc_sets, cpc_sets, applns = {}, {}, {}, {}
    next_appln = 10_000_000
    for pid in pids:
        years[pid] = int(rng.integers(y0, y1 + 1))
        k = int(rng.integers(lo, hi + 1))
        ipc_sets[pid] = sorted(ipc_vocab[i] for i in rng.choice(len(ipc_vocab), k, replace=False, p=ipc_w))
        k = int(rng.integers(lo, hi + 1))
        cpc_sets[pid] = sorted(cpc_vocab[i] for i in rng.choice(len(cpc_vocab), k, replace=False, p=cpc_w))
        n_app = 2 if rng.random() < profile.second_appln_rate else 1
        applns[pid] = [str(next_appln + j) for j in range(n_app)]
        next_appln += n_app

    ipc_rows = []
    for pid in pids:
        prio = years[pid]
        for code in ipc_sets[pid]:
            written = _messy(code, rng) if rng.random() < profile.messy_rate else code
            row = f"{pid}|{prio}|{prio + int(rng.integers(0, 3))}|{written}"
            ipc_rows.append(row)
            if rng.random() < profile.duplicate_rate:
                ipc_rows.append(row)
    for i in range(profile.malformed_rows):
        ipc_rows.append(f"{pids[i % len(pids)]}|{y0}|{y0}" if i % 2 == 0 else f"WOBAD{i}|19x8|1990|A01B 1/00")
    rng.shuffle(ipc_rows)

    reg_rows = [f"{pid}|{a}" for pid in pids for a in applns[pid]]
    rng.shuffle(reg_rows)

    cpc_rows = []
    for pid in pids:
        apps = applns[pid]
        for code in cpc_sets[pid]:
            for a in apps:
                if a == apps[0] or rng.random() < 0.5:
                    cpc_rows.append(f"{a}|{code}")
            if rng.random() < profile.duplicate_rate:
                cpc_rows.append(f"{apps[0]}|{code}")
    for i in range(profile.unmatched_cpc_rows):
        cpc_rows.append(f"9{i:08d}|Y02E 10/50")
    rng.shuffle(cpc_rows)

    paths = {
        "ipc": out / "ipc.txt",
        "app_reg": out / "app_reg.txt",
        "cpc": out / "cpc.txt",
        "concordance": out / "concordance.csv",
        "truth": out / "truth.json",
    }
    _write(paths["ipc"], "pct_nbr|prio_year|app_year|IPC", ipc_rows)
    _write(paths["app_reg"], "pct_nbr|appln_id", reg_rows)
    _write(paths["cpc"], "appln_id|CPC", cpc_rows)
    _write(paths["concordance"], "ipc_prefix,nace_division", [f"{p},{d}" for p, d in CONCORDANCE])

    truth = {
        "seed": seed,
        "profile": asdict(profile),
        "tables": {"IPC": _tables(ipc_sets, years), "CPC": _tables(cpc_sets, years)},
        "totals": {
            "IPC": {"distinct_codes": len({c for s in ipc_sets.values() for c in s}),
                    "total_uses": sum(len(s) for s in ipc_sets.values())},
            "CPC": {"distinct_codes": len({c for s in cpc_sets.values() for c in s}),
                    "total_uses": sum(len(s) for s in cpc_sets.values())},
        },
        "patents": len(pids),
        "rejected_rows": profile.malformed_rows,
        "unmatched_cpc_rows": profile.unmatched_cpc_rows,
    }
    paths["truth"].write_text(json.dumps(truth, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return paths


def _write(path: Path, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(header + "\n")
        for r in rows:
            fh.write(r + "\n")
