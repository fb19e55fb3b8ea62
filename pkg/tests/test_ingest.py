import io
import random

import pytest
from hypothesis import given, strategies as st

from techineq.ingest import (IPC_COLUMNS, EventTable, FileStats, IngestStats, PatentCodeEvent,
                             RawAppRegRecord, RawCpcRecord, RawIpcRecord, SchemaError, Scheme,
                             filter_window, ingest, join_cpc, normalize_code, parse_delimited,
                             read_events, read_ipc, sniff_delimiter, write_events)


def _bytes(text):
    return io.BytesIO(text.encode("utf-8"))


def test_parse_pipe_row_maps_fields():
    src = _bytes("pct_nbr|prio_year|app_year|IPC\nWO0001|1978|1979|C07C 5/00\n")
    assert list(read_ipc(src)) == [RawIpcRecord("WO0001", 1978, 1979, "C07C 5/00")]


def test_missing_column_is_fatal():
    src = _bytes("prio_year|app_year|IPC\n1978|1979|C07C 5/00\n")
    with pytest.raises(SchemaError, match="pct_nbr"):
        list(read_ipc(src))


def test_column_order_free_and_extra_columns_ignored():
    src = _bytes("IPC;junk;app_year;pct_nbr;prio_year\nA01B 1/00;x;1990;WO9;1989\n")
    assert list(read_ipc(src)) == [RawIpcRecord("WO9", 1989, 1990, "A01B 1/00")]


@pytest.mark.parametrize("delim", [",", ";", "|", "\t"])
def test_sniffed_delimiters(delim):
    header = delim.join(IPC_COLUMNS)
    assert sniff_delimiter(header) == delim
    src = _bytes(header + "\n" + delim.join(["WO1", "2001", "2002", "H04L 9/00"]) + "\n")
    assert list(read_ipc(src))[0].ipc_code == "H04L 9/00"


def test_wrong_field_count_rows_rejected_not_fatal():
    rng = random.Random(7)
    bad = set(rng.sample(range(1000), 3))
    lines = ["pct_nbr|prio_year|app_year|IPC"]
    for i in range(1000):
        if i in bad:
            lines.append(f"WO{i}|1990|1991")
        else:
            lines.append(f"WO{i}|1990|1991|A01B {i % 30}/00")
    stats = FileStats()
    records = list(read_ipc(_bytes("\n".join(lines) + "\n"), stats=stats))
    assert len(records) == 997
    assert stats.rejected_rows == 3
    assert stats.rejected["field_count"] == 3
    assert stats.rows_in == stats.records_out + stats.rejected_rows


def test_unparseable_year_rejected():
    stats = FileStats()
    src = _bytes("pct_nbr|prio_year|app_year|IPC\nWO1|78|1979|A\nWO2|1978|1979|B\n")
    assert [r.pct_nbr for r in read_ipc(src, stats=stats)] == ["WO2"]
    assert stats.rejected == {"bad_year": 1}


def test_generic_parse_returns_schema_fields():
    src = _bytes("b,a,c\n2,1,3\n")
    assert list(parse_delimited(src, ["a", "c"])) == [["1", "3"]]


def test_normalize_code():
    assert normalize_code("  c07c   5/00 ") == "C07C 5/00"
    assert normalize_code("A61K\t8/02") == "A61K 8/02"


def test_join_single_link():
    events = list(join_cpc({"WO1": 1980}, [RawAppRegRecord("WO1", "A9")],
                           [RawCpcRecord("A9", "Y02E 10/50")]))
    assert events == [PatentCodeEvent("WO1", 1980, Scheme.CPC, "Y02E 10/50")]


def test_join_application_shared_by_patents():
    reg = [RawAppRegRecord("WO2", "A9"), RawAppRegRecord("WO1", "A9"), RawAppRegRecord("WO2", "A9"),
           RawAppRegRecord("WO3", "A9")]
    stats = IngestStats()
    events = list(join_cpc({"WO1": 1980, "WO2": 1981}, reg, [RawCpcRecord("A9", "Y02E 10/50")], stats))
    assert events == [PatentCodeEvent("WO1", 1980, Scheme.CPC, "Y02E 10/50"),
                      PatentCodeEvent("WO2", 1981, Scheme.CPC, "Y02E 10/50")]
    assert not stats.unmatched_cpc


def test_join_dangling_appln_counted():
    stats = IngestStats()
    events = list(join_cpc({"WO1": 1980}, [RawAppRegRecord("WO1", "A9")],
                           [RawCpcRecord("A7", "Y02E 10/50")], stats))
    assert events == []
    assert sum(stats.unmatched_cpc.values()) == 1


def test_join_duplicate_code_collapses():
    events = list(join_cpc({"WO1": 1980}, [RawAppRegRecord("WO1", "A9")],
                           [RawCpcRecord("A9", "Y02E 10/50")] * 2))
    assert len(events) == 1


def test_filter_window_boundaries():
    evs = [PatentCodeEvent("P", y, Scheme.IPC, "A") for y in (1976, 1977, 2018, 2019)]
    stats = IngestStats()
    kept = list(filter_window(evs, 1977, 2018, stats))
    assert [e.year for e in kept] == [1977, 2018]
    assert stats.excluded_by_window == 2
    assert list(filter_window([], 1977, 2018)) == []
    with pytest.raises(ValueError):
        filter_window(evs, 2000, 1999)


def test_filter_window_on_table():
    evs = [PatentCodeEvent(f"P{y}", y, Scheme.IPC, "A") for y in (1976, 1977, 2018, 2019)]
    t = filter_window(EventTable.from_events(evs), 1977, 2018)
    assert t.years() == [1977, 2018]


def test_ingest_mini_fixture(mini_dir):
    table, stats = ingest(mini_dir / "ipc.txt", mini_dir / "app_reg.txt", mini_dir / "cpc.txt")
    ev = set(table)
    assert PatentCodeEvent("WO1", 1980, Scheme.IPC, "A61K 8/02") in ev
    assert PatentCodeEvent("WO4", 1980, Scheme.CPC, "H04L 9/00") in ev
    # 1976 patent is outside the default window
    assert not any(e.patent_id == "WO5" for e in ev)
    assert stats.total_uses_per_scheme == {Scheme.IPC: 6, Scheme.CPC: 3}
    assert stats.distinct_codes_per_scheme == {Scheme.IPC: 4, Scheme.CPC: 2}
    assert stats.patents == 4
    assert stats.files["ipc"].rejected == {"bad_year": 1, "field_count": 1}
    assert stats.unmatched_cpc == {"no_register_link": 1}
    assert stats.excluded_by_window == 2
    for fs in stats.files.values():
        assert fs.rows_in == fs.records_out + fs.rejected_rows


def _write(tmp_path, name, header, rows):
    p = tmp_path / name
    p.write_text(header + "\n" + "".join(r + "\n" for r in rows), encoding="utf-8")
    return p


def _random_inputs(seed, n=60):
    rng = random.Random(seed)
    ipc, reg, cpc = [], [], []
    for i in range(n):
        pid = f"WO{i:04d}"
        year = rng.randint(1975, 1985)
        for _ in range(rng.randint(1, 4)):
            ipc.append(f"{pid}|{year}|{year + 1}|A0{rng.randint(1, 3)}B {rng.randint(1, 9)}/00")
        reg.append(f"{pid}|AP{i}")
        for _ in range(rng.randint(0, 3)):
            cpc.append(f"AP{i}|Y02E {rng.randint(1, 5)}/10")
    cpc.append("AP_NONE|Y02E 1/10")
    return ipc, reg, cpc


def _ingest_rows(tmp_path, ipc, reg, cpc):
    a = _write(tmp_path, "ipc.txt", "pct_nbr|prio_year|app_year|IPC", ipc)
    b = _write(tmp_path, "reg.txt", "pct_nbr|appln_id", reg)
    c = _write(tmp_path, "cpc.txt", "appln_id|CPC", cpc)
    return ingest(a, b, c)[0]


@given(st.integers(0, 10_000), st.randoms())
def test_join_determinism_any_row_order(tmp_path_factory, seed, rnd):
    ipc, reg, cpc = _random_inputs(seed)
    base = _ingest_rows(tmp_path_factory.mktemp("a"), ipc, reg, cpc)
    for rows in (ipc, reg, cpc):
        rnd.shuffle(rows)
    shuffled = _ingest_rows(tmp_path_factory.mktemp("b"), ipc, reg, cpc)
    assert list(base) == list(shuffled)


def test_dedup_idempotence(tmp_path):
    ipc, reg, cpc = _random_inputs(3)
    (tmp_path / "once").mkdir()
    (tmp_path / "twice").mkdir()
    once = _ingest_rows(tmp_path / "once", ipc, reg, cpc)
    twice = _ingest_rows(tmp_path / "twice", ipc + ipc, reg + reg, cpc + cpc)
    assert list(once) == list(twice)


def test_earliest_priority_year_wins(tmp_path):
    a = _write(tmp_path, "ipc.txt", "pct_nbr|prio_year|app_year|IPC",
               ["WO1|1990|1991|A01B 1/00", "WO1|1989|1991|A01B 2/00"])
    table, stats = ingest(a, schemes=[Scheme.IPC])
    assert {e.year for e in table} == {1989}
    assert stats.conflicting_prio_years == 1


def test_event_file_round_trip(tmp_path, mini_dir):
    table, _ = ingest(mini_dir / "ipc.txt", mini_dir / "app_reg.txt", mini_dir / "cpc.txt")
    path = tmp_path / "events.tsv"
    write_events(table, path)
    assert path.read_text().splitlines()[0] == "patent_id\tyear\tscheme\tcode"
    assert read_events(path) == table


def test_cpc_requested_without_files(mini_dir):
    with pytest.raises(ValueError):
        ingest(mini_dir / "ipc.txt")
