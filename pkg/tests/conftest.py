import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")

# frequency-of-frequencies tables for 1978
TABLE1_IPC = [(1, 3260), (2, 521), (3, 116), (4, 48), (5, 19), (6, 4), (7, 2), (8, 3),
              (9, 3), (12, 2), (18, 1)]
TABLE1_CPC = [(1, 3791), (2, 338), (3, 55), (4, 54), (5, 14), (6, 6), (7, 4), (8, 2),
              (9, 2), (11, 1), (13, 1), (15, 1)]

# NACE division -> total uses 1977-2018, and the published percentages
TABLE2 = {
    "10": (111635, "0.82"), "11": (14525, "0.11"), "12": (13184, "0.10"),
    "13": (55587, "0.41"), "14": (18107, "0.13"), "15": (20072, "0.15"),
    "16": (4619, "0.03"), "17": (33574, "0.25"), "18": (31817, "0.23"),
    "19": (46484, "0.34"), "20": (1648487, "12.11"), "21": (2383402, "17.50"),
    "22": (192728, "1.42"), "23": (234959, "1.73"), "24": (143390, "1.05"),
    "25": (176859, "1.30"), "26": (3578270, "26.28"), "27": (880316, "6.47"),
    "28": (1947629, "14.30"), "29": (460651, "3.38"), "30": (102954, "0.76"),
    "31": (40781, "0.30"), "32": (1138554, "8.36"), "42": (12501, "0.09"),
    "43": (79148, "0.58"), "62": (139336, "1.02"), "Co_IPC": (105985, "0.78"),
}
TABLE2_TOTAL = 13_615_554

_acceptance = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _acceptance[name] = report.outcome
    elif report.when == "setup" and report.outcome != "passed" and "test_acceptance.py" in report.nodeid:
        _acceptance[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance):
        mark = "PASS" if _acceptance[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"{mark}  {name}")


@pytest.fixture
def mini_dir():
    from pathlib import Path
    return Path(__file__).parent / "fixtures" / "mini"
