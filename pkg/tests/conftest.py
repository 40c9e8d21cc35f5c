import json

import pytest

from geolocdns.topology import from_dict

_results = {}
_notes = []

SERVICE = "myservice.com"


def two_edge_doc():
    """Two edges, eleven areas (4 for edge A, 7 for edge B), one cloud."""
    areas = []
    for i in range(4):
        areas.append({"id": f"A{i}", "lat_deg": 46.62, "lon_deg": round(14.25 + 0.02 * i, 6),
                      "radius_m": 500, "edge": "edgeA.myservice.com"})
    for i in range(7):
        areas.append({"id": f"B{i}", "lat_deg": 46.65, "lon_deg": round(14.25 + 0.02 * i, 6),
                      "radius_m": 500, "edge": "edgeB.myservice.com", "ttl_s": 60})
    return {
        "service": SERVICE,
        "edges": [{"hostname": "edgeA.myservice.com", "address": "10.0.0.1"},
                  {"hostname": "edgeB.myservice.com", "address": "10.0.0.2"}],
        "clouds": [{"hostname": "cloud.myservice.com", "address": "192.0.2.10"}],
        "areas": areas,
    }


def loc_example_doc():
    """The single-edge example: 28 43 N, 128 12 W, 200 m, 20 m size."""
    return {
        "service": SERVICE,
        "edges": [{"hostname": "edgeA.myservice.com", "address": "10.0.0.1"}],
        "clouds": [{"hostname": "cloud.myservice.com", "address": "192.0.2.10"}],
        "areas": [{"id": "example", "lat_deg": 28 + 43 / 60, "lon_deg": -128.2, "height_m": 200.0,
                   "radius_m": 10.0, "edge": "edgeA.myservice.com"}],
    }


@pytest.fixture
def acceptance_note():
    """Append a line to the acceptance summary printed at the end of the run."""
    return _notes.append


@pytest.fixture
def two_edge_topology():
    return from_dict(two_edge_doc())


@pytest.fixture
def two_edge_config(tmp_path):
    path = tmp_path / "two_edge.json"
    path.write_text(json.dumps(two_edge_doc()))
    return path


@pytest.fixture
def loc_example_config(tmp_path):
    path = tmp_path / "loc_example.json"
    path.write_text(json.dumps(loc_example_doc()))
    return path


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        n = marker.args[0]
        prev = _results.get(n, "PASS")
        _results[n] = "PASS" if prev == "PASS" and report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        terminalreporter.write_line(f"criterion {n}: {_results[n]}")
    for line in _notes:
        terminalreporter.write_line(line)
