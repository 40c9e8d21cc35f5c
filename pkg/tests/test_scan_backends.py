import os
import random
import subprocess
import sys
from array import array

import pytest

from geolocdns import _pyscan, _scan
from geolocdns.geodesy import AreaGeometry, AreaTable, GeoPoint, locate_first

compiled = pytest.mark.skipif("compiled" not in _scan.available_backends(),
                              reason="extension not built")


@compiled
def test_plane_xy_bitwise_equal():
    from geolocdns import _kernels
    rng = random.Random(3)
    for _ in range(5000):
        args = (rng.uniform(-90, 90), rng.uniform(-180, 180), rng.uniform(-500, 9000),
                6378137.0, 0.01671)
        assert _kernels.plane_xy(*args) == _pyscan.plane_xy(*args)


@compiled
def test_scan_backends_agree():
    rng = random.Random(11)
    for _ in range(300):
        n = rng.randrange(0, 60)
        areas = [AreaGeometry(GeoPoint(46.6 + rng.uniform(-0.05, 0.05), 14.3 + rng.uniform(-0.05, 0.05)),
                              rng.uniform(10, 1500)) for _ in range(n)]
        table = AreaTable(areas)
        u = GeoPoint(46.6 + rng.uniform(-0.06, 0.06), 14.3 + rng.uniform(-0.06, 0.06))
        assert locate_first(u, table, backend="compiled") == locate_first(u, table, backend="python")


@compiled
def test_compiled_rejects_ragged_columns():
    from geolocdns import _kernels
    with pytest.raises(ValueError):
        _kernels.scan_first(0, 0, 0, array("d", [0, 1]), array("d", [0]), array("d", [0, 1]),
                            array("d", [1, 1]), 6378137.0, 0.01671)


def test_unknown_backend():
    with pytest.raises(ValueError):
        locate_first(GeoPoint(0, 0), [], backend="gpu")


def test_env_forces_python_fallback():
    out = subprocess.run(
        [sys.executable, "-c", "from geolocdns import _scan; print(_scan.DEFAULT_BACKEND)"],
        env={**os.environ, "GEOLOCDNS_PURE_PYTHON": "1"}, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
