"""Latency benchmarks: area scan time by list length, and end-to-end lookups.

Raw samples are kept (milliseconds, one per line) next to the summary CSV so
every statistic can be recomputed.  No outlier rejection is applied.
"""
from __future__ import annotations

import contextlib
import csv
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .authserver import ServerConfig, serve
from .dnsmsg import DnsError, RRType, as_name, make_query, query_roundtrip
from .geodesy import DEFAULT_ELLIPSOID, AreaTable, locate_first
from ._scan import DEFAULT_BACKEND, available_backends
from .topology import SYNTH_ORIGIN, ServiceTopology, square_point, synth_topology

DEFAULT_LENGTHS = tuple(range(25, 401, 25))
DEFAULT_ITERATIONS = 100
WARMUP = 5
POOL_SIZE = 400
POOL_EXTENT_KM2 = 20.0
POOL_RADIUS_M = 125.0

AREA_HEADER = ["list_length", "mean_ms", "median_ms", "max_ms", "stddev_ms", "p90_ms"]
E2E_HEADER = ["server", "with_loc", "n", "failures", "mean_ms", "stddev_ms", "max_ms"]

PUBLIC_RESOLVERS = {
    "opendns": ("208.67.222.222", 53),
    "cloudflare": ("1.1.1.1", 53),
    "google": ("8.8.8.8", 53),
    "quad9": ("9.9.9.9", 53),
}


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class StatRow:
    list_length: int
    mean_ms: float
    median_ms: float
    max_ms: float
    stddev_ms: float
    p90_ms: float


@dataclass(frozen=True)
class E2ERow:
    server_label: str
    with_loc: bool
    n: int
    failures: int
    mean_ms: float
    stddev_ms: float
    max_ms: float


def aggregate(samples: Sequence[float]) -> Tuple[float, float, float, float, float]:
    """(mean, median, max, sample stddev, nearest-rank p90) of ``samples``.

    Mean and variance are computed exactly in rationals and rounded once.
    """
    n = len(samples)
    if n < 2:
        raise InsufficientData(f"need at least 2 samples, got {n}")
    xs = sorted(samples)
    exact = [Fraction(x) for x in xs]
    mean = sum(exact) / n
    var = sum((x - mean) ** 2 for x in exact) / (n - 1)
    mid = n // 2
    median = xs[mid] if n % 2 else float((exact[mid - 1] + exact[mid]) / 2)
    p90 = xs[math.ceil(Fraction(9, 10) * n) - 1]
    return float(mean), median, xs[-1], math.sqrt(float(var)), p90


@dataclass
class AreaBenchResult:
    rows: List[StatRow]
    raw: Dict[int, List[float]]
    verdicts: Dict[int, List[Optional[int]]]
    backend: str


def bench_area(lengths: Sequence[int] = DEFAULT_LENGTHS, iterations: int = DEFAULT_ITERATIONS,
               seed: int = 42, backend: Optional[str] = None,
               params=DEFAULT_ELLIPSOID) -> AreaBenchResult:
    """Time the first-match scan for each list length.

    The pool is a seeded 400-area topology over ~20 km2 (125 m radii, so the 400 circles add up to ~20 km2).  For
    each length L the first L areas are scanned for ``iterations`` user
    positions drawn uniformly from the same square.  Only the scan is timed.
    """
    if iterations < 2:
        raise InsufficientData(f"need at least 2 iterations, got {iterations}")
    pool = synth_topology(max(POOL_SIZE, max(lengths)), POOL_EXTENT_KM2, POOL_RADIUS_M, seed)
    geometries = [a.geometry for a in pool.areas]
    rng = random.Random(seed + 1)
    clock = time.perf_counter_ns
    rows, raw, verdicts = [], {}, {}
    for length in lengths:
        table = AreaTable(geometries[:length])
        users = [square_point(rng, SYNTH_ORIGIN, POOL_EXTENT_KM2)
                 for _ in range(iterations)]
        for u in users[:WARMUP]:
            locate_first(u, table, params, backend)
        samples, found = [], []
        for u in users:
            t0 = clock()
            hit = locate_first(u, table, params, backend)
            t1 = clock()
            samples.append((t1 - t0) / 1e6)
            found.append(hit)
        raw[length] = samples
        verdicts[length] = found
        rows.append(StatRow(length, *aggregate(samples)))
    return AreaBenchResult(rows, raw, verdicts,
                           DEFAULT_BACKEND if backend in (None, "auto") else backend)


@dataclass(frozen=True)
class Endpoint:
    label: str
    address: Tuple[str, int]
    with_loc: bool = True
    service: Optional[str] = None


@dataclass
class E2EResult:
    rows: List[E2ERow]
    raw: Dict[Tuple[str, bool], List[float]] = field(default_factory=dict)


def bench_e2e(servers: Sequence[Endpoint], n: int = 100, delay: float = 3.0,
              service: str = "", timeout: float = 2.0,
              sleep=time.sleep) -> E2EResult:
    """``n`` spaced lookups per endpoint; timeouts count as failures."""
    rows, raw = [], {}
    for ep in servers:
        query_name = as_name(ep.service or service)
        samples, failures = [], 0
        for i in range(n):
            if i and delay > 0:
                sleep(delay)
            try:
                _, elapsed = query_roundtrip(ep.address, make_query(query_name, RRType.A), timeout)
            except DnsError:
                failures += 1
                continue
            samples.append(elapsed * 1000)
        raw[(ep.label, ep.with_loc)] = samples
        mean, _, mx, sd, _ = aggregate(samples)
        rows.append(E2ERow(ep.label, ep.with_loc, len(samples), failures, mean, sd, mx))
    return E2EResult(rows, raw)


@contextlib.contextmanager
def hermetic_servers(topology: ServiceTopology, host: str = "127.0.0.1"):
    """Two local servers for ``topology``: with and without LOC records."""
    with contextlib.ExitStack() as stack:
        endpoints = []
        for include_loc in (True, False):
            handle = stack.enter_context(
                serve(ServerConfig(topology, (host, 0), include_loc=include_loc)))
            label = "local-loc" if include_loc else "local-noloc"
            endpoints.append(Endpoint(label, handle.address, include_loc))
        yield endpoints


def _num(x):
    return repr(float(x))


def write_area_csv(result: AreaBenchResult, out_dir) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "area.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(AREA_HEADER)
        for r in result.rows:
            w.writerow([r.list_length, _num(r.mean_ms), _num(r.median_ms), _num(r.max_ms),
                        _num(r.stddev_ms), _num(r.p90_ms)])
    for length, samples in result.raw.items():
        write_raw(out_dir / f"raw_area_{length}.csv", samples)
    return path


def write_e2e_csv(result: E2EResult, out_dir) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "e2e.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(E2E_HEADER)
        for r in result.rows:
            w.writerow([r.server_label, str(r.with_loc).lower(), r.n, r.failures,
                        _num(r.mean_ms), _num(r.stddev_ms), _num(r.max_ms)])
    for (label, with_loc), samples in result.raw.items():
        write_raw(out_dir / f"raw_e2e_{label}_{'loc' if with_loc else 'noloc'}.csv", samples)
    return path


def write_raw(path: Path, samples: Sequence[float]) -> None:
    path.write_text("".join(_num(s) + "\n" for s in samples))


def read_raw(path) -> List[float]:
    return [float(line) for line in Path(path).read_text().split()]


def format_area_table(rows: Sequence[StatRow]) -> str:
    lines = [f"{'length':>6} {'mean':>9} {'median':>9} {'max':>9} {'stddev':>9} {'p90':>9}  (ms)"]
    for r in rows:
        lines.append(f"{r.list_length:>6} {r.mean_ms:9.4f} {r.median_ms:9.4f} {r.max_ms:9.4f} "
                     f"{r.stddev_ms:9.4f} {r.p90_ms:9.4f}")
    return "\n".join(lines)


def format_e2e_table(rows: Sequence[E2ERow]) -> str:
    lines = [f"{'server':<14} {'loc':<5} {'n':>4} {'fail':>4} {'mean':>9} {'stddev':>9} {'max':>9}  (ms)"]
    for r in rows:
        lines.append(f"{r.server_label:<14} {str(r.with_loc).lower():<5} {r.n:>4} {r.failures:>4} "
                     f"{r.mean_ms:9.4f} {r.stddev_ms:9.4f} {r.max_ms:9.4f}")
    return "\n".join(lines)


def compare_backends(lengths: Sequence[int] = DEFAULT_LENGTHS, iterations: int = DEFAULT_ITERATIONS,
                     seed: int = 42) -> Dict[str, AreaBenchResult]:
    return {b: bench_area(lengths, iterations, seed, backend=b) for b in available_backends()}
