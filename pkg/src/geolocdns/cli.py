"""geolocdns command line.

Exit codes: 0 success, 1 domain failure (invalid topology, no usable
instance, too few samples), 2 input or environment failure, 3 timeout.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import signal
import sys
from pathlib import Path

from . import bench
from ._scan import available_backends
from .authserver import DEFAULT_BIND, BindError, ServerConfig, serve
from .discovery import (CloudSelection, DiscoveryError, FixedPosition, discover)
from .dnsmsg import ServerFailure, Timeout, parse_endpoint
from .geodesy import DEFAULT_ELLIPSOID, GeoPoint, locate_first
from .topology import (ConfigError, InvalidTopology, dump_config, from_dict, generate_zone,
                       load_config, synth_topology, validate)

EXIT_OK, EXIT_DOMAIN, EXIT_INPUT, EXIT_TIMEOUT = 0, 1, 2, 3
SERVER_ENV = "GEOLOC_DNS_SERVER"


def _default_server():
    return os.environ.get(SERVER_ENV, f"{DEFAULT_BIND[0]}:{DEFAULT_BIND[1]}")


def _endpoint(text):
    try:
        host, port = parse_endpoint(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected HOST:PORT, got {text!r}") from None
    if not 0 <= port <= 65535:
        raise argparse.ArgumentTypeError(f"port out of range: {port}")
    return host, port


def _lengths(text):
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("list lengths must be positive")
    return values


def _read_config_text(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read: {exc.strerror or exc}") from None


def _load(path):
    return load_config(_read_config_text(path))


def _position(args):
    return GeoPoint(args.lat, args.lon, args.height)


def cmd_validate(args):
    doc = _read_config_text(args.config)
    try:
        t = from_dict(json.loads(doc))
    except json.JSONDecodeError as exc:
        raise ConfigError(args.config, f"invalid JSON: {exc}") from None
    violations = validate(t)
    for v in violations:
        print(v)
    return EXIT_DOMAIN if violations else EXIT_OK


def cmd_zonegen(args):
    zone = generate_zone(_load(args.config))
    if args.out in (None, "-"):
        sys.stdout.write(zone)
    else:
        Path(args.out).write_text(zone)
    return EXIT_OK


def _interrupt(signum, frame):
    raise KeyboardInterrupt


def cmd_serve(args):
    cfg = ServerConfig(_load(args.config), args.server or DEFAULT_BIND, include_loc=not args.no_loc)
    signal.signal(signal.SIGTERM, _interrupt)
    handle = serve(cfg)
    try:
        host, port = handle.address
        print(f"serving {cfg.topology.service_name} on {host}:{port}"
              f" ({'with' if cfg.include_loc else 'without'} LOC)", flush=True)
        handle.wait()
    except KeyboardInterrupt:
        pass
    finally:
        handle.stop()
    return EXIT_OK


def cmd_discover(args):
    server = args.server or _endpoint(_default_server())
    result = discover(args.service, FixedPosition(_position(args)), server,
                      timeout=args.timeout / 1000.0)
    sel = result.selection
    print(json.dumps({
        "selection": "cloud" if isinstance(sel, CloudSelection) else "edge",
        "hostname": sel.hostname.to_text(),
        "address": sel.address,
        "matched_area": sel.matched_area_index,
        "t_net_ms": result.timing.t_net * 1000,
        "t_area_ms": result.timing.t_area * 1000,
        "t_q_ms": result.timing.t_q * 1000,
    }))
    return EXIT_OK


def cmd_locate(args):
    t = _load(args.config)
    index = locate_first(_position(args), [a.geometry for a in t.areas], DEFAULT_ELLIPSOID)
    if index is None:
        print("OUTSIDE")
    else:
        area = t.areas[index]
        print(f"{area.id} {area.edge_hostname.to_text()}")
    return EXIT_OK


def cmd_synth(args):
    t = synth_topology(args.n, args.extent, args.radius, args.seed)
    text = dump_config(t)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    return EXIT_OK


def cmd_bench_area(args):
    result = bench.bench_area(args.lengths, args.iterations, args.seed, backend=args.backend)
    path = bench.write_area_csv(result, args.out)
    print(f"# backend: {result.backend}; csv: {path}")
    print(bench.format_area_table(result.rows))
    return EXIT_OK


def cmd_bench_e2e(args):
    network = args.public or args.server is not None
    if network and args.hermetic:
        raise ConfigError("--hermetic", "cannot be combined with --public or --server")
    if not network:
        topology = _load(args.config) if args.config else synth_topology(
            bench.POOL_SIZE, bench.POOL_EXTENT_KM2, bench.POOL_RADIUS_M, args.seed)
        with bench.hermetic_servers(topology) as endpoints:
            result = bench.bench_e2e(endpoints, args.n, args.delay,
                                     topology.service_name.to_text(), args.timeout / 1000.0)
    else:
        if not args.service:
            raise ConfigError("--service", "required with --public or --server")
        targets = [("custom", args.server)] if args.server else list(bench.PUBLIC_RESOLVERS.items())
        endpoints = [bench.Endpoint(label, addr, True, args.service) for label, addr in targets]
        if args.noloc_service:
            endpoints += [bench.Endpoint(label, addr, False, args.noloc_service)
                          for label, addr in targets]
        result = bench.bench_e2e(endpoints, args.n, args.delay, args.service, args.timeout / 1000.0)
    path = bench.write_e2e_csv(result, args.out)
    print(f"# csv: {path}")
    print(bench.format_e2e_table(result.rows))
    return EXIT_OK


def _add_position(p):
    p.add_argument("--lat", type=float, required=True)
    p.add_argument("--lon", type=float, required=True)
    p.add_argument("--height", type=float, default=0.0)


def build_parser():
    parser = argparse.ArgumentParser(prog="geolocdns",
                                     description="Location-aware DNS service discovery")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a topology config")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("zonegen", help="write zone file lines for a topology")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_zonegen)

    p = sub.add_parser("serve", help="run the authoritative test server")
    p.add_argument("--config", required=True)
    p.add_argument("--server", type=_endpoint, help="bind HOST:PORT (default 127.0.0.1:5353)")
    p.add_argument("--no-loc", action="store_true", help="omit LOC records from answers")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("discover", help="query a server and select an instance")
    p.add_argument("service")
    p.add_argument("--server", type=_endpoint, help=f"HOST:PORT (default ${SERVER_ENV} or 127.0.0.1:5353)")
    _add_position(p)
    p.add_argument("--timeout", type=float, default=2000.0, help="milliseconds")
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("locate", help="first area containing a point, no network")
    p.add_argument("--config", required=True)
    _add_position(p)
    p.set_defaults(func=cmd_locate)

    p = sub.add_parser("synth", help="emit a seeded synthetic topology config")
    p.add_argument("--n", type=int, default=400)
    p.add_argument("--extent", type=float, default=20.0, help="km2")
    p.add_argument("--radius", type=float, default=500.0, help="meters")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="latency benchmarks")
    bsub = p.add_subparsers(dest="mode", required=True)
    b = bsub.add_parser("area", help="area scan time per LOC list length")
    b.add_argument("--lengths", type=_lengths, default=list(bench.DEFAULT_LENGTHS))
    b.add_argument("--iterations", type=int, default=bench.DEFAULT_ITERATIONS)
    b.add_argument("--seed", type=int, default=42)
    b.add_argument("--backend", choices=["auto", *available_backends()], default="auto")
    b.add_argument("--out", default="bench-out")
    b.set_defaults(func=cmd_bench_area)

    b = bsub.add_parser("e2e", help="lookup round trip with and without LOC")
    b.add_argument("--hermetic", action="store_true",
                   help="two local servers, with and without LOC (the default)")
    b.add_argument("--public", action="store_true", help="query the public resolver presets instead")
    b.add_argument("--config", help="topology for hermetic mode (default: synthetic 400 areas)")
    b.add_argument("--server", type=_endpoint, help="query this one resolver instead (implies network mode)")
    b.add_argument("--service", help="name carrying LOC records (network mode)")
    b.add_argument("--noloc-service", help="comparison name without LOC records (network mode)")
    b.add_argument("--n", type=int, default=100)
    b.add_argument("--delay", type=float, default=3.0, help="seconds between requests")
    b.add_argument("--timeout", type=float, default=2000.0, help="milliseconds")
    b.add_argument("--seed", type=int, default=42)
    b.add_argument("--out", default="bench-out")
    b.set_defaults(func=cmd_bench_e2e)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if (args.verbose or args.command == "serve") else logging.WARNING,
                        format="%(asctime)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except InvalidTopology as exc:
        for v in exc.violations:
            print(v, file=sys.stderr)
        return EXIT_DOMAIN
    except ConfigError as exc:
        print(f"ConfigError: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BindError as exc:
        print(f"BindError: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Timeout as exc:
        print(f"Timeout: {exc}", file=sys.stderr)
        return EXIT_TIMEOUT
    except (DiscoveryError, ServerFailure, bench.InsufficientData) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
