"""Service topology: edge and cloud instances plus ordered service areas.

Loaded from a JSON document::

    {"service": "myservice.com",
     "edges":  [{"hostname": "edgeA.myservice.com", "address": "10.0.0.1"}],
     "clouds": [{"hostname": "cloud.myservice.com", "address": "10.0.1.1"}],
     "areas":  [{"id": "a1", "lat_deg": 46.62, "lon_deg": 14.31,
                 "radius_m": 500, "edge": "edgeA.myservice.com"}]}

``height_m`` (default 0) and ``ttl_s`` (default 300) are optional per area.
Area order matters: clients take the first area that contains them.
"""
from __future__ import annotations

import ipaddress
import json
import math
import random
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import jsonschema

from . import loc
from .dnsmsg import DnsError, DnsName, RRType, ResourceRecord, as_name
from .geodesy import AreaGeometry, GeoPoint

DEFAULT_TTL = 300
DEFAULT_PRECISION_CM = 1000
SYNTH_ORIGIN = GeoPoint(46.62, 14.31, 0.0)

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["service"],
    "additionalProperties": False,
    "properties": {
        "service": {"type": "string", "minLength": 1},
        "edges": {"type": "array", "items": {"$ref": "#/$defs/instance"}},
        "clouds": {"type": "array", "items": {"$ref": "#/$defs/instance"}},
        "areas": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "lat_deg", "lon_deg", "radius_m", "edge"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string"},
                    "lat_deg": {"type": "number", "minimum": -90, "maximum": 90},
                    "lon_deg": {"type": "number", "minimum": -180, "maximum": 180},
                    "height_m": {"type": "number"},
                    "radius_m": {"type": "number"},
                    "edge": {"type": "string", "minLength": 1},
                    "ttl_s": {"type": "integer", "minimum": 0, "maximum": 2**31 - 1},
                },
            },
        },
    },
    "$defs": {
        "instance": {
            "type": "object",
            "required": ["hostname", "address"],
            "additionalProperties": False,
            "properties": {
                "hostname": {"type": "string", "minLength": 1},
                "address": {"type": "string", "format": "ipv4"},
            },
        },
    },
}


class ConfigError(ValueError):
    def __init__(self, path, reason):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class InvalidTopology(ValueError):
    def __init__(self, violations):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = list(violations)


@dataclass(frozen=True)
class Violation:
    kind: str
    subject: str

    def __str__(self):
        return f"{self.kind}: {self.subject}"


@dataclass(frozen=True)
class EdgeInstance:
    hostname: DnsName
    address: str


@dataclass(frozen=True)
class CloudInstance:
    hostname: DnsName
    address: str


@dataclass(frozen=True)
class Asa:
    id: str
    center: GeoPoint
    radius_m: float
    edge_hostname: DnsName
    ttl_s: int = DEFAULT_TTL

    @property
    def geometry(self) -> AreaGeometry:
        return AreaGeometry(self.center, self.radius_m)

    def to_loc(self) -> loc.LocData:
        return loc.geopoint_to_loc(self.center, self.radius_m,
                                   DEFAULT_PRECISION_CM, DEFAULT_PRECISION_CM)


@dataclass(frozen=True)
class ServiceTopology:
    service_name: DnsName
    edges: Tuple[EdgeInstance, ...] = ()
    clouds: Tuple[CloudInstance, ...] = ()
    areas: Tuple[Asa, ...] = field(default=())

    def edge(self, hostname) -> Optional[EdgeInstance]:
        hostname = as_name(hostname)
        for e in self.edges:
            if e.hostname == hostname:
                return e
        return None

    def areas_of(self, hostname) -> List[Asa]:
        hostname = as_name(hostname)
        return [a for a in self.areas if a.edge_hostname == hostname]


def validate(t: ServiceTopology) -> List[Violation]:
    """All constraint violations of ``t``; an empty list means valid."""
    out = []
    seen = set()
    for inst in (*t.edges, *t.clouds):
        if inst.hostname in seen:
            out.append(Violation("DuplicateHostname", inst.hostname.to_text()))
        seen.add(inst.hostname)
    if not t.clouds:
        out.append(Violation("NoCloudFallback", t.service_name.to_text()))
    edge_names = {e.hostname for e in t.edges}
    owners = set()
    for a in t.areas:
        if not (math.isfinite(a.radius_m) and a.radius_m > 0):
            out.append(Violation("NonPositiveRadius", a.id))
        if a.edge_hostname not in edge_names:
            out.append(Violation("DanglingEdgeReference", f"{a.id} -> {a.edge_hostname.to_text()}"))
        owners.add(a.edge_hostname)
    for e in t.edges:
        if e.hostname not in owners:
            out.append(Violation("EdgeWithoutArea", e.hostname.to_text()))
    return out


def _name(value, path):
    try:
        return DnsName.from_text(value)
    except (DnsError, UnicodeError) as exc:
        raise ConfigError(path, f"bad domain name {value!r}: {exc}") from None


def from_dict(doc: dict) -> ServiceTopology:
    try:
        jsonschema.validate(doc, CONFIG_SCHEMA, format_checker=jsonschema.FormatChecker())
    except jsonschema.ValidationError as exc:
        path = "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in exc.absolute_path)
        raise ConfigError(path, exc.message) from None

    edges = tuple(EdgeInstance(_name(e["hostname"], f"$.edges[{i}].hostname"), e["address"])
                  for i, e in enumerate(doc.get("edges", [])))
    clouds = tuple(CloudInstance(_name(c["hostname"], f"$.clouds[{i}].hostname"), c["address"])
                   for i, c in enumerate(doc.get("clouds", [])))
    areas = []
    for i, a in enumerate(doc.get("areas", [])):
        try:
            center = GeoPoint(float(a["lat_deg"]), float(a["lon_deg"]), float(a.get("height_m", 0.0)))
        except ValueError as exc:
            raise ConfigError(f"$.areas[{i}]", str(exc)) from None
        areas.append(Asa(a["id"], center, float(a["radius_m"]),
                         _name(a["edge"], f"$.areas[{i}].edge"), a.get("ttl_s", DEFAULT_TTL)))
    return ServiceTopology(_name(doc["service"], "$.service"), edges, clouds, tuple(areas))


def load_config(document: str) -> ServiceTopology:
    """Parse and validate a JSON config.  Raises ConfigError or InvalidTopology."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"invalid JSON: {exc}") from None
    t = from_dict(doc)
    violations = validate(t)
    if violations:
        raise InvalidTopology(violations)
    return t


def to_dict(t: ServiceTopology) -> dict:
    return {
        "service": t.service_name.to_text(),
        "edges": [{"hostname": e.hostname.to_text(), "address": e.address} for e in t.edges],
        "clouds": [{"hostname": c.hostname.to_text(), "address": c.address} for c in t.clouds],
        "areas": [
            {"id": a.id, "lat_deg": a.center.lat_deg, "lon_deg": a.center.lon_deg,
             "height_m": a.center.height_m, "radius_m": a.radius_m,
             "edge": a.edge_hostname.to_text(), "ttl_s": a.ttl_s}
            for a in t.areas
        ],
    }


def dump_config(t: ServiceTopology) -> str:
    return json.dumps(to_dict(t), indent=2) + "\n"


def zone_records(t: ServiceTopology) -> List[ResourceRecord]:
    """CNAME per edge, A per edge and cloud, then one LOC per area in order."""
    out = [ResourceRecord(t.service_name, RRType.CNAME, DEFAULT_TTL, e.hostname) for e in t.edges]
    out += [ResourceRecord(i.hostname, RRType.A, DEFAULT_TTL, i.address) for i in (*t.edges, *t.clouds)]
    out += [ResourceRecord(a.edge_hostname, RRType.LOC, a.ttl_s, a.to_loc()) for a in t.areas]
    return out


def _rdata_text(rr: ResourceRecord) -> str:
    if rr.rrtype == RRType.LOC:
        return loc.format_presentation(rr.rdata)
    return str(rr.rdata)


def generate_zone(t: ServiceTopology) -> str:
    lines = ["$ORIGIN ."]
    for rr in zone_records(t):
        lines.append(f"{rr.owner.to_text()} {rr.ttl} IN {RRType(rr.rrtype).name} {_rdata_text(rr)}")
    return "\n".join(lines) + "\n"


def read_zone(text: str) -> List[ResourceRecord]:
    """Read back the subset of master-file syntax written by :func:`generate_zone`."""
    records = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split(";", 1)[0].strip()
        if not line or line.startswith("$"):
            continue
        parts = line.split(None, 4)
        if len(parts) != 5 or parts[2].upper() != "IN":
            raise ValueError(f"line {lineno}: expected '<owner> <ttl> IN <type> <rdata>'")
        owner, ttl, _, rtype, rdata = parts
        rtype = RRType[rtype.upper()]
        if rtype == RRType.LOC:
            value = loc.parse_presentation(rdata)
        elif rtype == RRType.CNAME:
            value = DnsName.from_text(rdata)
        else:
            value = str(ipaddress.IPv4Address(rdata.strip()))
        records.append(ResourceRecord(DnsName.from_text(owner), rtype, int(ttl), value))
    return records


def synth_topology(n_areas: int, extent_km2: float = 20.0, radius_m: float = 500.0,
                   seed: int = 42, origin: GeoPoint = SYNTH_ORIGIN,
                   service: str = "synth.example") -> ServiceTopology:
    """Seeded random topology: ``n_areas`` centers uniform in a square of
    ``extent_km2`` around ``origin``, all owned by one edge, plus one cloud."""
    if n_areas < 1:
        raise ValueError("n_areas must be at least 1")
    if extent_km2 <= 0:
        raise ValueError("extent_km2 must be positive")
    rng = random.Random(seed)
    edge = DnsName.from_text(f"edge0.{service}")
    cloud = DnsName.from_text(f"cloud.{service}")
    areas = []
    width = len(str(n_areas - 1))
    for i in range(n_areas):
        center = square_point(rng, origin, extent_km2)
        areas.append(Asa(f"a{i:0{width}d}", center, float(radius_m), edge))
    return ServiceTopology(
        DnsName.from_text(service),
        (EdgeInstance(edge, "10.0.0.1"),),
        (CloudInstance(cloud, "10.0.1.1"),),
        tuple(areas),
    )


def square_point(rng: random.Random, origin: GeoPoint, extent_km2: float) -> GeoPoint:
    """Uniform point in the square of ``extent_km2`` centered on ``origin``,
    rounded to LOC resolution (1/1000 arcsecond)."""
    half = math.sqrt(extent_km2) * 1000.0 / 2
    dx = rng.uniform(-half, half)
    dy = rng.uniform(-half, half)
    m_per_deg = 6378137.0 * math.pi / 180.0
    lat = origin.lat_deg + dy / m_per_deg
    lon = origin.lon_deg + dx / (m_per_deg * math.cos(math.radians(origin.lat_deg)))
    q = loc.MAS_PER_DEGREE
    return GeoPoint(round(lat * q) / q, round(lon * q) / q, origin.height_m)


def areas_geometry(areas: Sequence[Asa]) -> List[AreaGeometry]:
    return [a.geometry for a in areas]
