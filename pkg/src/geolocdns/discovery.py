"""Client side: one DNS query, then pick an edge instance or the cloud.

The response is read in order.  CNAME targets give the edge candidates,
LOC records are grouped under their owner name and A records supply the
addresses.  A-only owners that no CNAME points at are cloud instances.
All edge areas are flattened (edges in CNAME order, each edge's areas in
LOC order) and the first area containing the user decides the edge; if
none does, the first cloud instance is chosen.
"""
from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Tuple, Union

from . import dnsmsg
from .dnsmsg import DnsMessage, DnsName, RRType, as_name, make_query, query_roundtrip
from .geodesy import (DEFAULT_ELLIPSOID, AreaGeometry, AreaTable, EllipsoidParams,
                      GeoPoint, locate_first)
from .loc import LocData, loc_to_geopoint


class DiscoveryError(Exception):
    pass


class IncompleteAnnouncement(DiscoveryError):
    def __init__(self, owner):
        super().__init__(f"LOC records for {owner} but no A record")
        self.owner = owner


class EmptyAnnouncement(DiscoveryError):
    pass


class NoFallback(DiscoveryError):
    pass


@dataclass(frozen=True)
class EdgeCandidate:
    hostname: DnsName
    address: str
    areas: Tuple[AreaGeometry, ...]


@dataclass(frozen=True)
class CloudCandidate:
    hostname: DnsName
    address: str


@dataclass(frozen=True)
class ServiceAnnouncement:
    edges: Tuple[EdgeCandidate, ...]
    clouds: Tuple[CloudCandidate, ...]
    # Problems found while reading the response that did not stop selection.
    warnings: Tuple[str, ...] = ()
    table: AreaTable = field(init=False, repr=False, compare=False)
    owners: Tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        flat, owners = [], []
        for i, edge in enumerate(self.edges):
            flat.extend(edge.areas)
            owners.extend([i] * len(edge.areas))
        object.__setattr__(self, "table", AreaTable(flat))
        object.__setattr__(self, "owners", tuple(owners))


@dataclass(frozen=True)
class EdgeSelection:
    hostname: DnsName
    address: str
    matched_area_index: int
    kind = "edge"


@dataclass(frozen=True)
class CloudSelection:
    hostname: DnsName
    address: str
    matched_area_index = None
    kind = "cloud"


Selection = Union[EdgeSelection, CloudSelection]


@dataclass(frozen=True)
class Timing:
    """Durations in seconds.  ``t_net`` is the request plus response leg,
    measured as one round trip; ``t_q`` is always ``t_net + t_area``."""

    t_net: float
    t_area: float

    @property
    def t_q(self) -> float:
        return self.t_net + self.t_area


@dataclass(frozen=True)
class DiscoveryResult:
    selection: Selection
    timing: Timing
    announcement: ServiceAnnouncement


def extract_announcement(response: DnsMessage) -> ServiceAnnouncement:
    cname_targets: List[DnsName] = []
    locs = {}
    addresses = {}
    a_order: List[DnsName] = []
    for rr in response.records():
        if rr.rrtype == RRType.CNAME and isinstance(rr.rdata, DnsName):
            if rr.rdata not in cname_targets:
                cname_targets.append(rr.rdata)
        elif rr.rrtype == RRType.LOC and isinstance(rr.rdata, LocData):
            locs.setdefault(rr.owner, []).append(rr.rdata)
        elif rr.rrtype == RRType.A and isinstance(rr.rdata, str):
            if rr.owner not in addresses:
                addresses[rr.owner] = rr.rdata
                a_order.append(rr.owner)

    warnings = []
    edge_names = list(cname_targets)
    edge_names += [owner for owner in locs if owner not in cname_targets]
    edges = []
    for name in edge_names:
        records = locs.get(name, [])
        if name not in addresses:
            if records:
                raise IncompleteAnnouncement(name.to_text())
            warnings.append(f"EdgeWithoutAddress: {name.to_text()}")
            continue
        areas = []
        for d in records:
            center, radius = loc_to_geopoint(d)
            if radius > 0:
                areas.append(AreaGeometry(center, radius))
            else:
                warnings.append(f"ZeroSizeArea: {name.to_text()}")
        if not areas:
            warnings.append(f"EdgeWithoutArea: {name.to_text()}")
        edges.append(EdgeCandidate(name, addresses[name], tuple(areas)))

    clouds = tuple(CloudCandidate(o, addresses[o]) for o in a_order
                   if o not in locs and o not in cname_targets)
    if not edges and not clouds:
        raise EmptyAnnouncement("response carries no usable service instance")
    return ServiceAnnouncement(tuple(edges), clouds, tuple(warnings))


def select_instance(a: ServiceAnnouncement, user: GeoPoint,
                    params: EllipsoidParams = DEFAULT_ELLIPSOID,
                    backend: Optional[str] = None) -> Tuple[Selection, float]:
    """Choose an instance for ``user``; also returns the scan time in seconds."""
    start = time.perf_counter()
    index = locate_first(user, a.table, params, backend)
    t_area = time.perf_counter() - start
    if index is not None:
        edge = a.edges[a.owners[index]]
        return EdgeSelection(edge.hostname, edge.address, index), t_area
    if not a.clouds:
        raise NoFallback("user is outside every area and no cloud instance is announced")
    cloud = a.clouds[0]
    return CloudSelection(cloud.hostname, cloud.address), t_area


class FixedPosition:
    def __init__(self, point: GeoPoint):
        self.point = point

    def last_known_position(self) -> GeoPoint:
        return self.point


class TracePosition:
    """Replays a list of positions, one per read, then keeps the last one."""

    def __init__(self, points: Iterable[GeoPoint]):
        self._points = list(points)
        if not self._points:
            raise ValueError("trace is empty")
        self._i = 0
        self._lock = threading.Lock()

    def last_known_position(self) -> GeoPoint:
        with self._lock:
            p = self._points[min(self._i, len(self._points) - 1)]
            self._i += 1
            return p


def discover(service: Union[str, DnsName], user_position, server: Tuple[str, int],
             timeout: float = 2.0, params: EllipsoidParams = DEFAULT_ELLIPSOID,
             transport_factory=dnsmsg.UdpTransport,
             backend: Optional[str] = None) -> DiscoveryResult:
    user = user_position.last_known_position()
    query = make_query(as_name(service), RRType.A)
    response, t_net = query_roundtrip(server, query, timeout, transport_factory)
    announcement = extract_announcement(response)
    selection, t_area = select_instance(announcement, user, params, backend)
    return DiscoveryResult(selection, Timing(t_net, t_area), announcement)
