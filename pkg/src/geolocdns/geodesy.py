"""Planar position of WGS-84 coordinates and circular area membership.

Positions are projected with the prime-vertical radius onto the equatorial
plane (x, y only, no z) and membership is a plain Euclidean distance test
against the area radius.  Because z is dropped, latitudes ``phi`` and
``-phi`` map to the same (x, y); this is a known property of the method and
is intentionally left as is.

The default eccentricity is 0.01671 rather than the WGS-84 first
eccentricity (~0.0818).  Pass a different :class:`EllipsoidParams` to
override it.
"""
from __future__ import annotations

import enum
import math
from array import array
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from . import _scan

DEG = math.pi / 180.0


@dataclass(frozen=True)
class GeoPoint:
    lat_deg: float
    lon_deg: float
    height_m: float = 0.0

    def __post_init__(self):
        for name in ("lat_deg", "lon_deg", "height_m"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite, got {getattr(self, name)!r}")
        if not -90.0 <= self.lat_deg <= 90.0:
            raise ValueError(f"latitude out of range: {self.lat_deg}")
        if not -180.0 <= self.lon_deg <= 180.0:
            raise ValueError(f"longitude out of range: {self.lon_deg}")


@dataclass(frozen=True)
class EllipsoidParams:
    semi_major_m: float = 6378137.0
    eccentricity: float = 0.01671

    def __post_init__(self):
        if not (math.isfinite(self.semi_major_m) and self.semi_major_m > 0):
            raise ValueError(f"semi-major axis must be positive, got {self.semi_major_m}")
        if not 0.0 <= self.eccentricity < 1.0:
            raise ValueError(f"eccentricity must be in [0, 1), got {self.eccentricity}")


DEFAULT_ELLIPSOID = EllipsoidParams()


@dataclass(frozen=True)
class PlanePoint:
    x_m: float
    y_m: float


@dataclass(frozen=True)
class AreaGeometry:
    center: GeoPoint
    radius_m: float

    def __post_init__(self):
        if not (math.isfinite(self.radius_m) and self.radius_m > 0):
            raise ValueError(f"area radius must be positive, got {self.radius_m}")


class InsideOutside(enum.Enum):
    INSIDE = "INSIDE"
    OUTSIDE = "OUTSIDE"

    def __bool__(self):
        return self is InsideOutside.INSIDE


INSIDE = InsideOutside.INSIDE
OUTSIDE = InsideOutside.OUTSIDE


def prime_vertical_radius(lat_deg: float, params: EllipsoidParams = DEFAULT_ELLIPSOID) -> float:
    """Radius of curvature in the prime vertical, ``a / sqrt(1 - e^2 sin^2 phi)``."""
    if not math.isfinite(lat_deg) or not -90.0 <= lat_deg <= 90.0:
        raise ValueError(f"latitude out of range: {lat_deg!r}")
    e2 = params.eccentricity * params.eccentricity
    s = math.sin(lat_deg * DEG)
    return params.semi_major_m / math.sqrt(1.0 - e2 * s * s)


def to_cartesian(p: GeoPoint, params: EllipsoidParams = DEFAULT_ELLIPSOID) -> PlanePoint:
    x, y = _scan.plane_xy(p.lat_deg, p.lon_deg, p.height_m,
                          params.semi_major_m, params.eccentricity)
    return PlanePoint(x, y)


def planar_distance(a: GeoPoint, b: GeoPoint, params: EllipsoidParams = DEFAULT_ELLIPSOID) -> float:
    pa = to_cartesian(a, params)
    pb = to_cartesian(b, params)
    dx = pa.x_m - pb.x_m
    dy = pa.y_m - pb.y_m
    return math.sqrt(dx * dx + dy * dy)


def contains(area: AreaGeometry, user: GeoPoint,
             params: EllipsoidParams = DEFAULT_ELLIPSOID) -> InsideOutside:
    # boundary counts as inside
    if planar_distance(user, area.center, params) <= area.radius_m:
        return INSIDE
    return OUTSIDE


class AreaTable:
    """Areas packed into contiguous float columns for the scan kernel.

    Packing happens once per area list; :func:`locate_first` on a table
    only pays for the scan itself.
    """

    __slots__ = ("lats", "lons", "heights", "radii", "_areas")

    def __init__(self, areas: Iterable[AreaGeometry]):
        self._areas = tuple(areas)
        self.lats = array("d", (a.center.lat_deg for a in self._areas))
        self.lons = array("d", (a.center.lon_deg for a in self._areas))
        self.heights = array("d", (a.center.height_m for a in self._areas))
        self.radii = array("d", (a.radius_m for a in self._areas))

    def __len__(self):
        return len(self._areas)

    def __getitem__(self, i):
        return self._areas[i]

    def __iter__(self):
        return iter(self._areas)

    def __repr__(self):
        return f"AreaTable({len(self._areas)} areas)"


def locate_first(user: GeoPoint, areas: Union[AreaTable, Sequence[AreaGeometry]],
                 params: EllipsoidParams = DEFAULT_ELLIPSOID,
                 backend: Optional[str] = None) -> Optional[int]:
    """Index of the first area containing ``user``, scanning in list order.

    Returns None when no area matches.  ``backend`` selects ``"compiled"``
    or ``"python"`` explicitly; by default the compiled kernel is used when
    it was built.
    """
    if not isinstance(areas, AreaTable):
        areas = AreaTable(areas)
    scan = _scan.get_scan(backend)
    i = scan(user.lat_deg, user.lon_deg, user.height_m,
             areas.lats, areas.lons, areas.heights, areas.radii,
             params.semi_major_m, params.eccentricity)
    return None if i < 0 else i
