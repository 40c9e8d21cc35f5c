"""RFC 1876 LOC record codec (wire RDATA and master-file text).

Angles are kept as signed thousandths of an arcsecond, altitude as
centimeters above a base of -100000 m, and size/precision fields as
centimeters.  On the wire the three size/precision values use the RFC's
one-byte mantissa/exponent encoding, which truncates to the largest
representable value not above the input.

A LOC record's SIZE is a sphere *diameter*.  When a record describes a
service area, the area radius is half of it (see :func:`loc_to_geopoint`).
"""
from __future__ import annotations

import re
import struct
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Tuple

from .geodesy import GeoPoint

MAS_PER_DEGREE = 3600 * 1000
MAX_LAT_MAS = 90 * MAS_PER_DEGREE
MAX_LON_MAS = 180 * MAS_PER_DEGREE
ALT_BASE_CM = 100000 * 100
MAX_U32 = 2**32 - 1
MAX_PRECISION_CM = 9 * 10**9
EQUATOR = 2**31

DEFAULT_SIZE_CM = 100
DEFAULT_HP_CM = 1000000
DEFAULT_VP_CM = 1000

_WIRE = struct.Struct("!BBBBIII")


class LocError(ValueError):
    pass


class RangeError(LocError):
    pass


class MalformedField(LocError):
    pass


class MalformedRecord(LocError):
    pass


class UnsupportedVersion(LocError):
    """LOC version other than 0.  Callers should skip the record."""


class LocSyntaxError(LocError):
    def __init__(self, token, reason):
        super().__init__(f"{reason}: {token!r}")
        self.token = token
        self.reason = reason


@dataclass(frozen=True)
class LocData:
    lat_mas: int
    lon_mas: int
    alt_cm: int = ALT_BASE_CM
    size_cm: int = DEFAULT_SIZE_CM
    hp_cm: int = DEFAULT_HP_CM
    vp_cm: int = DEFAULT_VP_CM

    def __post_init__(self):
        for name in ("lat_mas", "lon_mas", "alt_cm", "size_cm", "hp_cm", "vp_cm"):
            if not isinstance(getattr(self, name), int):
                raise RangeError(f"{name} must be an integer")
        if abs(self.lat_mas) > MAX_LAT_MAS:
            raise RangeError(f"latitude out of range: {self.lat_mas} mas")
        if abs(self.lon_mas) > MAX_LON_MAS:
            raise RangeError(f"longitude out of range: {self.lon_mas} mas")
        if not 0 <= self.alt_cm <= MAX_U32:
            raise RangeError(f"altitude out of range: {self.alt_cm} cm")
        for name in ("size_cm", "hp_cm", "vp_cm"):
            if not 0 <= getattr(self, name) <= MAX_PRECISION_CM:
                raise RangeError(f"{name} out of range: {getattr(self, name)}")

    @property
    def altitude_m(self) -> float:
        return (self.alt_cm - ALT_BASE_CM) / 100


def encode_precision(cm: int) -> int:
    if cm < 0 or cm > MAX_PRECISION_CM:
        raise RangeError(f"precision value out of range: {cm} cm")
    if cm == 0:
        return 0
    exponent = min(len(str(cm)) - 1, 9)
    mantissa = cm // 10**exponent
    return (mantissa << 4) | exponent


def decode_precision(b: int) -> int:
    mantissa, exponent = b >> 4, b & 0x0F
    if mantissa > 9 or exponent > 9:
        raise MalformedField(f"invalid size/precision byte 0x{b:02x}")
    return mantissa * 10**exponent


def encode_wire(d: LocData) -> bytes:
    return _WIRE.pack(
        0,
        encode_precision(d.size_cm),
        encode_precision(d.hp_cm),
        encode_precision(d.vp_cm),
        EQUATOR + d.lat_mas,
        EQUATOR + d.lon_mas,
        d.alt_cm,
    )


def decode_wire(data: bytes) -> LocData:
    if len(data) >= 1 and data[0] != 0:
        raise UnsupportedVersion(f"LOC version {data[0]}")
    if len(data) != _WIRE.size:
        raise MalformedRecord(f"LOC RDATA must be {_WIRE.size} bytes, got {len(data)}")
    _, size_b, hp_b, vp_b, lat, lon, alt = _WIRE.unpack(data)
    return LocData(
        lat_mas=lat - EQUATOR,
        lon_mas=lon - EQUATOR,
        alt_cm=alt,
        size_cm=decode_precision(size_b),
        hp_cm=decode_precision(hp_b),
        vp_cm=decode_precision(vp_b),
    )


_NUMBER = re.compile(r"^[0-9]+(\.[0-9]*)?$")
_SIGNED = re.compile(r"^-?[0-9]+(\.[0-9]*)?$")


def _decimal(token, signed=False):
    if not (_SIGNED if signed else _NUMBER).match(token):
        raise LocSyntaxError(token, "not a number")
    try:
        return Decimal(token)
    except InvalidOperation:  # pragma: no cover - regex already filters
        raise LocSyntaxError(token, "not a number") from None


def _angle(tokens, pos, hemispheres, max_deg):
    """Parse ``deg [min [sec]] HEMI`` starting at tokens[pos]."""
    parts = []
    while pos < len(tokens) and len(parts) < 3 and _NUMBER.match(tokens[pos]):
        parts.append(tokens[pos])
        pos += 1
    if not parts:
        raise LocSyntaxError(tokens[pos] if pos < len(tokens) else "", "missing degrees")
    if pos >= len(tokens):
        raise LocSyntaxError(parts[-1], "missing hemisphere")
    hemi = tokens[pos]
    if hemi.upper() not in hemispheres:
        raise LocSyntaxError(hemi, "bad hemisphere letter")

    if not parts[0].isdigit():
        raise LocSyntaxError(parts[0], "degrees must be an integer")
    deg = int(parts[0])
    if deg > max_deg:
        raise LocSyntaxError(parts[0], f"degrees above {max_deg}")
    minutes = 0
    if len(parts) > 1:
        if not parts[1].isdigit():
            raise LocSyntaxError(parts[1], "minutes must be an integer")
        minutes = int(parts[1])
        if minutes >= 60:
            raise LocSyntaxError(parts[1], "minutes must be below 60")
    sec_mas = 0
    if len(parts) > 2:
        sec = _decimal(parts[2])
        if sec >= 60:
            raise LocSyntaxError(parts[2], "seconds must be below 60")
        scaled = sec * 1000
        if scaled != scaled.to_integral_value():
            raise LocSyntaxError(parts[2], "seconds have more than 3 decimals")
        sec_mas = int(scaled)

    mas = (deg * 3600 + minutes * 60) * 1000 + sec_mas
    if mas > max_deg * MAS_PER_DEGREE:
        raise LocSyntaxError(" ".join(parts), f"angle above {max_deg} degrees")
    if hemi.upper() == hemispheres[1]:
        mas = -mas
    return mas, pos + 1


def _meters_to_cm(token, signed=False):
    text = token[:-1] if token.lower().endswith("m") else token
    value = _decimal(text, signed=signed) * 100
    if value != value.to_integral_value():
        raise LocSyntaxError(token, "more than 2 decimals")
    return int(value)


def parse_presentation(text: str) -> LocData:
    """Parse master-file LOC RDATA, e.g. ``"52 22 23.000 N 4 53 32.000 E -2.00m"``."""
    tokens = text.split()
    lat, pos = _angle(tokens, 0, ("N", "S"), 90)
    lon, pos = _angle(tokens, pos, ("E", "W"), 180)
    if pos >= len(tokens):
        raise LocSyntaxError("", "missing altitude")
    alt_cm = _meters_to_cm(tokens[pos], signed=True) + ALT_BASE_CM
    if not 0 <= alt_cm <= MAX_U32:
        raise LocSyntaxError(tokens[pos], "altitude out of range")
    pos += 1

    values = [DEFAULT_SIZE_CM, DEFAULT_HP_CM, DEFAULT_VP_CM]
    rest = tokens[pos:]
    if len(rest) > 3:
        raise LocSyntaxError(rest[3], "unexpected trailing token")
    for i, tok in enumerate(rest):
        cm = _meters_to_cm(tok)
        if cm > MAX_PRECISION_CM:
            raise LocSyntaxError(tok, "value above 90000000m")
        values[i] = cm
    return LocData(lat, lon, alt_cm, *values)


def _dms(mas, hemispheres):
    hemi = hemispheres[0] if mas >= 0 else hemispheres[1]
    mas = abs(mas)
    deg, rem = divmod(mas, 3600 * 1000)
    minutes, rem = divmod(rem, 60 * 1000)
    sec, frac = divmod(rem, 1000)
    return f"{deg} {minutes} {sec}.{frac:03d} {hemi}"


def _cm_text(cm):
    if cm % 100 == 0:
        return f"{cm // 100}m"
    return f"{cm // 100}.{cm % 100:02d}m"


def format_presentation(d: LocData) -> str:
    alt = d.alt_cm - ALT_BASE_CM
    sign = "-" if alt < 0 else ""
    whole, frac = divmod(abs(alt), 100)
    return " ".join([
        _dms(d.lat_mas, "NS"),
        _dms(d.lon_mas, "EW"),
        f"{sign}{whole}.{frac:02d}m",
        _cm_text(d.size_cm),
        _cm_text(d.hp_cm),
        _cm_text(d.vp_cm),
    ])


def loc_to_geopoint(d: LocData) -> Tuple[GeoPoint, float]:
    """Center point and service-area radius (half the SIZE diameter), in meters."""
    point = GeoPoint(d.lat_mas / MAS_PER_DEGREE, d.lon_mas / MAS_PER_DEGREE,
                     d.alt_cm / 100 - 100000)
    return point, d.size_cm / 100 / 2


def geopoint_to_loc(center: GeoPoint, radius_m: float,
                    hp_cm: int = 1000, vp_cm: int = 1000) -> LocData:
    """Inverse of :func:`loc_to_geopoint`, rounding to the record's resolution."""
    return LocData(
        lat_mas=round(center.lat_deg * MAS_PER_DEGREE),
        lon_mas=round(center.lon_deg * MAS_PER_DEGREE),
        alt_cm=round(center.height_m * 100) + ALT_BASE_CM,
        size_cm=round(radius_m * 200),
        hp_cm=hp_cm,
        vp_cm=vp_cm,
    )
