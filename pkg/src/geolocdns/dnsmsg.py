"""Minimal DNS message codec and a one-shot UDP stub exchange.

Supports A, CNAME and LOC rdata; anything else is carried as raw bytes.
Names are written uncompressed; compression pointers are accepted when
decoding.
"""
from __future__ import annotations

import enum
import ipaddress
import random
import socket
import struct
import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

from . import loc
from .loc import LocData

MAX_MESSAGE = 65535
MAX_NAME = 255
DEFAULT_PORT = 53

_HEADER = struct.Struct("!HHHHHH")
_RR_FIXED = struct.Struct("!HHIH")
_Q_FIXED = struct.Struct("!HH")


class RRType(enum.IntEnum):
    A = 1
    CNAME = 5
    LOC = 29


class RRClass(enum.IntEnum):
    IN = 1


class Rcode(enum.IntEnum):
    NOERROR = 0
    FORMERR = 1
    SERVFAIL = 2
    NXDOMAIN = 3
    NOTIMP = 4
    REFUSED = 5


class DnsError(Exception):
    pass


class Truncated(DnsError):
    pass


class MalformedName(DnsError):
    pass


class MalformedMessage(DnsError):
    pass


class TooLarge(DnsError):
    pass


class Timeout(DnsError):
    pass


class ServerFailure(DnsError):
    def __init__(self, rcode, response=None):
        try:
            label = Rcode(rcode).name
        except ValueError:
            label = str(rcode)
        super().__init__(f"server answered rcode {label}")
        self.rcode = rcode
        self.response = response


class DnsName:
    """A domain name as a tuple of raw labels.  Compares case-insensitively."""

    __slots__ = ("labels", "_key")

    def __init__(self, labels=()):
        labels = tuple(bytes(l) for l in labels)
        total = 1
        for label in labels:
            if not 1 <= len(label) <= 63:
                raise MalformedName(f"label length {len(label)} not in 1..63")
            total += len(label) + 1
        if total > MAX_NAME:
            raise MalformedName(f"name is {total} bytes, limit is {MAX_NAME}")
        self.labels = labels
        self._key = tuple(l.lower() for l in labels)

    @classmethod
    def from_text(cls, text: str) -> "DnsName":
        text = text.rstrip(".")
        if not text:
            return cls(())
        return cls(part.encode("ascii") for part in text.split("."))

    def to_text(self) -> str:
        return ".".join(l.decode("ascii", "backslashreplace") for l in self.labels)

    def to_wire(self) -> bytes:
        return b"".join(bytes([len(l)]) + l for l in self.labels) + b"\x00"

    def __eq__(self, other):
        if isinstance(other, str):
            other = DnsName.from_text(other)
        if not isinstance(other, DnsName):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"DnsName({self.to_text()!r})"


def as_name(name: Union[str, DnsName]) -> DnsName:
    return name if isinstance(name, DnsName) else DnsName.from_text(name)


@dataclass(frozen=True)
class Question:
    name: DnsName
    qtype: int = RRType.A
    qclass: int = RRClass.IN


@dataclass(frozen=True)
class ResourceRecord:
    """One RR.  ``rdata`` is an IPv4 address string for A, a DnsName for
    CNAME, LocData for LOC and raw bytes for anything else (including LOC
    records whose version this codec does not understand)."""

    owner: DnsName
    rrtype: int
    ttl: int
    rdata: Union[str, DnsName, LocData, bytes]
    rrclass: int = RRClass.IN

    def __post_init__(self):
        if not 0 <= self.ttl <= 2**31 - 1:
            raise ValueError(f"ttl out of range: {self.ttl}")
        if isinstance(self.rdata, bytes):
            return
        expected = {RRType.A: str, RRType.CNAME: DnsName, RRType.LOC: LocData}.get(self.rrtype)
        if expected is None or not isinstance(self.rdata, expected):
            raise ValueError(f"rdata {type(self.rdata).__name__} does not match rrtype {self.rrtype}")


@dataclass
class DnsMessage:
    id: int = 0
    qr: bool = False
    opcode: int = 0
    aa: bool = False
    tc: bool = False
    rd: bool = True
    ra: bool = False
    rcode: int = 0
    questions: List[Question] = field(default_factory=list)
    answers: List[ResourceRecord] = field(default_factory=list)
    authorities: List[ResourceRecord] = field(default_factory=list)
    additionals: List[ResourceRecord] = field(default_factory=list)

    @property
    def question(self) -> Optional[Question]:
        return self.questions[0] if len(self.questions) == 1 else None

    def records(self):
        return [*self.answers, *self.authorities, *self.additionals]


def make_query(name, qtype=RRType.A, id=None, rd=True) -> DnsMessage:
    if id is None:
        id = random.getrandbits(16)
    return DnsMessage(id=id, rd=rd, questions=[Question(as_name(name), qtype)])


def _flags(m: DnsMessage) -> int:
    return ((m.qr << 15) | ((m.opcode & 0xF) << 11) | (m.aa << 10) | (m.tc << 9)
            | (m.rd << 8) | (m.ra << 7) | (m.rcode & 0xF))


def _rdata_bytes(rr: ResourceRecord) -> bytes:
    if isinstance(rr.rdata, bytes):
        return rr.rdata
    if rr.rrtype == RRType.A:
        return ipaddress.IPv4Address(rr.rdata).packed
    if rr.rrtype == RRType.CNAME:
        return rr.rdata.to_wire()
    return loc.encode_wire(rr.rdata)


def encode_message(m: DnsMessage) -> bytes:
    out = [_HEADER.pack(m.id & 0xFFFF, _flags(m), len(m.questions), len(m.answers),
                        len(m.authorities), len(m.additionals))]
    for q in m.questions:
        out.append(q.name.to_wire())
        out.append(_Q_FIXED.pack(q.qtype, q.qclass))
    for rr in m.records():
        rdata = _rdata_bytes(rr)
        out.append(rr.owner.to_wire())
        out.append(_RR_FIXED.pack(rr.rrtype, rr.rrclass, rr.ttl, len(rdata)))
        out.append(rdata)
    data = b"".join(out)
    if len(data) > MAX_MESSAGE:
        raise TooLarge(f"message is {len(data)} bytes")
    return data


def _read_name(buf: bytes, pos: int) -> Tuple[DnsName, int]:
    labels = []
    end = None
    seen = set()
    total = 1
    while True:
        if pos >= len(buf):
            raise Truncated("name runs past end of message")
        n = buf[pos]
        kind = n & 0xC0
        if kind == 0xC0:
            if pos + 1 >= len(buf):
                raise Truncated("compression pointer cut short")
            target = ((n & 0x3F) << 8) | buf[pos + 1]
            if end is None:
                end = pos + 2
            if target in seen:
                raise MalformedName(f"compression loop at offset {target}")
            seen.add(pos)
            seen.add(target)
            pos = target
            continue
        if kind:
            raise MalformedName(f"unsupported label type 0x{n:02x}")
        if n == 0:
            pos += 1
            break
        if pos + 1 + n > len(buf):
            raise Truncated("label runs past end of message")
        total += n + 1
        if total > MAX_NAME:
            raise MalformedName("name longer than 255 bytes")
        labels.append(buf[pos + 1:pos + 1 + n])
        pos += 1 + n
    return DnsName(labels), (end if end is not None else pos)


def _read_rr(buf: bytes, pos: int) -> Tuple[ResourceRecord, int]:
    owner, pos = _read_name(buf, pos)
    if pos + _RR_FIXED.size > len(buf):
        raise Truncated("record header cut short")
    rrtype, rrclass, ttl, rdlen = _RR_FIXED.unpack_from(buf, pos)
    pos += _RR_FIXED.size
    if pos + rdlen > len(buf):
        raise Truncated("rdata runs past end of message")
    raw = buf[pos:pos + rdlen]
    end = pos + rdlen
    ttl = min(ttl, 2**31 - 1)

    rdata: Union[str, DnsName, LocData, bytes] = raw
    if rrclass == RRClass.IN and rrtype == RRType.A:
        if rdlen != 4:
            raise MalformedMessage(f"A rdata of {rdlen} bytes")
        rdata = str(ipaddress.IPv4Address(raw))
    elif rrtype == RRType.CNAME:
        target, name_end = _read_name(buf[:end], pos)
        if name_end != end:
            raise MalformedMessage("CNAME rdata length mismatch")
        rdata = target
    elif rrtype == RRType.LOC:
        try:
            rdata = loc.decode_wire(raw)
        except loc.UnsupportedVersion:
            rdata = raw
        except loc.LocError as exc:
            raise MalformedMessage(f"bad LOC rdata: {exc}") from None
    return ResourceRecord(owner, rrtype, ttl, rdata, rrclass), end


def decode_message(buf: bytes) -> DnsMessage:
    buf = bytes(buf)
    if len(buf) < _HEADER.size:
        raise Truncated(f"{len(buf)} bytes is shorter than a header")
    id_, flags, qd, an, ns, ar = _HEADER.unpack_from(buf)
    m = DnsMessage(
        id=id_, qr=bool(flags >> 15), opcode=(flags >> 11) & 0xF,
        aa=bool(flags & 0x400), tc=bool(flags & 0x200), rd=bool(flags & 0x100),
        ra=bool(flags & 0x80), rcode=flags & 0xF,
    )
    pos = _HEADER.size
    for _ in range(qd):
        if pos >= len(buf):
            raise MalformedMessage("question count exceeds message")
        name, pos = _read_name(buf, pos)
        if pos + _Q_FIXED.size > len(buf):
            raise Truncated("question cut short")
        qtype, qclass = _Q_FIXED.unpack_from(buf, pos)
        pos += _Q_FIXED.size
        m.questions.append(Question(name, qtype, qclass))
    for count, section in ((an, m.answers), (ns, m.authorities), (ar, m.additionals)):
        for _ in range(count):
            if pos >= len(buf):
                raise MalformedMessage("record count exceeds message")
            rr, pos = _read_rr(buf, pos)
            section.append(rr)
    return m


class UdpTransport:
    """One UDP socket per exchange.  Subclass to observe traffic in tests."""

    def __init__(self):
        self.sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)

    def send(self, data: bytes, endpoint: Tuple[str, int]) -> None:
        self.sock.sendto(data, endpoint)

    def recv(self, timeout: float) -> bytes:
        self.sock.settimeout(timeout)
        data, _ = self.sock.recvfrom(MAX_MESSAGE)
        return data

    def close(self):
        self.sock.close()


def parse_endpoint(text: str, default_port: int = DEFAULT_PORT) -> Tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep:
        return text, default_port
    return host, int(port)


def query_roundtrip(endpoint: Tuple[str, int], query: DnsMessage, timeout: float = 2.0,
                    transport_factory=UdpTransport) -> Tuple[DnsMessage, float]:
    """Send ``query`` once and wait for the response with the same id.

    Returns the response and the send-to-receive time in seconds, measured
    with a monotonic clock.  Nothing is retried.
    """
    if timeout <= 0:
        raise ValueError("timeout must be positive")
    payload = encode_message(query)
    transport = transport_factory()
    try:
        start = time.perf_counter()
        deadline = start + timeout
        transport.send(payload, endpoint)
        while True:
            remaining = deadline - time.perf_counter()
            if remaining <= 0:
                raise Timeout(f"no answer from {endpoint[0]}:{endpoint[1]} within {timeout}s")
            try:
                data = transport.recv(remaining)
            except socket.timeout:
                continue
            except ConnectionRefusedError:
                continue
            elapsed = time.perf_counter() - start
            try:
                response = decode_message(data)
            except DnsError:
                continue
            if response.id != query.id or not response.qr:
                continue
            break
    finally:
        transport.close()
    if response.rcode != Rcode.NOERROR:
        raise ServerFailure(response.rcode, response)
    return response, elapsed
