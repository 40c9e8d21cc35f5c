"""Small authoritative UDP server for one service topology.

Any query for the configured service name, whatever its QTYPE, is answered
with the full announcement in one response:

* answer section: one CNAME per edge (service -> edge, in edge order),
  then, unless disabled, one LOC per area owned by the area's edge
  hostname, in area order;
* additional section: one A per edge and per cloud instance.

Other names get NXDOMAIN; messages without exactly one question get FORMERR.
"""
from __future__ import annotations

import logging
import socketserver
import threading
from dataclasses import dataclass
from typing import Tuple

from .dnsmsg import (DnsError, DnsMessage, Rcode, RRType, ResourceRecord,
                     decode_message, encode_message, make_query)
from .topology import DEFAULT_TTL, InvalidTopology, ServiceTopology, validate

DEFAULT_BIND = ("127.0.0.1", 5353)

log = logging.getLogger(__name__)


class BindError(OSError):
    pass


@dataclass(frozen=True)
class ServerConfig:
    topology: ServiceTopology
    bind_address: Tuple[str, int] = DEFAULT_BIND
    include_loc: bool = True

    def __post_init__(self):
        violations = validate(self.topology)
        if violations:
            raise InvalidTopology(violations)
        # Fail at startup rather than per request if the payload cannot fit.
        probe = make_query(self.topology.service_name, id=0)
        encode_message(build_response(probe, self))


def _reply(query: DnsMessage, rcode: int) -> DnsMessage:
    return DnsMessage(id=query.id, qr=True, opcode=query.opcode, aa=True, rd=query.rd,
                      rcode=rcode, questions=list(query.questions))


def build_response(query: DnsMessage, cfg: ServerConfig) -> DnsMessage:
    if len(query.questions) != 1:
        return _reply(query, Rcode.FORMERR)
    t = cfg.topology
    if query.questions[0].name != t.service_name:
        return _reply(query, Rcode.NXDOMAIN)

    resp = _reply(query, Rcode.NOERROR)
    resp.answers = [ResourceRecord(t.service_name, RRType.CNAME, DEFAULT_TTL, e.hostname)
                    for e in t.edges]
    if cfg.include_loc:
        resp.answers += [ResourceRecord(a.edge_hostname, RRType.LOC, a.ttl_s, a.to_loc())
                         for a in t.areas]
    resp.additionals = [ResourceRecord(i.hostname, RRType.A, DEFAULT_TTL, i.address)
                        for i in (*t.edges, *t.clouds)]
    return resp


def answer_datagram(data: bytes, cfg: ServerConfig):
    """Response bytes for one request datagram, or None to stay silent."""
    try:
        query = decode_message(data)
    except DnsError:
        if len(data) < 12:
            return None
        query = DnsMessage(id=int.from_bytes(data[:2], "big"), rd=False)
        return encode_message(_reply(query, Rcode.FORMERR)), query, Rcode.FORMERR
    if query.qr:
        return None
    resp = build_response(query, cfg)
    return encode_message(resp), query, resp.rcode


class _Handler(socketserver.BaseRequestHandler):
    def handle(self):
        data, sock = self.request
        result = answer_datagram(data, self.server.cfg)
        if result is None:
            return
        payload, query, rcode = result
        sock.sendto(payload, self.client_address)
        qname = query.questions[0].name.to_text() if query.questions else "-"
        log.info("%s %s %s", self.client_address[0], qname, Rcode(rcode).name)


class _UdpServer(socketserver.ThreadingUDPServer):
    daemon_threads = True
    allow_reuse_address = False
    max_packet_size = 65535

    def __init__(self, cfg: ServerConfig):
        self.cfg = cfg
        super().__init__(cfg.bind_address, _Handler)


class ServerHandle:
    """A running server.  Use as a context manager or call :meth:`stop`."""

    def __init__(self, server: _UdpServer):
        self._server = server
        self._thread = threading.Thread(target=server.serve_forever,
                                        kwargs={"poll_interval": 0.05}, daemon=True)
        self._thread.start()

    @property
    def address(self) -> Tuple[str, int]:
        return self._server.server_address[:2]

    def stop(self):
        self._server.shutdown()
        self._server.server_close()
        self._thread.join()

    def wait(self):
        self._thread.join()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.stop()


def serve(cfg: ServerConfig) -> ServerHandle:
    try:
        server = _UdpServer(cfg)
    except OSError as exc:
        raise BindError(f"cannot bind {cfg.bind_address[0]}:{cfg.bind_address[1]}: {exc}") from exc
    return ServerHandle(server)

