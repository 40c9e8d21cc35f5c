"""Random DNS messages for property tests (hypothesis and seeded)."""
import random
import string

from hypothesis import strategies as st

from geolocdns.dnsmsg import DnsMessage, DnsName, Question, ResourceRecord, RRType
from geolocdns.loc import LocData

_label_chars = string.ascii_letters + string.digits + "-"

labels = st.text(_label_chars, min_size=1, max_size=20).map(str.encode)
names = st.lists(labels, max_size=5).map(DnsName)
representable = st.builds(lambda m, e: m * 10**e, st.integers(0, 9), st.integers(0, 9))
locs = st.builds(LocData, st.integers(-324_000_000, 324_000_000), st.integers(-648_000_000, 648_000_000),
                 st.integers(0, 2**32 - 1), representable, representable, representable)
addresses = st.tuples(*[st.integers(0, 255)] * 4).map(lambda t: ".".join(map(str, t)))
ttls = st.integers(0, 2**31 - 1)


@st.composite
def records(draw):
    kind = draw(st.sampled_from(["A", "CNAME", "LOC", "OTHER"]))
    owner = draw(names)
    ttl = draw(ttls)
    if kind == "A":
        return ResourceRecord(owner, RRType.A, ttl, draw(addresses))
    if kind == "CNAME":
        return ResourceRecord(owner, RRType.CNAME, ttl, draw(names))
    if kind == "LOC":
        return ResourceRecord(owner, RRType.LOC, ttl, draw(locs))
    return ResourceRecord(owner, 16, ttl, draw(st.binary(max_size=40)))


messages = st.builds(
    DnsMessage,
    id=st.integers(0, 0xFFFF), qr=st.booleans(), opcode=st.integers(0, 15), aa=st.booleans(),
    tc=st.booleans(), rd=st.booleans(), ra=st.booleans(), rcode=st.integers(0, 15),
    questions=st.lists(st.builds(Question, names, st.integers(0, 0xFFFF), st.integers(0, 0xFFFF)), max_size=2),
    answers=st.lists(records(), max_size=5),
    authorities=st.lists(records(), max_size=3),
    additionals=st.lists(records(), max_size=5),
)


def random_name(rng):
    return DnsName(
        "".join(rng.choice(_label_chars) for _ in range(rng.randint(1, 15))).encode()
        for _ in range(rng.randint(0, 4)))


def random_loc(rng):
    rep = lambda: rng.randint(0, 9) * 10 ** rng.randint(0, 9)
    return LocData(rng.randint(-324_000_000, 324_000_000), rng.randint(-648_000_000, 648_000_000),
                   rng.randint(0, 2**32 - 1), rep(), rep(), rep())


def random_record(rng):
    owner, ttl = random_name(rng), rng.randint(0, 2**31 - 1)
    kind = rng.randrange(4)
    if kind == 0:
        return ResourceRecord(owner, RRType.A, ttl, ".".join(str(rng.randint(0, 255)) for _ in range(4)))
    if kind == 1:
        return ResourceRecord(owner, RRType.CNAME, ttl, random_name(rng))
    if kind == 2:
        return ResourceRecord(owner, RRType.LOC, ttl, random_loc(rng))
    return ResourceRecord(owner, 99, ttl, rng.randbytes(rng.randint(0, 30)))


def random_message(rng):
    return DnsMessage(
        id=rng.randint(0, 0xFFFF), qr=rng.random() < 0.5, opcode=rng.randint(0, 15),
        aa=rng.random() < 0.5, tc=rng.random() < 0.5, rd=rng.random() < 0.5,
        ra=rng.random() < 0.5, rcode=rng.randint(0, 15),
        questions=[Question(random_name(rng), rng.randint(0, 0xFFFF), 1) for _ in range(rng.randint(0, 2))],
        answers=[random_record(rng) for _ in range(rng.randint(0, 6))],
        authorities=[random_record(rng) for _ in range(rng.randint(0, 2))],
        additionals=[random_record(rng) for _ in range(rng.randint(0, 4))],
    )


def garble(rng, data):
    """Truncate, flip bytes or splice random bytes into ``data``."""
    data = bytearray(data)
    op = rng.randrange(4)
    if op == 0:
        return bytes(data[:rng.randint(0, len(data))])
    if op == 1:
        for _ in range(rng.randint(1, 6)):
            if data:
                data[rng.randrange(len(data))] = rng.randrange(256)
        return bytes(data)
    if op == 2:
        at = rng.randint(0, len(data))
        return bytes(data[:at]) + rng.randbytes(rng.randint(1, 20)) + bytes(data[at:])
    return rng.randbytes(rng.randint(0, 80))
