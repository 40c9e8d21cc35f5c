import json

import pytest

from conftest import two_edge_doc, loc_example_doc
from geolocdns.dnsmsg import DnsName, RRType
from geolocdns.geodesy import GeoPoint
from geolocdns.loc import loc_to_geopoint
from geolocdns.topology import (Asa, CloudInstance, ConfigError, EdgeInstance, InvalidTopology,
                                ServiceTopology, dump_config, from_dict, generate_zone,
                                load_config, read_zone, synth_topology, validate)

N = DnsName.from_text


def kinds(violations):
    return [v.kind for v in violations]


def test_two_edge_is_valid(two_edge_topology):
    assert validate(two_edge_topology) == []
    assert len(two_edge_topology.areas) == 11
    assert len(two_edge_topology.areas_of("edgeA.myservice.com")) == 4
    assert len(two_edge_topology.areas_of("edgeB.myservice.com")) == 7


def test_edge_without_area():
    doc = two_edge_doc()
    doc["edges"].append({"hostname": "edgeC.myservice.com", "address": "10.0.0.3"})
    violations = validate(from_dict(doc))
    assert kinds(violations) == ["EdgeWithoutArea"]
    assert str(violations[0]) == "EdgeWithoutArea: edgeC.myservice.com"


def test_dangling_reference_and_other_violations():
    t = ServiceTopology(
        N("s.example"),
        (EdgeInstance(N("e.s.example"), "10.0.0.1"), EdgeInstance(N("E.s.example"), "10.0.0.2")),
        (),
        (Asa("x", GeoPoint(0, 0), 0.0, N("e.s.example")),
         Asa("y", GeoPoint(0, 0), 10.0, N("ghost.s.example"))),
    )
    assert sorted(kinds(validate(t))) == sorted(
        ["DuplicateHostname", "NoCloudFallback", "NonPositiveRadius", "DanglingEdgeReference"])


def test_load_minimal():
    doc = {"service": "s.example",
           "edges": [{"hostname": "e.s.example", "address": "10.0.0.1"}],
           "clouds": [{"hostname": "c.s.example", "address": "10.0.0.2"}],
           "areas": [{"id": "a", "lat_deg": 1, "lon_deg": 2, "radius_m": 100, "edge": "e.s.example"}]}
    t = load_config(json.dumps(doc))
    assert len(t.areas) == 1
    assert t.areas[0].ttl_s == 300
    assert t.areas[0].center.height_m == 0.0


def test_load_missing_clouds():
    doc = two_edge_doc()
    del doc["clouds"]
    with pytest.raises(InvalidTopology) as info:
        load_config(json.dumps(doc))
    assert kinds(info.value.violations) == ["NoCloudFallback"]


def test_load_keeps_order(two_edge_topology):
    t = load_config(json.dumps(two_edge_doc()))
    assert [a.id for a in t.areas] == [a["id"] for a in two_edge_doc()["areas"]]


@pytest.mark.parametrize("mutate, path", [
    (lambda d: d.pop("service"), "$"),
    (lambda d: d["edges"][0].update(address="10.0.0"), "$.edges[0].address"),
    (lambda d: d["areas"][2].update(lat_deg=95), "$.areas[2].lat_deg"),
    (lambda d: d["areas"][0].pop("radius_m"), "$.areas[0]"),
    (lambda d: d.update(extra=1), "$"),
    (lambda d: d["areas"][0].update(ttl_s="60"), "$.areas[0].ttl_s"),
    (lambda d: d["areas"][0].update(edge="bad..name"), "$.areas[0].edge"),
])
def test_schema_errors(mutate, path):
    doc = two_edge_doc()
    mutate(doc)
    with pytest.raises(ConfigError) as info:
        load_config(json.dumps(doc))
    assert info.value.path == path


def test_bad_json():
    with pytest.raises(ConfigError):
        load_config("{not json")


def test_config_round_trip(two_edge_topology):
    assert load_config(dump_config(two_edge_topology)) == two_edge_topology


def test_zone_example_line():
    zone = generate_zone(from_dict(loc_example_doc()))
    assert "edgeA.myservice.com 300 IN LOC 28 43 0.000 N 128 12 0.000 W 200.00m 20m 10m 10m" in zone.splitlines()


def test_zone_layout(two_edge_topology):
    records = read_zone(generate_zone(two_edge_topology))
    types = [r.rrtype for r in records]
    assert types == [RRType.CNAME] * 2 + [RRType.A] * 3 + [RRType.LOC] * 11
    locs = [r for r in records if r.rrtype == RRType.LOC]
    assert [r.owner for r in locs] == [a.edge_hostname for a in two_edge_topology.areas]
    assert [r.ttl for r in locs] == [a.ttl_s for a in two_edge_topology.areas]


def test_zone_round_trip_within_quantization():
    t = synth_topology(50, 20, 250.0, seed=9)
    t = ServiceTopology(t.service_name, t.edges, t.clouds, tuple(
        Asa(a.id, GeoPoint(a.center.lat_deg + 1.234567e-7, a.center.lon_deg - 3.3e-8, 12.345), a.radius_m,
            a.edge_hostname) for a in t.areas))
    locs = [r.rdata for r in read_zone(generate_zone(t)) if r.rrtype == RRType.LOC]
    assert len(locs) == 50
    for asa, d in zip(t.areas, locs):
        center, radius = loc_to_geopoint(d)
        assert abs(center.lat_deg - asa.center.lat_deg) * 3_600_000 <= 1
        assert abs(center.lon_deg - asa.center.lon_deg) * 3_600_000 <= 1
        assert abs(center.height_m - asa.center.height_m) <= 0.005 + 1e-9
        assert abs(radius - asa.radius_m) <= 0.005


def test_synth_topology_shape_and_determinism():
    t = synth_topology(400, 20.0, 500.0, seed=42)
    assert len(t.areas) == 400 and validate(t) == []
    half_deg_lat = 20 ** 0.5 * 1000 / 2 / (6378137 * 3.141592653589793 / 180)
    assert all(abs(a.center.lat_deg - 46.62) <= half_deg_lat + 1e-6 for a in t.areas)
    assert generate_zone(t) == generate_zone(synth_topology(400, 20.0, 500.0, seed=42))
    assert generate_zone(t) != generate_zone(synth_topology(400, 20.0, 500.0, seed=43))
    one = synth_topology(1, 5.0, 100.0, seed=7)
    assert len(one.areas) == 1
    with pytest.raises(ValueError):
        synth_topology(0)


def test_overlapping_areas_accepted():
    doc = two_edge_doc()
    doc["areas"].append(dict(doc["areas"][0], id="dup"))
    assert validate(from_dict(doc)) == []
