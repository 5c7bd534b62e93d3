import json
import xml.etree.ElementTree as ET

import numpy as np

from dopplergeo.export import (
    STYLE_ELLIPSOID,
    STYLE_TERRAIN,
    write_geojson,
    write_kml,
)

KML_NS = "{http://www.opengis.net/kml/2.2}"

CURVE = np.array([
    [-34.64620123456789, 138.83301234567891, 123.456789],
    [-34.65000987654321, 138.84009876543210, 0.0],
    [-34.66, 138.85, -12.5],
])
MARKS = np.array([[-34.7, 138.9, 10.0], [-34.71, 138.91, 20.0]])


def test_empty_kml_is_wellformed():
    root = ET.fromstring(write_kml())
    assert root.tag == f"{KML_NS}kml"
    doc = root.find(f"{KML_NS}Document")
    assert doc is not None
    assert doc.findall(f"{KML_NS}Placemark") == []
    styles = {s.get("id") for s in doc.findall(f"{KML_NS}Style")}
    assert styles == {STYLE_TERRAIN, STYLE_ELLIPSOID}


def test_two_curves_two_linestrings():
    data = write_kml(polylines=[("near", CURVE, STYLE_ELLIPSOID),
                                ("far", CURVE + 0.5, STYLE_ELLIPSOID)])
    root = ET.fromstring(data)
    lines = root.findall(f".//{KML_NS}LineString")
    assert len(lines) == 2
    for line in lines:
        assert line.find(f"{KML_NS}altitudeMode").text == "absolute"


def test_kml_coordinates_round_trip():
    data = write_kml(polylines=[("curve", CURVE, STYLE_ELLIPSOID)],
                     placemark_sets=[("marks", MARKS, STYLE_TERRAIN)])
    root = ET.fromstring(data)
    text = root.find(f".//{KML_NS}LineString/{KML_NS}coordinates").text
    rows = np.array([[float(v) for v in tok.split(",")] for tok in text.split()])
    assert np.abs(rows[:, 0] - CURVE[:, 1]).max() < 1e-9  # lon first
    assert np.abs(rows[:, 1] - CURVE[:, 0]).max() < 1e-9
    assert np.abs(rows[:, 2] - CURVE[:, 2]).max() < 1e-9
    points = root.findall(f".//{KML_NS}Point/{KML_NS}coordinates")
    assert len(points) == len(MARKS)


def test_kml_styles_referenced():
    data = write_kml(placemark_sets=[("terrain marks", MARKS, STYLE_TERRAIN)])
    root = ET.fromstring(data)
    style_url = root.find(f".//{KML_NS}Placemark/{KML_NS}styleUrl").text
    assert style_url == f"#{STYLE_TERRAIN}"


def test_kml_escapes_labels():
    data = write_kml(polylines=[("a <b> & c", CURVE, STYLE_ELLIPSOID)])
    root = ET.fromstring(data)  # would raise if unescaped
    assert "a <b> & c" in [p.find(f"{KML_NS}name").text
                           for p in root.findall(f".//{KML_NS}Placemark")]


def test_empty_geojson():
    doc = json.loads(write_geojson())
    assert doc == {"type": "FeatureCollection", "features": []}


def test_geojson_lon_first_and_round_trip():
    doc = json.loads(write_geojson(polylines=[("curve", CURVE, STYLE_ELLIPSOID)],
                                   placemark_sets=[("marks", MARKS, STYLE_TERRAIN)]))
    line = doc["features"][0]
    assert line["geometry"]["type"] == "LineString"
    coords = np.array(line["geometry"]["coordinates"])
    assert np.abs(coords[:, 0] - CURVE[:, 1]).max() < 1e-9
    assert np.abs(coords[:, 1] - CURVE[:, 0]).max() < 1e-9
    multi = doc["features"][1]
    assert multi["geometry"]["type"] == "MultiPoint"
    assert len(multi["geometry"]["coordinates"]) == len(MARKS)


def test_outputs_deterministic():
    args = dict(polylines=[("curve", CURVE, STYLE_ELLIPSOID)],
                placemark_sets=[("marks", MARKS, STYLE_TERRAIN)])
    assert write_kml(**args) == write_kml(**args)
    assert write_geojson(**args) == write_geojson(**args)
