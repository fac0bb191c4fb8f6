from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from geoglyph.cli import create_app
from geoglyph.geodata import parse_boundaries


def square(name, x0, y0, size=10.0):
    ring = [[x0, y0], [x0 + size, y0], [x0 + size, y0 + size], [x0, y0 + size], [x0, y0]]
    return {"type": "Feature", "properties": {"name": name},
            "geometry": {"type": "Polygon", "coordinates": [ring]}}


@pytest.fixture(scope="module")
def client():
    regions = parse_boundaries(json.dumps({
        "type": "FeatureCollection",
        "features": [square("Alpha", 0, 0), square("Beta", 20, 0),
                     square("Gamma", 40, 0)]}))
    return TestClient(create_app(regions))


SPEC = {"channels": [{"kind": "color_intensity"}], "viewport": [400, 300]}
BAD_SPEC = {"channels": [{"kind": "color_intensity"}, {"kind": "color_hue"}]}
DATA = [{"name": "Alpha", "value": 1}, {"name": "Beta", "value": 2}]


class TestRenderEndpoint:
    def test_success_returns_svg(self, client):
        resp = client.post("/render", json={"spec": SPEC, "data": DATA})
        assert resp.status_code == 200
        assert resp.headers["content-type"].startswith("image/svg+xml")
        assert resp.content.startswith(b'<?xml version="1.0"')

    def test_deterministic_bytes(self, client):
        a = client.post("/render", json={"spec": SPEC, "data": DATA})
        b = client.post("/render", json={"spec": SPEC, "data": DATA})
        assert a.content == b.content

    def test_invalid_spec_422_report(self, client):
        resp = client.post("/render", json={"spec": BAD_SPEC, "data": DATA})
        assert resp.status_code == 422
        report = resp.json()
        assert report["verdict"] == "invalid"
        assert any(i["code"] == "incompatible_pair" for i in report["issues"])
        assert report["suggestions"]

    def test_malformed_body_400(self, client):
        resp = client.post("/render", content=b"{nope",
                           headers={"content-type": "application/json"})
        assert resp.status_code == 400

    def test_missing_keys_400(self, client):
        resp = client.post("/render", json={"spec": SPEC})
        assert resp.status_code == 400


class TestValidateEndpoint:
    def test_valid(self, client):
        resp = client.post("/validate", json={"spec": SPEC, "data": DATA})
        assert resp.status_code == 200
        assert resp.json()["verdict"] == "valid"

    def test_invalid_is_200_with_report(self, client):
        resp = client.post("/validate", json={"spec": BAD_SPEC, "data": DATA})
        assert resp.status_code == 200
        assert resp.json()["verdict"] == "invalid"

    def test_parse_error_reported(self, client):
        resp = client.post("/validate", json={"spec": {"channels": []}, "data": DATA})
        assert resp.status_code == 200
        assert resp.json()["verdict"] == "invalid"


class TestSuggestEndpoint:
    def test_alternatives_for_valid_spec(self, client):
        resp = client.post("/suggest", json={"spec": SPEC, "data": DATA})
        assert resp.status_code == 200
        assert ["color_intensity"] in resp.json()["suggestions"]

    def test_alternatives_for_invalid_pair(self, client):
        resp = client.post("/suggest", json={"spec": BAD_SPEC, "data": DATA})
        suggestions = resp.json()["suggestions"]
        assert suggestions[0] == ["color_intensity", "length_2d"]


class TestCatalogEndpoint:
    def test_channels_and_matrix(self, client):
        doc = client.get("/catalog").json()
        assert len(doc["channels"]) == 10
        assert len(doc["matrix"]) == 45
        verdicts = {e["verdict"] for e in doc["matrix"]}
        assert verdicts == {"compatible", "compatible_if_monochrome_glyph",
                            "incompatible", "unspecified"}

    def test_basemap_support_flags(self, client):
        doc = client.get("/catalog").json()
        flags = {b["kind"]: b["supported"] for b in doc["basemaps"]}
        assert flags["street"] is False and flags["implicit"] is True


class TestGalleryEndpoints:
    def test_gallery_list(self, client):
        entries = client.get("/gallery").json()
        assert len(entries) >= 6
        for entry in entries:
            assert {"name", "title", "spec", "data"} <= set(entry)

    def test_gallery_thumbnails_render(self, client):
        # thumbnails use the bundled world boundaries, so spin up that app
        app_client = TestClient(create_app())
        for entry in app_client.get("/gallery").json():
            resp = app_client.get(f"/gallery/{entry['name']}.svg")
            assert resp.status_code == 200, entry["name"]
            assert resp.content.startswith(b'<?xml version="1.0"')

    def test_gallery_unknown_404(self, client):
        assert client.get("/gallery/nope.svg").status_code == 404
