"""Command-line surface and HTTP render service."""
from __future__ import annotations

import json
import os
import sys
from importlib import resources
from pathlib import Path
from typing import Optional

import click
from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from . import dataio, designspace, geodata, pipeline
from .errors import GeoglyphError
from .geodata import RegionSet

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID = 2

BOUNDARIES_ENV = "GEOGLYPH_BOUNDARIES"


def default_boundaries_bytes() -> bytes:
    override = os.environ.get(BOUNDARIES_ENV)
    if override:
        return Path(override).read_bytes()
    return resources.files("geoglyph.data").joinpath("world.geojson").read_bytes()


def load_regions(path: Optional[str]) -> RegionSet:
    raw = Path(path).read_bytes() if path else default_boundaries_bytes()
    return geodata.parse_boundaries(raw)


def gallery_entries() -> list[dict]:
    root = resources.files("geoglyph.data").joinpath("gallery")
    entries = []
    for item in sorted(root.iterdir(), key=lambda p: p.name):
        if item.name.endswith(".json"):
            entries.append(json.loads(item.read_text("utf-8")))
    return entries


def _report_json(report: designspace.ValidationReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=False)


@click.group()
def main():
    """Compile declarative geo-infographic specs into SVG."""


def _read_inputs(spec, data, boundaries):
    try:
        spec_bytes = Path(spec).read_bytes()
        data_bytes = Path(data).read_bytes()
        regions = load_regions(boundaries)
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        sys.exit(EXIT_IO)
    except GeoglyphError as exc:
        click.echo(f"boundary error: {exc.message}", err=True)
        sys.exit(EXIT_IO)
    return spec_bytes, data_bytes, regions


@main.command()
@click.option("--spec", required=True, type=click.Path())
@click.option("--data", required=True, type=click.Path())
@click.option("--boundaries", type=click.Path(), default=None,
              help="GeoJSON boundaries (default: bundled world fixture)")
@click.option("--out", required=True, type=click.Path())
@click.option("--seed", type=int, default=None, help="Override the spec's seed")
def render(spec, data, boundaries, out, seed):
    """Render an SVG; exit 0 on success, 2 when the spec is invalid."""
    spec_bytes, data_bytes, regions = _read_inputs(spec, data, boundaries)
    if seed is not None:
        doc = json.loads(spec_bytes)
        doc["seed"] = seed
        spec_bytes = json.dumps(doc).encode("utf-8")
    result = pipeline.render(spec_bytes, data_bytes, regions)
    if not result.ok:
        click.echo(_report_json(result.report), err=True)
        sys.exit(EXIT_INVALID)
    try:
        Path(out).write_bytes(result.svg)
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        sys.exit(EXIT_IO)
    sys.exit(EXIT_OK)


def _validation_report(spec_bytes, data_bytes, regions):
    spec = designspace.parse_spec(spec_bytes)
    table = dataio.parse_data(data_bytes)
    joined = dataio.join(regions, table, spec.alias_map())
    return spec, joined, designspace.validate(spec, joined)


@main.command()
@click.option("--spec", required=True, type=click.Path())
@click.option("--data", required=True, type=click.Path())
@click.option("--boundaries", type=click.Path(), default=None)
def validate(spec, data, boundaries):
    """Print the validation report as JSON."""
    spec_bytes, data_bytes, regions = _read_inputs(spec, data, boundaries)
    try:
        _spec, _joined, report = _validation_report(spec_bytes, data_bytes, regions)
    except GeoglyphError as exc:
        click.echo(json.dumps({"verdict": "invalid", "issues": [
            {"code": exc.code, "severity": "error", "message": exc.message,
             "element": ""}], "suggestions": []}, indent=2))
        sys.exit(EXIT_INVALID)
    click.echo(_report_json(report))
    sys.exit(EXIT_OK if report.is_valid else EXIT_INVALID)


@main.command()
@click.option("--spec", required=True, type=click.Path())
@click.option("--data", required=True, type=click.Path())
@click.option("--boundaries", type=click.Path(), default=None)
def suggest(spec, data, boundaries):
    """Print the validation report plus ranked channel alternatives."""
    spec_bytes, data_bytes, regions = _read_inputs(spec, data, boundaries)
    try:
        parsed, joined, report = _validation_report(spec_bytes, data_bytes, regions)
        doc = report.to_dict()
        if not doc["suggestions"]:
            try:
                combos = designspace.suggest_alternatives(parsed, joined)
                doc["suggestions"] = [[k.value for k in combo] for combo in combos]
            except GeoglyphError:
                pass
    except GeoglyphError as exc:
        click.echo(json.dumps({"verdict": "invalid", "issues": [
            {"code": exc.code, "severity": "error", "message": exc.message,
             "element": ""}], "suggestions": []}, indent=2))
        sys.exit(EXIT_INVALID)
    click.echo(json.dumps(doc, indent=2))
    sys.exit(EXIT_OK if report.is_valid else EXIT_INVALID)


@main.command()
@click.option("--port", type=int, default=8008)
@click.option("--host", default="127.0.0.1")
@click.option("--boundaries", type=click.Path(), default=None)
def serve(port, host, boundaries):
    """Run the HTTP render service backing the authoring UI."""
    import uvicorn

    app = create_app(load_regions(boundaries))
    uvicorn.run(app, host=host, port=port, log_level="warning")


# -- HTTP service ------------------------------------------------------------

def create_app(regions: Optional[RegionSet] = None):
    if regions is None:
        regions = geodata.parse_boundaries(default_boundaries_bytes())

    app = FastAPI(title="geoglyph render service")
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])

    async def _body_parts(request: Request):
        try:
            body = await request.json()
        except Exception:
            return None, None, JSONResponse({"error": "malformed JSON body"},
                                            status_code=400)
        if not isinstance(body, dict) or "spec" not in body or "data" not in body:
            return None, None, JSONResponse(
                {"error": "body must be an object with 'spec' and 'data'"},
                status_code=400)
        return json.dumps(body["spec"]), json.dumps(body["data"]), None

    @app.post("/render")
    async def render_endpoint(request: Request):
        spec_text, data_text, err = await _body_parts(request)
        if err:
            return err
        result = pipeline.render(spec_text, data_text, regions)
        if not result.ok:
            return JSONResponse(result.report.to_dict(), status_code=422)
        return Response(content=result.svg, media_type="image/svg+xml")

    @app.post("/validate")
    async def validate_endpoint(request: Request):
        spec_text, data_text, err = await _body_parts(request)
        if err:
            return err
        try:
            _spec, _joined, report = _validation_report(spec_text, data_text, regions)
        except GeoglyphError as exc:
            return JSONResponse({"verdict": "invalid", "issues": [
                {"code": exc.code, "severity": "error", "message": exc.message,
                 "element": ""}], "suggestions": []})
        return JSONResponse(report.to_dict())

    @app.post("/suggest")
    async def suggest_endpoint(request: Request):
        spec_text, data_text, err = await _body_parts(request)
        if err:
            return err
        try:
            parsed, joined, report = _validation_report(spec_text, data_text, regions)
            doc = report.to_dict()
            if not doc["suggestions"]:
                try:
                    combos = designspace.suggest_alternatives(parsed, joined)
                    doc["suggestions"] = [[k.value for k in c] for c in combos]
                except GeoglyphError:
                    pass
        except GeoglyphError as exc:
            return JSONResponse({"verdict": "invalid", "issues": [
                {"code": exc.code, "severity": "error", "message": exc.message,
                 "element": ""}], "suggestions": []})
        return JSONResponse(doc)

    @app.get("/catalog")
    async def catalog_endpoint():
        return JSONResponse(designspace.catalog())

    @app.get("/gallery")
    async def gallery_endpoint():
        return JSONResponse(gallery_entries())

    @app.get("/gallery/{name}.svg")
    async def gallery_thumbnail(name: str):
        for entry in gallery_entries():
            if entry["name"] == name:
                result = pipeline.render(json.dumps(entry["spec"]),
                                         json.dumps(entry["data"]), regions)
                if not result.ok:
                    return JSONResponse(result.report.to_dict(), status_code=422)
                return Response(content=result.svg, media_type="image/svg+xml")
        return JSONResponse({"error": f"no gallery entry {name!r}"}, status_code=404)

    return app


if __name__ == "__main__":
    main()
