"""The four-dimension grammar: channels, base maps, labels, highlights.

Includes the dual-encoding compatibility matrix (shipped as a data file),
spec parsing, validation, and alternative suggestion.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from importlib import resources
from typing import Optional

from .dataio import FieldKind, JoinedData
from .errors import MalformedSpec, NoAlternatives, TooManyChannels, UnknownChannel
from .geodata import ProjectionKind


class ChannelKind(Enum):
    COLOR_INTENSITY = "color_intensity"
    COLOR_HUE = "color_hue"
    LENGTH_2D = "length_2d"
    LENGTH_3D = "length_3d"
    SIZE = "size"
    QUANTITY = "quantity"
    GLYPH = "glyph"
    DIRECTIONAL_FLOW = "directional_flow"
    NON_DIRECTIONAL_FLOW = "non_directional_flow"
    TEXT = "text"


class BaseMapKind(Enum):
    IMPLICIT = "implicit"
    MINIMAL_POLITICAL = "minimal_political"
    SHAPE_BASED_UNIFORM = "shape_based_uniform"
    SHAPE_BASED_VARIED = "shape_based_varied"
    TOPOGRAPHIC = "topographic"
    STREET = "street"


UNSUPPORTED_BASEMAPS = frozenset({BaseMapKind.TOPOGRAPHIC, BaseMapKind.STREET})


class LabelStrategyKind(Enum):
    SITUATED = "situated"
    MATCHED_TEXT = "matched_text"
    MATCHED_ICON = "matched_icon"
    MATCHED_COLOR = "matched_color"
    LINKED_CONVENIENT = "linked_convenient"
    LINKED_ALIGNED = "linked_aligned"
    LINKED_ORDERED = "linked_ordered"


class HighlightKind(Enum):
    GLOW = "glow"
    PIN = "pin"
    CONTRASTING_COLOR = "contrasting_color"
    EXTRUDE_3D = "extrude_3d"
    CONTOUR = "contour"
    ZOOMED_INSET = "zoomed_inset"


REGION_ONLY_HIGHLIGHTS = frozenset({
    HighlightKind.CONTRASTING_COLOR,
    HighlightKind.EXTRUDE_3D,
    HighlightKind.CONTOUR,
    HighlightKind.ZOOMED_INSET,
})


class Verdict(Enum):
    COMPATIBLE = "compatible"
    COMPATIBLE_IF_MONOCHROME_GLYPH = "compatible_if_monochrome_glyph"
    INCOMPATIBLE = "incompatible"
    UNSPECIFIED = "unspecified"


@dataclass(frozen=True)
class Compatibility:
    verdict: Verdict
    reason: str

    @property
    def allowed(self) -> bool:
        return self.verdict is Verdict.COMPATIBLE

    def resolve(self, glyph_monochrome: bool) -> "Compatibility":
        """Collapse the conditional entry using the glyph's monochrome flag."""
        if self.verdict is not Verdict.COMPATIBLE_IF_MONOCHROME_GLYPH:
            return self
        if glyph_monochrome:
            return Compatibility(Verdict.COMPATIBLE, self.reason)
        return Compatibility(Verdict.INCOMPATIBLE, self.reason)


class CompatibilityMatrix:
    """Symmetric, total relation over the 45 unordered channel pairs."""

    def __init__(self, entries: dict[frozenset, Compatibility]):
        kinds = list(ChannelKind)
        for i, a in enumerate(kinds):
            for b in kinds[i + 1:]:
                if frozenset((a, b)) not in entries:
                    raise MalformedSpec(f"matrix missing pair {a.value}/{b.value}")
        self._entries = entries

    @classmethod
    def load_default(cls) -> "CompatibilityMatrix":
        text = resources.files("geoglyph.data").joinpath(
            "compatibility_matrix.json").read_text("utf-8")
        return cls.from_json(text)

    @classmethod
    def from_json(cls, text: str) -> "CompatibilityMatrix":
        doc = json.loads(text)
        entries: dict[frozenset, Compatibility] = {}
        for e in doc["entries"]:
            a, b = ChannelKind(e["a"]), ChannelKind(e["b"])
            key = frozenset((a, b))
            if key in entries:
                raise MalformedSpec(f"matrix pair {e['a']}/{e['b']} listed twice")
            entries[key] = Compatibility(Verdict(e["verdict"]), e["reason"])
        return cls(entries)

    def lookup(self, a: ChannelKind, b: ChannelKind) -> Compatibility:
        if a is b:
            return Compatibility(Verdict.INCOMPATIBLE, "same channel")
        return self._entries[frozenset((a, b))]


_DEFAULT_MATRIX: Optional[CompatibilityMatrix] = None


def default_matrix() -> CompatibilityMatrix:
    global _DEFAULT_MATRIX
    if _DEFAULT_MATRIX is None:
        _DEFAULT_MATRIX = CompatibilityMatrix.load_default()
    return _DEFAULT_MATRIX


def check_compatibility(a: ChannelKind, b: ChannelKind, glyph_monochrome: bool = False,
                        matrix: Optional[CompatibilityMatrix] = None) -> Compatibility:
    matrix = matrix or default_matrix()
    return matrix.lookup(a, b).resolve(glyph_monochrome)


# -- channel / spec types ----------------------------------------------------

DEFAULT_CATEGORICAL_PALETTE = (
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
)
DEFAULT_INTENSITY_RAMP = ("#f7fbff", "#08306b")


@dataclass(frozen=True)
class GlyphDescriptor:
    icon: Optional[str] = None                       # named icon reference
    chart: Optional[str] = None                      # "bar" | "pie"
    series: tuple[tuple[str, tuple[float, ...]], ...] = ()  # region key -> values
    box: float = 24.0

    def series_for(self, key: str) -> Optional[tuple[float, ...]]:
        for k, vals in self.series:
            if k == key:
                return vals
        return None


@dataclass(frozen=True)
class ChannelSpec:
    kind: ChannelKind
    palette: tuple[str, ...] = ()
    max_bar_height: float = 60.0
    bar_width: float = 8.0
    max_symbol_radius: float = 20.0
    cartogram: bool = False
    icon_unit: float = 1.0
    icons_per_row: int = 5
    icon_name: str = "person"
    glyph: Optional[GlyphDescriptor] = None
    glyph_monochrome: bool = False
    max_stroke_width: float = 6.0


@dataclass(frozen=True)
class LabelStrategy:
    kind: LabelStrategyKind
    font_size: float = 10.0
    sides: tuple[str, ...] = ("right",)
    guide: tuple[tuple[float, float], ...] = ()
    matched_mode_panel: Optional[tuple[float, float, float, float]] = None


@dataclass(frozen=True)
class HighlightSpec:
    kind: HighlightKind
    region: Optional[str] = None        # normalized region key
    point: Optional[tuple[float, float]] = None  # lon/lat
    radius: float = 4.0                 # glow core radius
    pin_height: float = 18.0
    stroke_width: float = 2.5
    scale_factor: float = 2.0
    placement: str = "adjacent"         # "adjacent" | "overlay"


@dataclass(frozen=True)
class InfographicSpec:
    basemap: BaseMapKind = BaseMapKind.MINIMAL_POLITICAL
    basemap_fill: str = "#eceff1"
    basemap_stroke: str = "#90a4ae"
    dot_spacing: float = 8.0
    dot_radius: float = 2.5
    channels: tuple[ChannelSpec, ...] = ()
    labels: Optional[LabelStrategy] = None
    highlights: tuple[HighlightSpec, ...] = ()
    projection: ProjectionKind = ProjectionKind.EQUIRECTANGULAR
    viewport: tuple[float, float] = (800.0, 600.0)
    seed: int = 0
    aliases: tuple[tuple[str, str], ...] = ()
    name: str = ""

    def alias_map(self) -> dict[str, str]:
        return dict(self.aliases)


def _require(cond: bool, message: str):
    if not cond:
        raise MalformedSpec(message)


def parse_spec(data: bytes | str) -> InfographicSpec:
    """Parse a declarative spec document, filling defaults."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedSpec(f"invalid JSON: {exc}") from exc
    _require(isinstance(doc, dict), "spec must be a JSON object")

    raw_channels = doc.get("channels", [])
    _require(isinstance(raw_channels, list) and raw_channels, "spec needs a channels array")
    if len(raw_channels) > 2:
        raise TooManyChannels(f"{len(raw_channels)} channels given, at most 2 allowed")
    channels = tuple(_parse_channel(c) for c in raw_channels)
    if len(channels) == 2 and channels[0].kind is channels[1].kind:
        raise MalformedSpec("dual encoding requires two distinct channel kinds")

    basemap_doc = doc.get("basemap", {})
    if isinstance(basemap_doc, str):
        basemap_doc = {"kind": basemap_doc}
    _require(isinstance(basemap_doc, dict), "basemap must be an object or string")
    try:
        basemap = BaseMapKind(basemap_doc.get("kind", "minimal_political"))
    except ValueError:
        raise MalformedSpec(f"unknown basemap kind {basemap_doc.get('kind')!r}") from None

    try:
        projection = ProjectionKind(doc.get("projection", "equirectangular"))
    except ValueError:
        raise MalformedSpec(f"unknown projection {doc.get('projection')!r}") from None

    viewport = doc.get("viewport", [800, 600])
    _require(isinstance(viewport, (list, tuple)) and len(viewport) == 2, "viewport must be [w, h]")
    w, h = float(viewport[0]), float(viewport[1])
    _require(w > 0 and h > 0, "viewport must be positive")

    seed = doc.get("seed", 0)
    _require(isinstance(seed, int) and 0 <= seed < 2 ** 64, "seed must be a 64-bit unsigned int")

    labels = _parse_labels(doc.get("labels"))
    highlights = tuple(_parse_highlight(hl) for hl in doc.get("highlights", []))
    aliases = doc.get("aliases", {})
    _require(isinstance(aliases, dict), "aliases must be an object")

    return InfographicSpec(
        basemap=basemap,
        basemap_fill=str(basemap_doc.get("fill", "#eceff1")),
        basemap_stroke=str(basemap_doc.get("stroke", "#90a4ae")),
        dot_spacing=float(basemap_doc.get("spacing", 8.0)),
        dot_radius=float(basemap_doc.get("radius", 2.5)),
        channels=channels,
        labels=labels,
        highlights=highlights,
        projection=projection,
        viewport=(w, h),
        seed=seed,
        aliases=tuple(sorted((k.strip().casefold(), str(v).strip().casefold())
                             for k, v in aliases.items())),
        name=str(doc.get("name", "")),
    )


def _parse_channel(doc) -> ChannelSpec:
    _require(isinstance(doc, dict), "channel must be an object")
    kind_name = doc.get("kind")
    try:
        kind = ChannelKind(kind_name)
    except ValueError:
        raise UnknownChannel(f"unknown channel kind {kind_name!r}") from None
    palette = doc.get("palette")
    if palette is None:
        palette = (DEFAULT_INTENSITY_RAMP if kind is ChannelKind.COLOR_INTENSITY
                   else DEFAULT_CATEGORICAL_PALETTE)
    _require(isinstance(palette, (list, tuple)) and len(palette) >= 1, "palette must be a color list")
    for c in palette:
        _require(isinstance(c, str) and len(c) == 7 and c.startswith("#"),
                 f"palette color {c!r} must be #rrggbb")
    glyph = None
    if "glyph" in doc:
        g = doc["glyph"]
        _require(isinstance(g, dict), "glyph descriptor must be an object")
        series = g.get("series", {})
        _require(isinstance(series, dict), "glyph series must map regions to value lists")
        norm_series = []
        for k, vals in sorted(series.items()):
            _require(isinstance(vals, list) and 0 < len(vals) <= 6,
                     "glyph series need 1..6 values per region")
            norm_series.append((k.strip().casefold(), tuple(float(v) for v in vals)))
        glyph = GlyphDescriptor(
            icon=g.get("icon"),
            chart=g.get("chart"),
            series=tuple(norm_series),
            box=float(g.get("box", 24.0)),
        )
        if glyph.chart is not None:
            _require(glyph.chart in ("bar", "pie"), f"unknown glyph chart {glyph.chart!r}")
    return ChannelSpec(
        kind=kind,
        palette=tuple(palette),
        max_bar_height=float(doc.get("max_bar_height", 60.0)),
        bar_width=float(doc.get("bar_width", 8.0)),
        max_symbol_radius=float(doc.get("max_symbol_radius", 20.0)),
        cartogram=bool(doc.get("cartogram", False)),
        icon_unit=float(doc.get("icon_unit", 1.0)),
        icons_per_row=int(doc.get("icons_per_row", 5)),
        icon_name=str(doc.get("icon", "person")),
        glyph=glyph,
        glyph_monochrome=bool(doc.get("glyph_monochrome", False)),
        max_stroke_width=float(doc.get("max_stroke_width", 6.0)),
    )


def _parse_labels(doc) -> Optional[LabelStrategy]:
    if doc is None:
        return None
    _require(isinstance(doc, dict), "labels must be an object")
    try:
        kind = LabelStrategyKind(doc.get("strategy"))
    except ValueError:
        raise MalformedSpec(f"unknown label strategy {doc.get('strategy')!r}") from None
    sides = tuple(doc.get("sides", ["right"]))
    for s in sides:
        _require(s in ("left", "right", "top", "bottom"), f"unknown side {s!r}")
    guide = tuple((float(p[0]), float(p[1])) for p in doc.get("guide", []))
    if kind is LabelStrategyKind.LINKED_ORDERED:
        _require(len(guide) >= 2, "ordered labels need a guide path of at least 2 points")
    if kind is LabelStrategyKind.LINKED_ALIGNED:
        _require(len(sides) >= 1, "aligned labels need at least one side")
    panel = doc.get("panel")
    if panel is not None:
        _require(isinstance(panel, list) and len(panel) == 4, "panel must be [x, y, w, h]")
        panel = tuple(float(v) for v in panel)
    return LabelStrategy(
        kind=kind,
        font_size=float(doc.get("font_size", 10.0)),
        sides=sides,
        guide=guide,
        matched_mode_panel=panel,
    )


def _parse_highlight(doc) -> HighlightSpec:
    _require(isinstance(doc, dict), "highlight must be an object")
    try:
        kind = HighlightKind(doc.get("kind"))
    except ValueError:
        raise MalformedSpec(f"unknown highlight kind {doc.get('kind')!r}") from None
    region = doc.get("region")
    if region is not None:
        region = str(region).strip().casefold()
    point = doc.get("point")
    if point is not None:
        _require(isinstance(point, list) and len(point) == 2, "highlight point must be [lon, lat]")
        point = (float(point[0]), float(point[1]))
    if kind in REGION_ONLY_HIGHLIGHTS:
        _require(region is not None, f"{kind.value} highlight requires a region key")
    else:
        _require(region is not None or point is not None,
                 f"{kind.value} highlight requires a region or a point")
    placement = doc.get("placement", "adjacent")
    _require(placement in ("adjacent", "overlay"), f"unknown inset placement {placement!r}")
    return HighlightSpec(
        kind=kind,
        region=region,
        point=point,
        radius=float(doc.get("radius", 4.0)),
        pin_height=float(doc.get("pin_height", 18.0)),
        stroke_width=float(doc.get("stroke_width", 2.5)),
        scale_factor=float(doc.get("scale_factor", 2.0)),
        placement=placement,
    )


# -- validation --------------------------------------------------------------

QUANTITATIVE_ONLY = frozenset({
    ChannelKind.COLOR_INTENSITY, ChannelKind.LENGTH_2D, ChannelKind.LENGTH_3D,
    ChannelKind.SIZE, ChannelKind.QUANTITY,
})
FLOW_CHANNELS = frozenset({ChannelKind.DIRECTIONAL_FLOW, ChannelKind.NON_DIRECTIONAL_FLOW})

# fixed ranking used by suggest_alternatives
SUGGESTION_PRIORITY = (
    ChannelKind.COLOR_INTENSITY, ChannelKind.COLOR_HUE, ChannelKind.LENGTH_2D,
    ChannelKind.SIZE, ChannelKind.QUANTITY, ChannelKind.LENGTH_3D,
    ChannelKind.GLYPH, ChannelKind.TEXT,
    ChannelKind.DIRECTIONAL_FLOW, ChannelKind.NON_DIRECTIONAL_FLOW,
)


def channel_accepts(kind: ChannelKind, field_kind: FieldKind) -> bool:
    if kind in FLOW_CHANNELS:
        return field_kind is FieldKind.FLOW
    if field_kind is FieldKind.FLOW:
        return False
    if kind in QUANTITATIVE_ONLY:
        return field_kind is FieldKind.QUANTITATIVE
    return True  # ColorHue, Text, Glyph take quantitative or categorical


@dataclass(frozen=True)
class Issue:
    code: str
    severity: str  # "error" | "warning"
    message: str
    element: str = ""


@dataclass(frozen=True)
class ValidationReport:
    verdict: str  # "valid" | "invalid"
    issues: tuple[Issue, ...]
    suggestions: tuple[tuple[ChannelKind, ...], ...] = ()

    @property
    def is_valid(self) -> bool:
        return self.verdict == "valid"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "issues": [
                {"code": i.code, "severity": i.severity, "message": i.message,
                 "element": i.element}
                for i in self.issues
            ],
            "suggestions": [[k.value for k in combo] for combo in self.suggestions],
        }


def validate(spec: InfographicSpec, joined: JoinedData,
             matrix: Optional[CompatibilityMatrix] = None) -> ValidationReport:
    """Check the spec against the matrix, the data kind, and the region set."""
    matrix = matrix or default_matrix()
    issues: list[Issue] = []

    glyph_mono = any(c.kind is ChannelKind.GLYPH and c.glyph_monochrome for c in spec.channels)
    if len(spec.channels) == 2:
        a, b = spec.channels[0].kind, spec.channels[1].kind
        comp = check_compatibility(a, b, glyph_mono, matrix)
        if not comp.allowed:
            issues.append(Issue(
                code="incompatible_pair", severity="error",
                message=f"{a.value} cannot be combined with {b.value}: {comp.reason}",
                element=f"channels[{a.value},{b.value}]"))

    for idx, ch in enumerate(spec.channels):
        if not channel_accepts(ch.kind, joined.field_kind):
            issues.append(Issue(
                code="wrong_data_kind", severity="error",
                message=f"{ch.kind.value} cannot encode {joined.field_kind.value} data",
                element=f"channels[{idx}]"))
        if ch.kind is ChannelKind.QUANTITY and ch.icon_unit <= 0:
            issues.append(Issue(
                code="missing_param", severity="error",
                message="quantity channel needs a positive icon_unit",
                element=f"channels[{idx}]"))
        if ch.kind is ChannelKind.GLYPH:
            g = ch.glyph
            if g is None or (g.icon is None and g.chart is None):
                issues.append(Issue(
                    code="missing_param", severity="error",
                    message="glyph channel needs an icon name or a mini-chart descriptor",
                    element=f"channels[{idx}]"))
            elif g.chart is not None and not g.series:
                issues.append(Issue(
                    code="missing_series", severity="error",
                    message="glyph mini-chart needs per-region series values",
                    element=f"channels[{idx}]"))

    if spec.basemap in UNSUPPORTED_BASEMAPS:
        issues.append(Issue(
            code="unsupported_basemap", severity="error",
            message=f"base map {spec.basemap.value} is in the grammar but not renderable",
            element="basemap"))

    joined_keys = {region.key for region, _ in joined.matched}
    for i, hl in enumerate(spec.highlights):
        if hl.region is not None and hl.region not in joined_keys:
            issues.append(Issue(
                code="unresolved_target", severity="error",
                message=f"highlight target {hl.region!r} is not a joined region",
                element=f"highlights[{i}]"))

    if spec.labels is not None:
        lab = spec.labels
        if lab.kind is LabelStrategyKind.LINKED_ORDERED and len(lab.guide) < 2:
            issues.append(Issue(
                code="missing_param", severity="error",
                message="ordered labels need a guide path of at least 2 points",
                element="labels"))
        if lab.kind is LabelStrategyKind.LINKED_ALIGNED and not lab.sides:
            issues.append(Issue(
                code="missing_param", severity="error",
                message="aligned labels need at least one side", element="labels"))

    for w in joined.warnings:
        issues.append(Issue(code="join_warning", severity="warning", message=w, element="data"))

    verdict = "invalid" if any(i.severity == "error" for i in issues) else "valid"
    suggestions: tuple[tuple[ChannelKind, ...], ...] = ()
    if any(i.code in ("incompatible_pair", "wrong_data_kind") for i in issues):
        try:
            suggestions = suggest_alternatives(spec, joined, matrix)
        except NoAlternatives:
            suggestions = ()
    return ValidationReport(verdict=verdict, issues=tuple(issues), suggestions=suggestions)


def suggest_alternatives(spec: InfographicSpec, joined: JoinedData,
                         matrix: Optional[CompatibilityMatrix] = None
                         ) -> tuple[tuple[ChannelKind, ...], ...]:
    """Ranked channel replacements for a spec with channel-related errors.

    Conditional glyph pairs count as viable: a suggested glyph is assumed
    monochrome (apply_suggestion sets the flag).
    """
    matrix = matrix or default_matrix()
    kind = joined.field_kind
    first = spec.channels[0].kind if spec.channels else None
    out: list[tuple[ChannelKind, ...]] = []
    if first is not None and channel_accepts(first, kind) and len(spec.channels) == 2:
        for cand in SUGGESTION_PRIORITY:
            if cand is first or not channel_accepts(cand, kind):
                continue
            comp = matrix.lookup(first, cand)
            if comp.verdict in (Verdict.COMPATIBLE, Verdict.COMPATIBLE_IF_MONOCHROME_GLYPH):
                out.append((first, cand))
    else:
        for cand in SUGGESTION_PRIORITY:
            if channel_accepts(cand, kind):
                out.append((cand,))
    if not out:
        raise NoAlternatives("no compatible channel alternative exists for this data")
    return tuple(out)


def apply_suggestion(spec: InfographicSpec, combo: tuple[ChannelKind, ...]) -> InfographicSpec:
    """Rebuild the spec's channel list from a suggested combination."""
    by_kind = {c.kind: c for c in spec.channels}
    channels = []
    for k in combo:
        base = by_kind.get(k, ChannelSpec(
            kind=k,
            palette=(DEFAULT_INTENSITY_RAMP if k is ChannelKind.COLOR_INTENSITY
                     else DEFAULT_CATEGORICAL_PALETTE)))
        if k is ChannelKind.GLYPH:
            glyph = base.glyph or GlyphDescriptor(icon="pin")
            base = replace(base, glyph=glyph, glyph_monochrome=True)
        channels.append(base)
    return replace(spec, channels=tuple(channels))


def catalog() -> dict:
    """Design-space enumeration served by the catalog endpoint."""
    matrix = default_matrix()
    kinds = list(ChannelKind)
    pairs = []
    for i, a in enumerate(kinds):
        for b in kinds[i + 1:]:
            comp = matrix.lookup(a, b)
            pairs.append({"a": a.value, "b": b.value,
                          "verdict": comp.verdict.value, "reason": comp.reason})
    return {
        "channels": [k.value for k in kinds],
        "basemaps": [
            {"kind": k.value, "supported": k not in UNSUPPORTED_BASEMAPS}
            for k in BaseMapKind
        ],
        "label_strategies": [k.value for k in LabelStrategyKind],
        "highlights": [k.value for k in HighlightKind],
        "matrix": pairs,
    }
