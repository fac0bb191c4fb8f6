"""Upload-data parsing and the region join.

The upload format is a JSON array of objects, one per row.  Accepted key
spellings: "name"/"country" for the region, "value"/"data" for the payload,
"label" optional, "to" marks flow rows ("magnitude" is an accepted alias for
a flow's value).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import EmptyTable, MalformedInput, MixedKinds, NoMatches
from .geodata import Region, RegionSet, normalize_key


class FieldKind(Enum):
    QUANTITATIVE = "quantitative"
    CATEGORICAL = "categorical"
    FLOW = "flow"


@dataclass(frozen=True)
class DataRow:
    region_name: str
    quantity: Optional[float] = None
    category: Optional[str] = None
    label: Optional[str] = None
    flow_to: Optional[str] = None
    flow_magnitude: Optional[float] = None

    def __post_init__(self):
        if not self.region_name.strip():
            raise MalformedInput("row has empty region name")
        if (self.quantity is None) == (self.category is None):
            raise MalformedInput(
                f"row {self.region_name!r}: exactly one of quantitative/categorical value required")
        if self.quantity is not None and not math.isfinite(self.quantity):
            raise MalformedInput(f"row {self.region_name!r}: non-finite value")
        if self.flow_magnitude is not None and (
                not math.isfinite(self.flow_magnitude) or self.flow_magnitude < 0):
            raise MalformedInput(f"row {self.region_name!r}: bad flow magnitude")

    @property
    def value(self):
        return self.quantity if self.quantity is not None else self.category


@dataclass(frozen=True)
class DataTable:
    rows: tuple[DataRow, ...]
    field_kind: FieldKind


@dataclass(frozen=True)
class JoinedData:
    matched: tuple[tuple[Region, DataRow], ...]
    unmatched_names: tuple[str, ...]
    uncovered_regions: tuple[str, ...]
    field_kind: FieldKind
    warnings: tuple[str, ...] = ()

    def values(self) -> list[float]:
        return [row.quantity for _, row in self.matched if row.quantity is not None]


_NAME_KEYS = ("name", "country")
_VALUE_KEYS = ("value", "data")


def _pick(obj: dict, keys) -> object:
    for k in keys:
        if k in obj:
            return obj[k]
    return None


def parse_data(data: bytes | str) -> DataTable:
    """Parse the upload format and infer the field kind."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, list):
        raise MalformedInput("upload data must be a top-level array of objects")
    if not doc:
        raise EmptyTable("upload data array is empty")

    rows = []
    any_flow = False
    any_numeric = False
    any_string = False
    for i, obj in enumerate(doc):
        if not isinstance(obj, dict):
            raise MalformedInput(f"row {i} is not an object")
        name = _pick(obj, _NAME_KEYS)
        if not isinstance(name, str) or not name.strip():
            raise MalformedInput(f"row {i}: missing region name (keys {_NAME_KEYS})")
        raw_value = _pick(obj, _VALUE_KEYS)
        if raw_value is None and "magnitude" in obj:
            raw_value = obj["magnitude"]
        label = obj.get("label")
        if label is not None and not isinstance(label, str):
            raise MalformedInput(f"row {i}: label must be a string")
        flow_to = obj.get("to")
        if flow_to is not None:
            any_flow = True
            if not isinstance(flow_to, str) or not flow_to.strip():
                raise MalformedInput(f"row {i}: 'to' must be a region name")
            if not isinstance(raw_value, (int, float)) or isinstance(raw_value, bool):
                raise MalformedInput(f"row {i}: flow rows need a numeric magnitude")
            rows.append(DataRow(region_name=name, quantity=float(raw_value), label=label,
                                flow_to=flow_to, flow_magnitude=float(raw_value)))
            continue
        if isinstance(raw_value, bool) or raw_value is None:
            raise MalformedInput(f"row {i}: missing value (keys {_VALUE_KEYS})")
        if isinstance(raw_value, (int, float)):
            any_numeric = True
            rows.append(DataRow(region_name=name, quantity=float(raw_value), label=label))
        elif isinstance(raw_value, str):
            any_string = True
            rows.append(DataRow(region_name=name, category=raw_value, label=label))
        else:
            raise MalformedInput(f"row {i}: value must be a number or string")

    if any_flow:
        if any_numeric or any_string:
            raise MixedKinds("flow rows cannot be mixed with plain value rows")
        return DataTable(rows=tuple(rows), field_kind=FieldKind.FLOW)
    if any_numeric and any_string:
        raise MixedKinds("numeric and string values mixed in one table")
    kind = FieldKind.QUANTITATIVE if any_numeric else FieldKind.CATEGORICAL
    return DataTable(rows=tuple(rows), field_kind=kind)


def parse_aliases(data: bytes | str) -> dict[str, str]:
    """Alias table: JSON object mapping dataset spellings to region names."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid alias JSON: {exc}") from exc
    if not isinstance(doc, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in doc.items()):
        raise MalformedInput("alias table must map strings to strings")
    return {normalize_key(k): normalize_key(v) for k, v in doc.items()}


def resolve_key(name: str, aliases: Optional[dict[str, str]]) -> str:
    key = normalize_key(name)
    if aliases and key in aliases:
        return aliases[key]
    return key


def join(regions: RegionSet, table: DataTable,
         aliases: Optional[dict[str, str]] = None) -> JoinedData:
    """Match rows to regions by normalized key; report the leftovers."""
    by_key = {r.key: r for r in regions.regions}
    matched: list[tuple[Region, DataRow]] = []
    unmatched: list[str] = []
    seen: set[str] = set()
    warnings: list[str] = []
    for row in table.rows:
        key = resolve_key(row.region_name, aliases)
        region = by_key.get(key)
        if region is None:
            unmatched.append(row.region_name)
            continue
        if table.field_kind is FieldKind.FLOW:
            # flow rows may legitimately share an origin region
            matched.append((region, row))
            seen.add(key)
            continue
        if key in seen:
            unmatched.append(row.region_name)
            warnings.append(f"duplicate row for region {row.region_name!r} ignored")
            continue
        seen.add(key)
        matched.append((region, row))
    if not matched:
        raise NoMatches("no data rows matched any region")
    if table.field_kind is FieldKind.FLOW:
        for _, row in matched:
            dest = resolve_key(row.flow_to, aliases)
            if dest not in by_key:
                warnings.append(f"flow destination {row.flow_to!r} matches no region")
    uncovered = tuple(r.key for r in regions.regions if r.key not in seen)
    for name in unmatched:
        warnings.append(f"row {name!r} matches no region")
    return JoinedData(
        matched=tuple(matched),
        unmatched_names=tuple(unmatched),
        uncovered_regions=uncovered,
        field_kind=table.field_kind,
        warnings=tuple(warnings),
    )
