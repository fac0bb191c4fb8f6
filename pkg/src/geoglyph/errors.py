"""Exception hierarchy shared by every stage of the engine."""
from __future__ import annotations


class GeoglyphError(Exception):
    """Base class; carries a stable machine-readable code."""

    code = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


# -- boundary / geometry -----------------------------------------------------

class MalformedInput(GeoglyphError):
    code = "malformed_input"


class UnsupportedGeometry(GeoglyphError):
    code = "unsupported_geometry"


class DuplicateRegion(GeoglyphError):
    code = "duplicate_region"


class DegenerateRegion(GeoglyphError):
    code = "degenerate_region"


# -- data upload -------------------------------------------------------------

class MixedKinds(GeoglyphError):
    code = "mixed_kinds"


class EmptyTable(GeoglyphError):
    code = "empty_table"


class NoMatches(GeoglyphError):
    code = "no_matches"


# -- spec / validation -------------------------------------------------------

class MalformedSpec(GeoglyphError):
    code = "malformed_spec"


class UnknownChannel(GeoglyphError):
    code = "unknown_channel"


class TooManyChannels(GeoglyphError):
    code = "too_many_channels"


class UnsupportedBaseMap(GeoglyphError):
    code = "unsupported_basemap"


class NoAlternatives(GeoglyphError):
    code = "no_alternatives"


# -- encoding ----------------------------------------------------------------

class WrongDataKind(GeoglyphError):
    code = "wrong_data_kind"


class TooManyIcons(GeoglyphError):
    code = "too_many_icons"


class MissingSeries(GeoglyphError):
    code = "missing_series"


class UnknownIcon(GeoglyphError):
    code = "unknown_icon"


class UnresolvedEndpoint(GeoglyphError):
    code = "unresolved_endpoint"


class IncompatiblePair(GeoglyphError):
    code = "incompatible_pair"


# -- labels / highlights / scene --------------------------------------------

class PanelOverflow(GeoglyphError):
    code = "panel_overflow"


class SideOverflow(GeoglyphError):
    code = "side_overflow"


class UnresolvedTarget(GeoglyphError):
    code = "unresolved_target"


class UnknownRegion(GeoglyphError):
    code = "unknown_region"


class NoRoom(GeoglyphError):
    code = "no_room"


class DuplicateId(GeoglyphError):
    code = "duplicate_id"


class StageError(GeoglyphError):
    """Wraps a module error with the pipeline stage it came from."""

    code = "stage_error"

    def __init__(self, stage: str, cause: GeoglyphError):
        super().__init__(f"{stage}: {cause.message}")
        self.stage = stage
        self.cause = cause
        self.code = cause.code
