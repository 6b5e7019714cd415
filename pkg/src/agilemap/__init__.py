"""Agile Map: a typed relation graph over agile practices.

The map relates practices through four relation types (Specialization,
Support, Requires, Alternative) and powers selection analysis: which
practices a chosen set transitively requires, what supports it, which
alternatives could replace a member, and in what order to adopt the
result.  Ships with a seed dataset, a line-oriented text format, DOT and
JSON exports, an HTTP API, and a CLI.
"""

from importlib.resources import files
from pathlib import Path

from .analysis import (
    AdaptionClass,
    AlreadySelectedError,
    AlternativeHint,
    CompositionPlan,
    ExcludedPracticeError,
    MapStats,
    NotAlternativesError,
    NotSelectedError,
    Selection,
    SelectionIncompleteError,
    SelectionReport,
    SupportSuggestion,
    UnknownPracticeError,
    adaption_class,
    alternatives_for,
    claims_full_map,
    compose_plan,
    map_stats,
    requires_closure,
    select_by_objectives,
    substitute,
    validate_selection,
)
from .mapio import (
    MapDocument,
    MapParseError,
    ParseError,
    export_dot,
    export_json_graph,
    load_map,
    parse_map_document,
    serialize_map,
)
from .model import (
    AgileMap,
    AgileMapError,
    AgilePractice,
    Category,
    MapMetadata,
    MapValidationError,
    ObjectiveTag,
    PracticeNotFoundError,
    Relation,
    RelationType,
    Violation,
    ViolationKind,
    build_map,
    parse_practice_id,
)

__version__ = "0.1.0"


def seed_map_path() -> Path:
    """Path of the packaged seed dataset."""
    return Path(str(files("agilemap").joinpath("data/agile-map-paper.agilemap")))


def load_seed_map() -> AgileMap:
    """Load the packaged seed dataset."""
    return load_map(seed_map_path())


__all__ = [
    "AdaptionClass",
    "AgileMap",
    "AgileMapError",
    "AgilePractice",
    "AlreadySelectedError",
    "AlternativeHint",
    "Category",
    "CompositionPlan",
    "ExcludedPracticeError",
    "MapDocument",
    "MapMetadata",
    "MapParseError",
    "MapStats",
    "MapValidationError",
    "NotAlternativesError",
    "NotSelectedError",
    "ObjectiveTag",
    "ParseError",
    "PracticeNotFoundError",
    "Relation",
    "RelationType",
    "Selection",
    "SelectionIncompleteError",
    "SelectionReport",
    "SupportSuggestion",
    "UnknownPracticeError",
    "Violation",
    "ViolationKind",
    "adaption_class",
    "alternatives_for",
    "build_map",
    "claims_full_map",
    "compose_plan",
    "export_dot",
    "export_json_graph",
    "load_map",
    "load_seed_map",
    "map_stats",
    "parse_map_document",
    "parse_practice_id",
    "requires_closure",
    "seed_map_path",
    "select_by_objectives",
    "serialize_map",
    "substitute",
    "validate_selection",
    "__version__",
]
