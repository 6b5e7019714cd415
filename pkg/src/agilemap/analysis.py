"""Resolution engine over a built map.

Everything here is a pure function of an immutable AgileMap: transitive
requires-closure, selection validation and completion hints, adaption
classification, alternative substitution, objective filtering, staged
composition planning, and dataset statistics.  Only requires edges
propagate obligation; excluded practices are invisible to analyses unless
a selection explicitly opts in, and never appear among suggestions.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .model import (
    AgileMap,
    AgileMapError,
    Category,
    ObjectiveTag,
    RelationType,
    parse_practice_id,
    strongly_connected_components,
)

__all__ = [
    "AdaptionClass",
    "AlternativeHint",
    "CompositionPlan",
    "ExcludedPracticeError",
    "MapStats",
    "NotAlternativesError",
    "NotSelectedError",
    "AlreadySelectedError",
    "Selection",
    "SelectionIncompleteError",
    "SelectionReport",
    "SupportSuggestion",
    "UnknownPracticeError",
    "adaption_class",
    "alternatives_for",
    "claims_full_map",
    "compose_plan",
    "map_stats",
    "requires_closure",
    "select_by_objectives",
    "substitute",
    "validate_selection",
    "FULL_MAP_PRACTICE_COUNT",
    "FULL_MAP_RELATION_COUNT",
    "FULL_MAP_REQUIRES_COUNT",
]

# Targets reported for the complete published dataset; the seed file ships
# only the relations documented in prose, so these serve as an audit hook
# for a user-supplied full map.
FULL_MAP_PRACTICE_COUNT = 37
FULL_MAP_RELATION_COUNT = 47
FULL_MAP_REQUIRES_COUNT = 20


class UnknownPracticeError(AgileMapError):
    def __init__(self, practice_ids: Sequence[str]):
        self.practice_ids: tuple[str, ...] = tuple(practice_ids)
        super().__init__("unknown practice(s): " + ", ".join(self.practice_ids))


class ExcludedPracticeError(AgileMapError):
    def __init__(self, practice_ids: Sequence[str]):
        self.practice_ids: tuple[str, ...] = tuple(practice_ids)
        super().__init__(
            "excluded practice(s) cannot be chosen without opting in: "
            + ", ".join(self.practice_ids)
        )


class NotSelectedError(AgileMapError):
    def __init__(self, practice_id: str):
        self.practice_id = practice_id
        super().__init__(f"{practice_id} is not part of the selection")


class AlreadySelectedError(AgileMapError):
    def __init__(self, practice_id: str):
        self.practice_id = practice_id
        super().__init__(f"{practice_id} is already part of the selection")


class NotAlternativesError(AgileMapError):
    """The two practices are not linked by an alternative relation.

    ``actual_relation`` names the relation type that does link them, when
    one exists, so callers can explain what the edge really is.
    """

    def __init__(self, source: str, target: str, actual_relation: str | None):
        self.source = source
        self.target = target
        self.actual_relation = actual_relation
        detail = f" (their relation is {actual_relation})" if actual_relation else ""
        super().__init__(f"{source} and {target} are not alternatives{detail}")


class SelectionIncompleteError(AgileMapError):
    def __init__(self, report: "SelectionReport"):
        self.report = report
        missing = ", ".join(report.missing_required)
        super().__init__(f"selection is missing required practice(s): {missing}")


@dataclass(frozen=True)
class Selection:
    """A user-chosen subset of practice ids to validate or complete."""

    chosen: frozenset[str] = frozenset()
    include_excluded: bool = False

    def __post_init__(self) -> None:
        normalized = set()
        for practice_id in self.chosen:
            try:
                normalized.add(parse_practice_id(practice_id))
            except ValueError:
                normalized.add(practice_id)  # kept verbatim so errors can name it
        object.__setattr__(self, "chosen", frozenset(normalized))


@dataclass(frozen=True)
class SupportSuggestion:
    id: str
    justification: str


@dataclass(frozen=True)
class AlternativeHint:
    missing: str
    alternatives: tuple[str, ...]


@dataclass(frozen=True)
class SelectionReport:
    closure: tuple[str, ...]
    missing_required: tuple[str, ...]
    support_suggestions: tuple[SupportSuggestion, ...]
    alternative_hints: tuple[AlternativeHint, ...]
    warnings: tuple[str, ...]


class AdaptionClass(str, Enum):
    """Whether a practice is adoptable on its own or only in combination."""

    INDIVIDUAL = "individual"
    REQUIRES_COMBINATION = "requires_combination"


@dataclass(frozen=True)
class CompositionPlan:
    """Stages in adoption order: every requires edge points into the same
    or an earlier stage, and mutually-requiring practices share a stage."""

    stages: tuple[tuple[str, ...], ...]
    by_category: tuple[tuple[Category, tuple[str, ...]], ...]


@dataclass(frozen=True)
class MapStats:
    practice_count: int
    non_specific_count: int
    excluded_count: int
    relation_count_by_type: tuple[tuple[RelationType, int], ...]
    total_relations: int


def _resolve_ids(agile_map: AgileMap, ids: Iterable[str]) -> list[str]:
    resolved: list[str] = []
    unknown: list[str] = []
    for practice_id in ids:
        try:
            canonical = parse_practice_id(practice_id)
        except ValueError:
            unknown.append(practice_id)
            continue
        if canonical in agile_map:
            resolved.append(canonical)
        else:
            unknown.append(canonical)
    if unknown:
        raise UnknownPracticeError(sorted(unknown))
    return resolved


def _successors(agile_map: AgileMap, rel_type: RelationType) -> dict[str, list[str]]:
    """Adjacency for one relation type; two-way edges count both ways."""
    adjacency: dict[str, list[str]] = {p.id: [] for p in agile_map.practices}
    for relation in agile_map.relations:
        if relation.type is not rel_type:
            continue
        adjacency.setdefault(relation.source, []).append(relation.target)
        if relation.bidirectional:
            adjacency.setdefault(relation.target, []).append(relation.source)
    for targets in adjacency.values():
        targets.sort()
    return adjacency


def requires_closure(agile_map: AgileMap, seeds: Iterable[str]) -> set[str]:
    """All practices reachable from the seeds over requires edges.

    The set excludes the seeds themselves unless a cycle leads back to
    them; only requires edges are traversed (specialization does not
    propagate obligation).
    """
    seed_ids = _resolve_ids(agile_map, seeds)
    adjacency = _successors(agile_map, RelationType.REQUIRES)
    reached: set[str] = set()
    frontier = [t for s in seed_ids for t in adjacency.get(s, ())]
    while frontier:
        node = frontier.pop()
        if node in reached:
            continue
        reached.add(node)
        frontier.extend(adjacency.get(node, ()))
    return reached


def validate_selection(agile_map: AgileMap, selection: Selection) -> SelectionReport:
    """Close a selection over its requirements and derive completion hints.

    Support suggestions are non-chosen, non-required, non-excluded
    practices with a support edge toward any member of the closed
    selection, ranked by how many members they support (ties by id).
    Alternative hints list the alternative partners of every missing
    practice so the user can substitute instead of adopt.
    """
    chosen = set(_resolve_ids(agile_map, selection.chosen))
    if not selection.include_excluded:
        blocked = sorted(pid for pid in chosen if agile_map.practice(pid).excluded)
        if blocked:
            raise ExcludedPracticeError(blocked)

    closure = requires_closure(agile_map, chosen)
    missing = closure - chosen
    covered = chosen | closure

    support = _successors(agile_map, RelationType.SUPPORT)
    suggestions = []
    for practice in agile_map.practices:
        if practice.id in covered or practice.excluded:
            continue
        supported = sorted(t for t in support.get(practice.id, ()) if t in covered)
        if supported:
            suggestions.append((-len(supported), practice.id, supported))
    suggestions.sort()

    hints = tuple(
        AlternativeHint(missing=pid, alternatives=tuple(sorted(alternatives_for(agile_map, pid))))
        for pid in sorted(missing)
    )

    warnings: list[str] = []
    if missing:
        noun = "practice" if len(missing) == 1 else "practices"
        warnings.append(f"selection incomplete: {len(missing)} required {noun} missing")

    return SelectionReport(
        closure=tuple(sorted(closure)),
        missing_required=tuple(sorted(missing)),
        support_suggestions=tuple(
            SupportSuggestion(pid, "supports " + ", ".join(supported))
            for _, pid, supported in suggestions
        ),
        alternative_hints=hints,
        warnings=tuple(warnings),
    )


def adaption_class(agile_map: AgileMap, practice_id: str) -> AdaptionClass:
    """Individual iff the practice has no outgoing requires edge."""
    (canonical,) = _resolve_ids(agile_map, [practice_id])
    for relation in agile_map.relations:
        if relation.type is RelationType.REQUIRES and relation.source == canonical:
            return AdaptionClass.REQUIRES_COMBINATION
    return AdaptionClass.INDIVIDUAL


def alternatives_for(agile_map: AgileMap, practice_id: str) -> set[str]:
    """Practices interchangeable with the given one (symmetric by construction)."""
    (canonical,) = _resolve_ids(agile_map, [practice_id])
    partners: set[str] = set()
    for relation in agile_map.relations:
        if relation.type is not RelationType.ALTERNATIVE:
            continue
        if relation.source == canonical:
            partners.add(relation.target)
        elif relation.target == canonical:
            partners.add(relation.source)
    return partners


def substitute(
    agile_map: AgileMap, selection: Selection, from_id: str, to_id: str
) -> Selection:
    """Swap a chosen practice for one of its alternatives.

    The caller re-validates the result: the replacement may carry
    different requirements, so the closure is recomputed from scratch
    rather than transferred.
    """
    (from_canonical,) = _resolve_ids(agile_map, [from_id])
    (to_canonical,) = _resolve_ids(agile_map, [to_id])
    if from_canonical not in selection.chosen:
        raise NotSelectedError(from_canonical)
    if to_canonical in selection.chosen:
        raise AlreadySelectedError(to_canonical)
    if to_canonical not in alternatives_for(agile_map, from_canonical):
        actual = None
        for relation in agile_map.relations:
            endpoints = {relation.source, relation.target}
            if endpoints == {from_canonical, to_canonical}:
                actual = relation.type.value
                break
        raise NotAlternativesError(from_canonical, to_canonical, actual)
    chosen = (set(selection.chosen) - {from_canonical}) | {to_canonical}
    return Selection(chosen=frozenset(chosen), include_excluded=selection.include_excluded)


def select_by_objectives(
    agile_map: AgileMap, objectives: Iterable[ObjectiveTag]
) -> set[str]:
    """Non-excluded practices whose objective tags intersect the query.

    An empty query selects nothing.  No closure is applied; completing the
    candidate set is a separate validate_selection step.
    """
    wanted = set(objectives)
    if not wanted:
        return set()
    return {
        p.id
        for p in agile_map.practices
        if not p.excluded and p.objectives & wanted
    }


def compose_plan(agile_map: AgileMap, selection: Selection) -> CompositionPlan:
    """Stage a requirement-complete selection, dependencies first.

    The requires subgraph induced by the selection is condensed into
    strongly connected components; each component's stage is its longest
    requires-path distance to a sink, so same-depth components share a
    stage and mutually-requiring practices land together.
    """
    report = validate_selection(agile_map, selection)
    if report.missing_required:
        raise SelectionIncompleteError(report)

    chosen = set(_resolve_ids(agile_map, selection.chosen))
    requires = _successors(agile_map, RelationType.REQUIRES)
    adjacency = {
        pid: [t for t in requires.get(pid, ()) if t in chosen]
        for pid in sorted(chosen)
    }
    components = strongly_connected_components(adjacency)
    component_of: dict[str, int] = {}
    for index, component in enumerate(components):
        for member in component:
            component_of[member] = index

    condensed: dict[int, set[int]] = {i: set() for i in range(len(components))}
    for source, targets in adjacency.items():
        for target in targets:
            if component_of[source] != component_of[target]:
                condensed[component_of[source]].add(component_of[target])

    # components are ordered dependencies first, so every successor of a
    # component has a smaller index and its depth is already known
    depth: dict[int, int] = {}
    for index in range(len(components)):
        successors = condensed[index]
        depth[index] = 1 + max(depth[s] for s in successors) if successors else 0

    stage_map: dict[int, list[str]] = {}
    for index, component in enumerate(components):
        stage_map.setdefault(depth[index], []).extend(component)
    stages = tuple(
        tuple(sorted(stage_map[level])) for level in sorted(stage_map)
    )

    grouped: dict[Category, list[str]] = {}
    for pid in sorted(chosen):
        grouped.setdefault(agile_map.practice(pid).category, []).append(pid)
    by_category = tuple(
        (category, tuple(grouped[category])) for category in Category if category in grouped
    )
    return CompositionPlan(stages=stages, by_category=by_category)


def map_stats(agile_map: AgileMap) -> MapStats:
    """Exact dataset counts, used to audit completeness against the
    published full-map totals (37 practices / 47 relations / 20 requires)."""
    counts = {rel_type: 0 for rel_type in RelationType}
    for relation in agile_map.relations:
        counts[relation.type] += 1
    return MapStats(
        practice_count=len(agile_map.practices),
        non_specific_count=sum(1 for p in agile_map.practices if p.non_specific),
        excluded_count=sum(1 for p in agile_map.practices if p.excluded),
        relation_count_by_type=tuple(counts.items()),
        total_relations=len(agile_map.relations),
    )


def claims_full_map(agile_map: AgileMap) -> bool:
    """Heuristic used by reporting tools: the metadata says "full"."""
    haystack = f"{agile_map.metadata.name} {agile_map.metadata.source}".lower()
    return "full" in haystack
