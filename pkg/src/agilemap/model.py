"""Domain model for agile-practice maps.

The aggregate type is :class:`AgileMap`: a catalog of practices plus typed,
direction-annotated relations between them.  Raw practices and relations are
plain records that accept anything shape-valid; all cross-cutting constraints
(self-loops, endpoint resolution, directionality legality, duplicate and
opposite-pair handling) are enforced in :func:`build_map`, so a map obtained
from it is valid by construction.  Maps are immutable; "mutation" means
building a new map.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Sequence

__all__ = [
    "AgileMap",
    "AgileMapError",
    "AgilePractice",
    "Category",
    "MapMetadata",
    "MapValidationError",
    "ObjectiveTag",
    "PracticeNotFoundError",
    "Relation",
    "RelationType",
    "Violation",
    "ViolationKind",
    "build_map",
    "merge_opposite_pairs",
    "parse_practice_id",
]

_PRACTICE_ID_RE = re.compile(r"^AP(\d{2})$", re.IGNORECASE)


class AgileMapError(Exception):
    """Base class for all domain errors raised by this package."""


def parse_practice_id(value: str) -> str:
    """Canonicalize a practice id token ("ap04" -> "AP04").

    Accepts the shape AP01..AP99 with a case-insensitive prefix; anything
    else raises ValueError.
    """
    if not isinstance(value, str):
        raise ValueError(f"practice id must be a string, got {type(value).__name__}")
    match = _PRACTICE_ID_RE.match(value.strip())
    if match is None or match.group(1) == "00":
        raise ValueError(f"bad practice id {value!r}: expected AP01..AP99")
    return "AP" + match.group(1)


class Category(str, Enum):
    """Catalog category of a practice (closed set)."""

    TECHNICAL = "Technical"
    COLLABORATION = "Collaboration"
    PROCESS = "Process"
    REQUIREMENTS = "Requirements"
    ORGANIZATIONAL = "Organizational"

    @classmethod
    def parse(cls, text: str) -> "Category":
        for member in cls:
            if member.value.lower() == text.strip().lower():
                return member
        raise ValueError(
            f"unknown category {text!r}: expected one of "
            + ", ".join(m.value for m in cls)
        )


class ObjectiveTag(str, Enum):
    """Core-objective tag a practice can serve.

    sp = service provision, po = process optimization,
    ke = knowledge/experience exchange.
    """

    SP = "sp"
    PO = "po"
    KE = "ke"

    @classmethod
    def parse(cls, text: str) -> "ObjectiveTag":
        for member in cls:
            if member.value == text.strip().lower():
                return member
        raise ValueError(f"unknown objective tag {text!r}: expected sp, po, or ke")


class RelationType(str, Enum):
    """Relation semantics between two practices.

    Specialization: the source is a special form (subset) of the target;
    one-way.  Support: the source increases the target's added value when
    used alongside it; one-way or two-way.  Requires: effective use of the
    source mandates use of the target; always one-way, and the only type
    that propagates transitively.  Alternative: source and target are
    interchangeable; always two-way.
    """

    SPECIALIZATION = "specialization"
    SUPPORT = "support"
    REQUIRES = "requires"
    ALTERNATIVE = "alternative"


_RELATION_TYPE_ORDER = {t: i for i, t in enumerate(RelationType)}

# Legal values of Relation.bidirectional per type.
_ALLOWED_DIRECTIONALITY = {
    RelationType.SPECIALIZATION: (False,),
    RelationType.SUPPORT: (False, True),
    RelationType.REQUIRES: (False,),
    RelationType.ALTERNATIVE: (True,),
}


@dataclass(frozen=True)
class AgilePractice:
    """One catalog entry.

    ``excluded`` marks entries kept for catalog fidelity but argued out of
    the model; they stay visible for auditing and are skipped by analyses
    unless explicitly included.  ``non_specific`` marks entries described
    as no specific agile practice.
    """

    id: str
    name: str
    category: Category
    description: str = ""
    sources: tuple[str, ...] = ()
    excluded: bool = False
    exclusion_reason: str = ""
    non_specific: bool = False
    objectives: frozenset[ObjectiveTag] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "id", parse_practice_id(self.id))
        if not self.name or not self.name.strip():
            raise ValueError("practice name must be non-empty")
        if not isinstance(self.category, Category):
            object.__setattr__(self, "category", Category.parse(str(self.category)))
        object.__setattr__(self, "sources", tuple(self.sources))
        object.__setattr__(self, "objectives", frozenset(self.objectives))


@dataclass(frozen=True)
class Relation:
    """A typed, direction-annotated edge between two distinct practices.

    Raw instances are permissive: constraints such as source != target and
    per-type directionality are reported by :func:`build_map`, not here.
    """

    source: str
    target: str
    type: RelationType
    bidirectional: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "source", parse_practice_id(self.source))
        object.__setattr__(self, "target", parse_practice_id(self.target))
        if not isinstance(self.type, RelationType):
            raise ValueError(f"unknown relation type {self.type!r}")

    def sort_key(self) -> tuple[int, str, str]:
        return (_RELATION_TYPE_ORDER[self.type], self.source, self.target)

    def canonical(self) -> "Relation":
        """Bidirectional pairs are stored smaller id first; others pass through."""
        if self.bidirectional and self.source > self.target:
            return Relation(self.target, self.source, self.type, True)
        return self

    def dedup_key(self) -> tuple[RelationType, str, str]:
        """(type, source, target) identity, direction-insensitive for two-way edges."""
        canon = self.canonical()
        return (canon.type, canon.source, canon.target)


@dataclass(frozen=True)
class MapMetadata:
    name: str = ""
    version: str = ""
    source: str = ""


class ViolationKind(str, Enum):
    SELF_LOOP = "self_loop"
    UNKNOWN_ENDPOINT = "unknown_endpoint"
    DUPLICATE_RELATION = "duplicate_relation"
    DIRECTIONALITY_ILLEGAL = "directionality_illegal"
    DUPLICATE_PRACTICE_ID = "duplicate_practice_id"
    DUPLICATE_PRACTICE_NAME = "duplicate_practice_name"
    MISSING_EXCLUSION_REASON = "missing_exclusion_reason"
    MERGE_ILLEGAL = "merge_illegal"


@dataclass(frozen=True)
class Violation:
    """One constraint breach found while building a map.

    ``practice_ids`` and ``relations`` reference the offending declarations
    exactly as given, so callers holding source positions can locate them.
    """

    kind: ViolationKind
    message: str
    practice_ids: tuple[str, ...] = ()
    relations: tuple[Relation, ...] = ()

    def sort_key(self) -> tuple[str, str]:
        return (self.kind.value, self.message)


class MapValidationError(AgileMapError):
    """Raised by build_map; carries every violation found, not just the first."""

    def __init__(self, violations: Sequence[Violation]):
        self.violations: tuple[Violation, ...] = tuple(violations)
        lines = "; ".join(v.message for v in self.violations)
        super().__init__(f"{len(self.violations)} violation(s): {lines}")


class PracticeNotFoundError(AgileMapError):
    """Lookup miss; carries the query and nearest-name suggestions."""

    def __init__(self, query: str, suggestions: Sequence[str] = ()):
        self.query = query
        self.suggestions: tuple[str, ...] = tuple(suggestions)
        hint = f" (did you mean: {', '.join(self.suggestions)}?)" if self.suggestions else ""
        super().__init__(f"no practice matches {query!r}{hint}")


def _describe(relation: Relation) -> str:
    arrow = "<->" if relation.bidirectional else "->"
    return f"{relation.source} {arrow} {relation.target} ({relation.type.value})"


@dataclass(frozen=True)
class AgileMap:
    """Validated, immutable aggregate of practices and relations.

    The constructor normalizes ordering (practices by id; relations by
    type, source, target with two-way pairs smaller-id first) but does not
    re-run constraint checks; :func:`build_map` is the validating path.
    Instances are safe to share across concurrent readers.
    """

    practices: tuple[AgilePractice, ...] = ()
    relations: tuple[Relation, ...] = ()
    metadata: MapMetadata = MapMetadata()
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        practices = tuple(sorted(self.practices, key=lambda p: p.id))
        relations = tuple(sorted((r.canonical() for r in self.relations), key=Relation.sort_key))
        object.__setattr__(self, "practices", practices)
        object.__setattr__(self, "relations", relations)
        object.__setattr__(self, "warnings", tuple(self.warnings))

    @cached_property
    def _by_id(self) -> Mapping[str, AgilePractice]:
        return {p.id: p for p in self.practices}

    @cached_property
    def _by_name(self) -> Mapping[str, AgilePractice]:
        return {p.name.casefold(): p for p in self.practices}

    def practice_ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.practices)

    def __contains__(self, practice_id: str) -> bool:
        try:
            return parse_practice_id(practice_id) in self._by_id
        except ValueError:
            return False

    def practice(self, practice_id: str) -> AgilePractice:
        """Resolve a canonical or lowercase id; raises PracticeNotFoundError."""
        try:
            canonical = parse_practice_id(practice_id)
        except ValueError:
            raise PracticeNotFoundError(practice_id) from None
        found = self._by_id.get(canonical)
        if found is None:
            raise PracticeNotFoundError(practice_id)
        return found

    def lookup(self, key: str) -> AgilePractice:
        """Resolve by id first (case-insensitive), then by exact name.

        On a miss, raises PracticeNotFoundError carrying up to three
        nearest-name suggestions (edit distance <= 2).
        """
        try:
            canonical = parse_practice_id(key)
        except ValueError:
            canonical = None
        if canonical is not None and canonical in self._by_id:
            return self._by_id[canonical]
        by_name = self._by_name.get(key.strip().casefold())
        if by_name is not None:
            return by_name
        raise PracticeNotFoundError(key, _name_suggestions(key, self.practices))


def _edit_distance(a: str, b: str, cap: int) -> int:
    """Levenshtein distance, capped: returns cap + 1 once it cannot stay <= cap."""
    if abs(len(a) - len(b)) > cap:
        return cap + 1
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        best = i
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            value = min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost)
            current.append(value)
            best = min(best, value)
        if best > cap:
            return cap + 1
        previous = current
    return previous[-1]


def _name_suggestions(
    query: str, practices: Iterable[AgilePractice], cap: int = 2, limit: int = 3
) -> tuple[str, ...]:
    needle = query.strip().casefold()
    scored = []
    for practice in practices:
        distance = _edit_distance(needle, practice.name.casefold(), cap)
        if distance <= cap:
            scored.append((distance, practice.name))
    scored.sort()
    return tuple(name for _, name in scored[:limit])


def merge_opposite_pairs(
    relations: Iterable[Relation],
) -> tuple[list[Relation], list[Violation]]:
    """Combine same-type opposite-direction pairs into one two-way relation.

    Support and Alternative pairs merge; for Requires and Specialization a
    merge would manufacture an illegal two-way edge, so both inputs are kept
    and reported as a MergeIllegal violation instead.  A one-way edge whose
    opposite already exists as a two-way edge is absorbed into it.  Exact
    value duplicates collapse.  The output is sorted by (type, source,
    target), which makes the operation idempotent and order-insensitive.
    """
    violations: list[Violation] = []
    seen: set[Relation] = set()
    ordered: list[Relation] = []
    for relation in relations:
        canon = relation.canonical()
        if canon not in seen:
            seen.add(canon)
            ordered.append(canon)

    groups: dict[tuple[RelationType, str, str], list[Relation]] = {}
    passthrough: list[Relation] = []
    for relation in ordered:
        if relation.source == relation.target:
            passthrough.append(relation)  # self-loop: left for build_map to reject
            continue
        low, high = sorted((relation.source, relation.target))
        groups.setdefault((relation.type, low, high), []).append(relation)

    output: list[Relation] = list(passthrough)
    for (rel_type, low, high), members in groups.items():
        forward = [r for r in members if not r.bidirectional and r.source == low]
        backward = [r for r in members if not r.bidirectional and r.source == high]
        two_way = [r for r in members if r.bidirectional]
        mergeable = rel_type in (RelationType.SUPPORT, RelationType.ALTERNATIVE)
        if forward and backward and not mergeable:
            pair = (*forward, *backward)
            violations.append(
                Violation(
                    ViolationKind.MERGE_ILLEGAL,
                    f"opposite {rel_type.value} relations between {low} and {high} "
                    "cannot merge: a two-way "
                    f"{rel_type.value} relation is illegal",
                    relations=pair,
                )
            )
            output.extend(members)
        elif mergeable and (two_way or (forward and backward)):
            output.append(Relation(low, high, rel_type, bidirectional=True))
        else:
            output.extend(members)

    output.sort(key=Relation.sort_key)
    return output, violations


def build_map(
    practices: Iterable[AgilePractice],
    relations: Iterable[Relation],
    metadata: MapMetadata | None = None,
) -> AgileMap:
    """Validate raw declarations and assemble an AgileMap.

    Checks every constraint and raises MapValidationError carrying ALL
    violations found.  On success the returned map has opposite pairs
    merged, relations in canonical order, and a warning recorded for each
    dependency cycle among requires edges (cycles are permitted; the
    closure operations handle them by reachability).
    """
    practices = list(practices)
    relations = [r.canonical() for r in relations]
    violations: list[Violation] = []

    seen_ids: dict[str, AgilePractice] = {}
    seen_names: dict[str, AgilePractice] = {}
    for practice in practices:
        if practice.id in seen_ids:
            violations.append(
                Violation(
                    ViolationKind.DUPLICATE_PRACTICE_ID,
                    f"practice id {practice.id} declared more than once",
                    practice_ids=(practice.id,),
                )
            )
        else:
            seen_ids[practice.id] = practice
        name_key = practice.name.casefold()
        if name_key in seen_names:
            violations.append(
                Violation(
                    ViolationKind.DUPLICATE_PRACTICE_NAME,
                    f"practice name {practice.name!r} declared more than once "
                    "(names are compared case-insensitively)",
                    practice_ids=(seen_names[name_key].id, practice.id),
                )
            )
        else:
            seen_names[name_key] = practice
        if practice.excluded and not practice.exclusion_reason.strip():
            violations.append(
                Violation(
                    ViolationKind.MISSING_EXCLUSION_REASON,
                    f"practice {practice.id} is excluded but gives no exclusion reason",
                    practice_ids=(practice.id,),
                )
            )

    known = set(seen_ids)
    for relation in relations:
        if relation.source == relation.target:
            violations.append(
                Violation(
                    ViolationKind.SELF_LOOP,
                    f"relation source must differ from target: {_describe(relation)}",
                    relations=(relation,),
                )
            )
        missing = sorted({e for e in (relation.source, relation.target) if e not in known})
        if missing:
            violations.append(
                Violation(
                    ViolationKind.UNKNOWN_ENDPOINT,
                    f"relation endpoint(s) {', '.join(missing)} not in the map: "
                    f"{_describe(relation)}",
                    practice_ids=tuple(missing),
                    relations=(relation,),
                )
            )
        if relation.bidirectional not in _ALLOWED_DIRECTIONALITY[relation.type]:
            direction = "two-way" if relation.bidirectional else "one-way"
            violations.append(
                Violation(
                    ViolationKind.DIRECTIONALITY_ILLEGAL,
                    f"{relation.type.value} relations cannot be {direction}: "
                    f"{_describe(relation)}",
                    relations=(relation,),
                )
            )

    by_key: dict[tuple[RelationType, str, str], list[Relation]] = {}
    for relation in relations:
        by_key.setdefault(relation.dedup_key(), []).append(relation)
    for key, members in by_key.items():
        if len(members) > 1:
            rel_type, source, target = key
            violations.append(
                Violation(
                    ViolationKind.DUPLICATE_RELATION,
                    f"{len(members)} relations share ({source}, {target}, "
                    f"{rel_type.value}) after canonicalization",
                    relations=tuple(members),
                )
            )

    merged, merge_violations = merge_opposite_pairs(relations)
    violations.extend(merge_violations)

    if violations:
        raise MapValidationError(sorted(set(violations), key=Violation.sort_key))

    warnings = [
        "requires cycle among " + ", ".join(component)
        for component in _requires_cycles(merged)
    ]
    return AgileMap(
        practices=tuple(practices),
        relations=tuple(merged),
        metadata=metadata or MapMetadata(),
        warnings=tuple(sorted(warnings)),
    )


def _requires_cycles(relations: Sequence[Relation]) -> list[tuple[str, ...]]:
    """Sorted member tuples of each non-trivial SCC of the requires digraph."""
    adjacency: dict[str, list[str]] = {}
    for relation in relations:
        if relation.type is RelationType.REQUIRES:
            adjacency.setdefault(relation.source, []).append(relation.target)
            adjacency.setdefault(relation.target, [])
    components = strongly_connected_components(adjacency)
    return sorted(tuple(sorted(c)) for c in components if len(c) > 1)


def strongly_connected_components(adjacency: Mapping[str, Sequence[str]]) -> list[list[str]]:
    """Tarjan's algorithm, iterative to avoid recursion limits.

    ``adjacency`` maps every node to its successors (successors must
    themselves be keys).  Components come back in reverse topological
    order of the condensation: every component appears after the
    components it points to, i.e. dependencies first.
    """
    index_of: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    components: list[list[str]] = []
    counter = 0

    for root in adjacency:
        if root in index_of:
            continue
        work: list[tuple[str, int]] = [(root, 0)]
        while work:
            node, child_index = work.pop()
            if child_index == 0:
                index_of[node] = lowlink[node] = counter
                counter += 1
                stack.append(node)
                on_stack.add(node)
            successors = adjacency[node]
            advanced = False
            for position in range(child_index, len(successors)):
                successor = successors[position]
                if successor not in index_of:
                    work.append((node, position + 1))
                    work.append((successor, 0))
                    advanced = True
                    break
                if successor in on_stack:
                    lowlink[node] = min(lowlink[node], index_of[successor])
            if advanced:
                continue
            if lowlink[node] == index_of[node]:
                component = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.append(member)
                    if member == node:
                        break
                components.append(component)
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
    return components
