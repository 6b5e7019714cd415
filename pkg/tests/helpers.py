"""Shared builders for synthetic maps, seeded generators, and strategies."""

import random
import re
from pathlib import Path

from hypothesis import strategies as st

from agilemap import (
    AgileMap,
    AgilePractice,
    Category,
    MapValidationError,
    ObjectiveTag,
    Relation,
    RelationType,
    ViolationKind,
    build_map,
)

from oracles import relation_rules_oracle

REPO_ROOT = Path(__file__).resolve().parent.parent
SEED_PATH = REPO_ROOT / "seed" / "agile-map-paper.agilemap"
PACKAGED_SEED_PATH = REPO_ROOT / "src" / "agilemap" / "data" / "agile-map-paper.agilemap"

CATEGORIES = tuple(Category)


def make_practice(practice_id, name=None, **kwargs) -> AgilePractice:
    number = int(practice_id[2:])
    kwargs.setdefault("category", CATEGORIES[number % len(CATEGORIES)])
    return AgilePractice(
        id=practice_id,
        name=name if name is not None else f"Practice {number:02d}",
        **kwargs,
    )


def make_practices(count) -> list[AgilePractice]:
    return [make_practice(f"AP{i:02d}") for i in range(1, count + 1)]


def rel(source, target, rel_type=RelationType.REQUIRES, bidirectional=False) -> Relation:
    return Relation(source, target, rel_type, bidirectional)


def make_map(count, relations=(), practices=None) -> AgileMap:
    """A validated map over AP01..APnn plus the given relations."""
    return build_map(practices if practices is not None else make_practices(count), relations)


def raw_requires_map(count, edges) -> AgileMap:
    """An AgileMap built directly (no validation) whose requires edges form
    an arbitrary digraph, two-cycles and all."""
    return AgileMap(
        practices=tuple(make_practices(count)),
        relations=tuple(rel(s, t) for s, t in edges),
    )


# --- seeded random generation (used where a criterion fixes a sample count) --

_PAIR_CHOICES = (
    None,
    None,
    (RelationType.SPECIALIZATION, "forward", False),
    (RelationType.SPECIALIZATION, "backward", False),
    (RelationType.REQUIRES, "forward", False),
    (RelationType.REQUIRES, "forward", False),
    (RelationType.REQUIRES, "backward", False),
    (RelationType.SUPPORT, "forward", False),
    (RelationType.SUPPORT, "backward", False),
    (RelationType.SUPPORT, "forward", True),
    (RelationType.ALTERNATIVE, "forward", True),
)


def random_valid_map_data(rng: random.Random, max_practices=12):
    """(practices, relations) that build_map accepts by construction: at most
    one relation per unordered pair, direction rules respected."""
    count = rng.randint(2, max_practices)
    practices = []
    for i in range(1, count + 1):
        excluded = rng.random() < 0.15
        practices.append(
            AgilePractice(
                id=f"AP{i:02d}",
                name=f"Practice {i:02d}",
                category=rng.choice(CATEGORIES),
                excluded=excluded,
                exclusion_reason="left out on purpose" if excluded else "",
                non_specific=rng.random() < 0.1,
                objectives=frozenset(
                    tag for tag in ObjectiveTag if rng.random() < 0.3
                ),
            )
        )
    ids = [p.id for p in practices]
    relations = []
    for i, low in enumerate(ids):
        for high in ids[i + 1:]:
            choice = rng.choice(_PAIR_CHOICES)
            if choice is None:
                continue
            rel_type, direction, bidirectional = choice
            source, target = (low, high) if direction == "forward" else (high, low)
            relations.append(Relation(source, target, rel_type, bidirectional))
    return practices, relations


def random_valid_map(rng: random.Random, max_practices=12) -> AgileMap:
    practices, relations = random_valid_map_data(rng, max_practices)
    return build_map(practices, relations)


def random_digraph_map(rng: random.Random, max_nodes=12):
    """(map, edges) with arbitrary requires edges, built without validation."""
    count = rng.randint(1, max_nodes)
    ids = [f"AP{i:02d}" for i in range(1, count + 1)]
    edges = [
        (s, t)
        for s in ids
        for t in ids
        if s != t and rng.random() < 0.25
    ]
    return raw_requires_map(count, edges), edges


# --- hypothesis strategies ---------------------------------------------------

@st.composite
def valid_map_data(draw, min_practices=2, max_practices=10):
    count = draw(st.integers(min_practices, max_practices))
    practices = []
    for i in range(1, count + 1):
        excluded = draw(st.booleans()) and draw(st.booleans())
        practices.append(
            AgilePractice(
                id=f"AP{i:02d}",
                name=f"Practice {i:02d}",
                category=draw(st.sampled_from(CATEGORIES)),
                excluded=excluded,
                exclusion_reason="left out on purpose" if excluded else "",
                non_specific=draw(st.booleans()) and draw(st.booleans()),
                objectives=frozenset(
                    draw(st.sets(st.sampled_from(tuple(ObjectiveTag)), max_size=3))
                ),
            )
        )
    ids = [p.id for p in practices]
    relations = []
    for i, low in enumerate(ids):
        for high in ids[i + 1:]:
            choice = draw(st.sampled_from(_PAIR_CHOICES))
            if choice is None:
                continue
            rel_type, direction, bidirectional = choice
            source, target = (low, high) if direction == "forward" else (high, low)
            relations.append(Relation(source, target, rel_type, bidirectional))
    return practices, relations


@st.composite
def valid_maps(draw, min_practices=2, max_practices=10):
    practices, relations = draw(valid_map_data(min_practices, max_practices))
    return build_map(practices, relations)


def relation_edges(agile_map, rel_type) -> set[tuple[str, str]]:
    """Directed edge set for one relation type; two-way edges both ways."""
    edges = set()
    for relation in agile_map.relations:
        if relation.type is rel_type:
            edges.add((relation.source, relation.target))
            if relation.bidirectional:
                edges.add((relation.target, relation.source))
    return edges


def dot_node_ids(dot_text) -> set[str]:
    """Light DOT well-formedness check; returns the declared node ids."""
    assert dot_text.startswith("digraph agilemap {\n")
    assert dot_text.endswith("}\n")
    assert dot_text.count("{") == dot_text.count("}")
    nodes = set(re.findall(r"^\s*(AP\d\d) \[", dot_text, flags=re.M))
    for source, target in re.findall(r"^\s*(AP\d\d) -> (AP\d\d) ", dot_text, flags=re.M):
        assert source in nodes and target in nodes
    return nodes


def violation_corpus():
    """Fixed meta-model cases: (name, practices, relations, expected kinds)."""
    four = make_practices(4)
    R = RelationType
    V = ViolationKind
    return [
        ("self_loop_support", four, [rel("AP01", "AP01", R.SUPPORT)],
         {V.SELF_LOOP}),
        ("self_loop_requires", four, [rel("AP02", "AP02")],
         {V.SELF_LOOP}),
        ("two_way_requires", four, [Relation("AP01", "AP02", R.REQUIRES, True)],
         {V.DIRECTIONALITY_ILLEGAL}),
        ("two_way_specialization", four, [Relation("AP01", "AP02", R.SPECIALIZATION, True)],
         {V.DIRECTIONALITY_ILLEGAL}),
        ("one_way_alternative", four, [Relation("AP01", "AP02", R.ALTERNATIVE)],
         {V.DIRECTIONALITY_ILLEGAL}),
        ("duplicate_exact", four, [rel("AP01", "AP02"), rel("AP01", "AP02")],
         {V.DUPLICATE_RELATION}),
        ("duplicate_two_way_either_order", four,
         [Relation("AP02", "AP01", R.SUPPORT, True), Relation("AP01", "AP02", R.SUPPORT, True)],
         {V.DUPLICATE_RELATION}),
        ("duplicate_one_way_shadowed_by_two_way", four,
         [Relation("AP01", "AP02", R.SUPPORT), Relation("AP01", "AP02", R.SUPPORT, True)],
         {V.DUPLICATE_RELATION}),
        ("opposite_requires_pair", four, [rel("AP01", "AP02"), rel("AP02", "AP01")],
         {V.MERGE_ILLEGAL}),
        ("opposite_specialization_pair", four,
         [rel("AP01", "AP02", R.SPECIALIZATION), rel("AP02", "AP01", R.SPECIALIZATION)],
         {V.MERGE_ILLEGAL}),
        ("unknown_target", four, [rel("AP01", "AP09")],
         {V.UNKNOWN_ENDPOINT}),
        ("unknown_both_endpoints", four, [rel("AP08", "AP09")],
         {V.UNKNOWN_ENDPOINT}),
        ("duplicate_practice_id",
         four + [make_practice("AP01", name="Another name")], [],
         {V.DUPLICATE_PRACTICE_ID}),
        ("duplicate_practice_name_case_insensitive",
         four + [make_practice("AP05", name="PRACTICE 01")], [],
         {V.DUPLICATE_PRACTICE_NAME}),
        ("excluded_without_reason",
         [make_practice("AP01", excluded=True)], [],
         {V.MISSING_EXCLUSION_REASON}),
    ]


def relation_rules_mismatches(trials, seed=20240815):
    """Randomized relation lists: compare build_map's decision and merged
    output against the rule oracle; returns the mismatching trials."""
    rng = random.Random(seed)
    practices = make_practices(6)
    known = [p.id for p in practices]
    pool = known + ["AP07", "AP08"]  # two undeclared ids
    type_names = [t.value for t in RelationType]
    mismatches = []
    for trial in range(trials):
        triples = [
            (
                rng.choice(pool),
                rng.choice(pool),
                rng.choice(type_names),
                rng.random() < 0.4,
            )
            for _ in range(rng.randint(0, 8))
        ]
        expected_ok, expected_merged = relation_rules_oracle(known, triples)
        relations = [Relation(s, t, RelationType(ty), bi) for s, t, ty, bi in triples]
        try:
            built = build_map(practices, relations)
            actual_ok = True
            actual_merged = {
                (r.source, r.target, r.type.value, r.bidirectional)
                for r in built.relations
            }
        except MapValidationError:
            actual_ok, actual_merged = False, None
        if expected_ok != actual_ok or (expected_ok and expected_merged != actual_merged):
            mismatches.append((trial, triples, expected_ok, actual_ok))
    return mismatches
