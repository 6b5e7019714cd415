"""The ``.agilemap`` text format plus graph exports.

The format is line-oriented so files stay diff-friendly and trivially
mergeable:

    # comment (full line or trailing)
    map "<name>" version "<v>" [source "<text>"]
    practice APnn "<Name>" category <Category> [excluded "<reason>"]
        [nonspecific] [objectives sp,po,ke] [description "<text>"]
        [source "<citation>"]...
    relation APnn <verb> APnn

with verb one of ``requires``, ``supports``, ``supports <->`` (two-way
support), ``specializes``, ``alternative-to``.  Practice clauses may appear
in any order but each line is a single declaration.  Parsing collects every
error it can by skipping to the next line after the first problem on a
line; structural violations (unknown endpoints, duplicates, ...) are not a
parser concern and surface when the document is built into a map.

Serialization emits canonical order (practices by id, relations by type
then source then target) so output bytes are deterministic and
parse(serialize(m)) reproduces m exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .model import (
    AgileMap,
    AgileMapError,
    AgilePractice,
    Category,
    MapMetadata,
    ObjectiveTag,
    Relation,
    RelationType,
    Violation,
    build_map,
    parse_practice_id,
)

__all__ = [
    "MapDocument",
    "MapParseError",
    "ParseError",
    "PracticeDecl",
    "RelationDecl",
    "export_dot",
    "export_json_graph",
    "load_map",
    "parse_map_document",
    "serialize_map",
]


@dataclass(frozen=True)
class ParseError:
    """A single malformed line: 1-based position plus the offending text."""

    line: int
    column: int
    message: str
    snippet: str


class MapParseError(AgileMapError):
    def __init__(self, errors: Sequence[ParseError]):
        self.errors: tuple[ParseError, ...] = tuple(errors)
        first = self.errors[0]
        more = f" (+{len(self.errors) - 1} more)" if len(self.errors) > 1 else ""
        super().__init__(f"line {first.line}:{first.column}: {first.message}{more}")


@dataclass(frozen=True)
class PracticeDecl:
    practice: AgilePractice
    line: int
    column: int


@dataclass(frozen=True)
class RelationDecl:
    relation: Relation
    line: int
    column: int


@dataclass(frozen=True)
class MapDocument:
    """Parsed declarations with per-line provenance.

    A document may still be structurally invalid; call :meth:`build` to run
    the full meta-model validation.
    """

    metadata: MapMetadata = MapMetadata()
    practice_decls: tuple[PracticeDecl, ...] = ()
    relation_decls: tuple[RelationDecl, ...] = ()

    @property
    def practices(self) -> tuple[AgilePractice, ...]:
        return tuple(d.practice for d in self.practice_decls)

    @property
    def relations(self) -> tuple[Relation, ...]:
        return tuple(d.relation for d in self.relation_decls)

    def build(self) -> AgileMap:
        return build_map(self.practices, self.relations, self.metadata)

    def positions_for(self, violation: Violation) -> tuple[tuple[int, int], ...]:
        """(line, column) of the declarations a violation refers to."""
        positions: set[tuple[int, int]] = set()
        wanted_ids = set(violation.practice_ids)
        for decl in self.practice_decls:
            if decl.practice.id in wanted_ids:
                positions.add((decl.line, decl.column))
        wanted_relations = set(violation.relations)
        for decl in self.relation_decls:
            if decl.relation in wanted_relations or decl.relation.canonical() in wanted_relations:
                positions.add((decl.line, decl.column))
        return tuple(sorted(positions))


# --- tokenizer -------------------------------------------------------------

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "r": "\r", "t": "\t"}
_UNESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


@dataclass(frozen=True)
class _Token:
    text: str
    column: int
    is_string: bool


class _LineError(Exception):
    def __init__(self, column: int, message: str):
        self.column = column
        self.message = message


def _quote(text: str) -> str:
    return '"' + "".join(_UNESCAPES.get(ch, ch) for ch in text) + '"'


def _tokenize(line: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(line)
    while i < n:
        ch = line[i]
        if ch in " \t":
            i += 1
            continue
        if ch == "#":
            break  # trailing comment
        start = i
        if ch == '"':
            i += 1
            parts: list[str] = []
            while True:
                if i >= n:
                    raise _LineError(start + 1, "unterminated string")
                ch = line[i]
                if ch == '"':
                    i += 1
                    break
                if ch == "\\":
                    if i + 1 >= n:
                        raise _LineError(start + 1, "unterminated string")
                    escape = line[i + 1]
                    if escape not in _ESCAPES:
                        raise _LineError(i + 1, f"invalid string escape '\\{escape}'")
                    parts.append(_ESCAPES[escape])
                    i += 2
                    continue
                parts.append(ch)
                i += 1
            tokens.append(_Token("".join(parts), start + 1, True))
        else:
            while i < n and line[i] not in ' \t"#':
                i += 1
            tokens.append(_Token(line[start:i], start + 1, False))
    return tokens


# --- parser ----------------------------------------------------------------

_VERBS = {
    "requires": (RelationType.REQUIRES, False),
    "supports": (RelationType.SUPPORT, False),
    "specializes": (RelationType.SPECIALIZATION, False),
    "alternative-to": (RelationType.ALTERNATIVE, True),
}


class _Cursor:
    """Token stream over one line with expected-token error reporting."""

    def __init__(self, tokens: list[_Token], line_length: int):
        self.tokens = tokens
        self.position = 0
        self.end_column = line_length + 1

    def peek(self) -> _Token | None:
        if self.position < len(self.tokens):
            return self.tokens[self.position]
        return None

    def take(self) -> _Token:
        token = self.peek()
        if token is None:
            raise _LineError(self.end_column, "unexpected end of line")
        self.position += 1
        return token

    def expect_word(self, what: str) -> _Token:
        token = self.peek()
        if token is None:
            raise _LineError(self.end_column, f"expected {what}")
        if token.is_string:
            raise _LineError(token.column, f"expected {what}, got a quoted string")
        self.position += 1
        return token

    def expect_string(self, what: str) -> _Token:
        token = self.peek()
        if token is None:
            raise _LineError(self.end_column, f"expected {what} (a quoted string)")
        if not token.is_string:
            raise _LineError(token.column, f"expected {what} (a quoted string)")
        self.position += 1
        return token

    def expect_done(self) -> None:
        token = self.peek()
        if token is not None:
            raise _LineError(token.column, f"unexpected trailing token {token.text!r}")


def _expect_practice_id(cursor: _Cursor) -> str:
    token = cursor.expect_word("a practice id (APnn)")
    try:
        return parse_practice_id(token.text)
    except ValueError:
        raise _LineError(
            token.column, f"bad practice id {token.text!r}: expected APnn (AP01..AP99)"
        ) from None


def _parse_header(cursor: _Cursor) -> MapMetadata:
    name = cursor.expect_string("the map name").text
    keyword = cursor.expect_word("'version'")
    if keyword.text != "version":
        raise _LineError(keyword.column, f"expected 'version', got {keyword.text!r}")
    version = cursor.expect_string("the map version").text
    source = ""
    token = cursor.peek()
    if token is not None and not token.is_string and token.text == "source":
        cursor.take()
        source = cursor.expect_string("the map source").text
    cursor.expect_done()
    return MapMetadata(name=name, version=version, source=source)


def _parse_objectives(cursor: _Cursor) -> frozenset[ObjectiveTag]:
    token = cursor.expect_word("objective tags (sp,po,ke)")
    column = token.column
    raw = token.text
    while raw.endswith(","):
        raw += cursor.expect_word("an objective tag after ','").text
    tags = []
    for part in raw.split(","):
        if not part:
            raise _LineError(column, "empty objective tag")
        try:
            tags.append(ObjectiveTag.parse(part))
        except ValueError as exc:
            raise _LineError(column, str(exc)) from None
    return frozenset(tags)


def _parse_practice(cursor: _Cursor) -> AgilePractice:
    practice_id = _expect_practice_id(cursor)
    name_token = cursor.expect_string("the practice name")
    if not name_token.text.strip():
        raise _LineError(name_token.column, "practice name must be non-empty")
    keyword = cursor.expect_word("'category'")
    if keyword.text != "category":
        raise _LineError(keyword.column, f"expected 'category', got {keyword.text!r}")
    category_token = cursor.expect_word("a category name")
    try:
        category = Category.parse(category_token.text)
    except ValueError as exc:
        raise _LineError(category_token.column, str(exc)) from None

    excluded = False
    exclusion_reason = ""
    non_specific = False
    objectives: frozenset[ObjectiveTag] = frozenset()
    description = ""
    sources: list[str] = []
    seen_clauses: set[str] = set()
    while True:
        token = cursor.peek()
        if token is None:
            break
        if token.is_string:
            raise _LineError(token.column, "expected a practice clause keyword, got a string")
        clause = token.text
        if clause not in ("excluded", "nonspecific", "objectives", "description", "source"):
            raise _LineError(
                token.column,
                f"unknown practice clause {clause!r}: expected excluded, "
                "nonspecific, objectives, description, or source",
            )
        if clause in seen_clauses and clause != "source":
            raise _LineError(token.column, f"duplicate {clause!r} clause")
        seen_clauses.add(clause)
        cursor.take()
        if clause == "excluded":
            excluded = True
            exclusion_reason = cursor.expect_string("the exclusion reason").text
        elif clause == "nonspecific":
            non_specific = True
        elif clause == "objectives":
            objectives = _parse_objectives(cursor)
        elif clause == "description":
            description = cursor.expect_string("the description").text
        elif clause == "source":
            sources.append(cursor.expect_string("a source citation").text)
    return AgilePractice(
        id=practice_id,
        name=name_token.text,
        category=category,
        description=description,
        sources=tuple(sources),
        excluded=excluded,
        exclusion_reason=exclusion_reason,
        non_specific=non_specific,
        objectives=objectives,
    )


def _parse_relation(cursor: _Cursor) -> Relation:
    source = _expect_practice_id(cursor)
    verb_token = cursor.expect_word("a relation verb")
    verb = _VERBS.get(verb_token.text)
    if verb is None:
        raise _LineError(
            verb_token.column,
            f"unknown relation verb {verb_token.text!r}: expected requires, "
            "supports, supports <->, specializes, or alternative-to",
        )
    rel_type, bidirectional = verb
    if rel_type is RelationType.SUPPORT:
        token = cursor.peek()
        if token is not None and not token.is_string and token.text == "<->":
            cursor.take()
            bidirectional = True
    target = _expect_practice_id(cursor)
    cursor.expect_done()
    return Relation(source=source, target=target, type=rel_type, bidirectional=bidirectional)


def parse_map_document(source: str) -> MapDocument:
    """Parse ``.agilemap`` text into a MapDocument.

    Raises MapParseError carrying one ParseError per malformed line (the
    parser recovers at line boundaries, so several errors are reported in
    one pass).  Never raises anything else, whatever the input text.
    """
    if source.startswith("﻿"):
        source = source[1:]
    errors: list[ParseError] = []
    metadata: MapMetadata | None = None
    practice_decls: list[PracticeDecl] = []
    relation_decls: list[RelationDecl] = []

    for line_number, raw_line in enumerate(source.split("\n"), start=1):
        line = raw_line.rstrip("\r")
        try:
            tokens = _tokenize(line)
            if not tokens:
                continue
            head = tokens[0]
            cursor = _Cursor(tokens, len(line))
            cursor.take()
            if head.is_string:
                raise _LineError(
                    head.column, "expected a keyword (map, practice, or relation)"
                )
            if head.text == "map":
                if metadata is not None:
                    raise _LineError(head.column, "duplicate map header")
                metadata = _parse_header(cursor)
            elif head.text == "practice":
                practice = _parse_practice(cursor)
                practice_decls.append(PracticeDecl(practice, line_number, head.column))
            elif head.text == "relation":
                relation = _parse_relation(cursor)
                relation_decls.append(RelationDecl(relation, line_number, head.column))
            else:
                raise _LineError(
                    head.column,
                    f"unknown keyword {head.text!r}: expected map, practice, or relation",
                )
        except _LineError as error:
            errors.append(ParseError(line_number, error.column, error.message, line))

    if errors:
        raise MapParseError(errors)
    return MapDocument(
        metadata=metadata or MapMetadata(),
        practice_decls=tuple(practice_decls),
        relation_decls=tuple(relation_decls),
    )


def load_map(path: str | Path) -> AgileMap:
    """Read, parse, and build a map file (UTF-8; BOM tolerated)."""
    text = Path(path).read_text(encoding="utf-8")
    return parse_map_document(text).build()


# --- serializer ------------------------------------------------------------

def _practice_line(practice: AgilePractice) -> str:
    parts = [
        "practice",
        practice.id,
        _quote(practice.name),
        "category",
        practice.category.value,
    ]
    if practice.excluded:
        parts += ["excluded", _quote(practice.exclusion_reason)]
    if practice.non_specific:
        parts.append("nonspecific")
    if practice.objectives:
        ordered = [t.value for t in ObjectiveTag if t in practice.objectives]
        parts += ["objectives", ",".join(ordered)]
    if practice.description:
        parts += ["description", _quote(practice.description)]
    for citation in practice.sources:
        parts += ["source", _quote(citation)]
    return " ".join(parts)


def _relation_line(relation: Relation) -> str:
    if relation.type is RelationType.SUPPORT:
        verb = "supports <->" if relation.bidirectional else "supports"
    elif relation.type is RelationType.REQUIRES:
        verb = "requires"
    elif relation.type is RelationType.SPECIALIZATION:
        verb = "specializes"
    else:
        verb = "alternative-to"
    return f"relation {relation.source} {verb} {relation.target}"


def serialize_map(agile_map: AgileMap) -> str:
    """Canonical text form; parsing it back rebuilds an identical map."""
    meta = agile_map.metadata
    header = f"map {_quote(meta.name)} version {_quote(meta.version)}"
    if meta.source:
        header += f" source {_quote(meta.source)}"
    lines = [header]
    lines.extend(_practice_line(p) for p in agile_map.practices)
    lines.extend(_relation_line(r) for r in agile_map.relations)
    return "\n".join(lines) + "\n"


# --- DOT export ------------------------------------------------------------

def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


_EDGE_STYLE = {
    RelationType.SPECIALIZATION: 'arrowhead=empty',
    RelationType.REQUIRES: 'label="requires"',
    RelationType.SUPPORT: 'label="supports", style=dashed',
    RelationType.ALTERNATIVE: 'label="alt", style=dashed, dir=none',
}


def export_dot(
    agile_map: AgileMap,
    include_excluded: bool = False,
    cluster_by_category: bool = False,
) -> str:
    """Graphviz digraph with the relation type encoded in the edge style.

    Specialization draws an empty-triangle arrowhead, requires a solid
    labeled edge, support a dashed labeled edge (``dir=both`` when two-way)
    and alternative a dashed undirected-rendered edge.  Excluded practices
    and their edges are omitted unless ``include_excluded`` is set, in
    which case they render greyed out.
    """
    visible = [p for p in agile_map.practices if include_excluded or not p.excluded]
    visible_ids = {p.id for p in visible}

    def node_line(practice: AgilePractice) -> str:
        label = f"{practice.id}\\n{_dot_escape(practice.name)}"
        muted = ", color=gray, fontcolor=gray" if practice.excluded else ""
        return f'  {practice.id} [label="{label}"{muted}];'

    lines = ["digraph agilemap {"]
    lines.append("  rankdir=LR;")
    lines.append('  node [shape=box, style=rounded, fontname="Helvetica"];')
    lines.append('  edge [fontname="Helvetica"];')
    if cluster_by_category:
        for index, category in enumerate(Category):
            members = [p for p in visible if p.category is category]
            if not members:
                continue
            lines.append(f"  subgraph cluster_{index} {{")
            lines.append(f'    label="{_dot_escape(category.value)}";')
            for practice in members:
                lines.append("  " + node_line(practice))
            lines.append("  }")
    else:
        for practice in visible:
            lines.append(node_line(practice))
    for relation in agile_map.relations:
        if relation.source not in visible_ids or relation.target not in visible_ids:
            continue
        attrs = _EDGE_STYLE[relation.type]
        if relation.type is RelationType.SUPPORT and relation.bidirectional:
            attrs += ", dir=both"
        lines.append(f"  {relation.source} -> {relation.target} [{attrs}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# --- JSON graph export -----------------------------------------------------

def practice_to_dict(practice: AgilePractice) -> dict:
    return {
        "id": practice.id,
        "name": practice.name,
        "category": practice.category.value,
        "description": practice.description,
        "sources": list(practice.sources),
        "excluded": practice.excluded,
        "exclusionReason": practice.exclusion_reason,
        "nonSpecific": practice.non_specific,
        "objectives": sorted(t.value for t in practice.objectives),
    }


def relation_to_dict(relation: Relation) -> dict:
    return {
        "source": relation.source,
        "target": relation.target,
        "type": relation.type.value,
        "bidirectional": relation.bidirectional,
    }


def export_json_graph(agile_map: AgileMap) -> str:
    """The wire schema served over HTTP: metadata + practices + relations."""
    document = {
        "metadata": {
            "name": agile_map.metadata.name,
            "version": agile_map.metadata.version,
            "source": agile_map.metadata.source,
        },
        "practices": [practice_to_dict(p) for p in agile_map.practices],
        "relations": [relation_to_dict(r) for r in agile_map.relations],
    }
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"
