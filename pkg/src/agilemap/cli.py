"""Command-line interface: validate, closure, select, export, stats, serve.

Exit codes: 0 success, 1 violations or analysis findings present, 2 usage
or I/O error.  Human-readable output goes to stdout and diagnostics to
stderr; identical invocations on identical files produce byte-identical
stdout.  ``--json`` switches the reporting commands to a machine-stable
format carrying a ``schemaVersion`` field.
"""

from __future__ import annotations

import argparse
import json
import socket
import sys
from pathlib import Path

from .analysis import (
    Selection,
    SelectionReport,
    claims_full_map,
    compose_plan,
    map_stats,
    requires_closure,
    validate_selection,
)
from .mapio import MapDocument, MapParseError, export_dot, export_json_graph, parse_map_document
from .model import AgileMap, AgileMapError, MapValidationError, RelationType, Violation

SCHEMA_VERSION = 1

FULL_MAP_TARGETS = (
    ("practices", 37),
    ("relations", 47),
    ("requires", 20),
)

__all__ = ["main", "entrypoint", "SCHEMA_VERSION"]


def _read_document(path: str) -> MapDocument:
    return parse_map_document(Path(path).read_text(encoding="utf-8"))


def _positions_text(positions: tuple[tuple[int, int], ...]) -> str:
    return ", ".join(f"line {line}:{column}" for line, column in positions)


def _violation_to_dict(violation: Violation, document: MapDocument) -> dict:
    return {
        "kind": violation.kind.value,
        "message": violation.message,
        "practices": list(violation.practice_ids),
        "relations": [
            {"source": r.source, "target": r.target, "type": r.type.value,
             "bidirectional": r.bidirectional}
            for r in violation.relations
        ],
        "positions": [
            {"line": line, "column": column}
            for line, column in document.positions_for(violation)
        ],
    }


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def _cmd_validate(args: argparse.Namespace) -> int:
    document = _read_document(args.file)
    try:
        agile_map = document.build()
    except MapValidationError as exc:
        if args.json:
            _print_json({
                "schemaVersion": SCHEMA_VERSION,
                "ok": False,
                "violations": [_violation_to_dict(v, document) for v in exc.violations],
            })
        else:
            for violation in exc.violations:
                where = _positions_text(document.positions_for(violation))
                suffix = f" ({where})" if where else ""
                print(f"{violation.kind.value}: {violation.message}{suffix}")
        return 1
    if args.json:
        _print_json({
            "schemaVersion": SCHEMA_VERSION,
            "ok": True,
            "practiceCount": len(agile_map.practices),
            "relationCount": len(agile_map.relations),
            "warnings": list(agile_map.warnings),
        })
    else:
        print(f"OK: {len(agile_map.practices)} practices, {len(agile_map.relations)} relations")
    for warning in agile_map.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def _cmd_closure(args: argparse.Namespace) -> int:
    agile_map = _read_document(args.file).build()
    closure = sorted(requires_closure(agile_map, args.ids))
    if args.json:
        _print_json({"schemaVersion": SCHEMA_VERSION, "closure": closure})
    else:
        for practice_id in closure:
            print(f"{practice_id} {agile_map.practice(practice_id).name}")
    return 0


def _split_choose(text: str) -> frozenset[str]:
    return frozenset(part.strip() for part in text.split(",") if part.strip())


def _print_report(report: SelectionReport, agile_map: AgileMap) -> None:
    closure = ", ".join(report.closure) if report.closure else "(none)"
    print(f"closure: {closure}")
    if report.missing_required:
        print("missing required:")
        for practice_id in report.missing_required:
            print(f"  {practice_id} {agile_map.practice(practice_id).name}")
    if report.support_suggestions:
        print("support suggestions:")
        for suggestion in report.support_suggestions:
            print(f"  {suggestion.id} ({suggestion.justification})")
    if report.alternative_hints:
        print("alternatives for missing:")
        for hint in report.alternative_hints:
            partners = ", ".join(hint.alternatives) if hint.alternatives else "(none)"
            print(f"  {hint.missing}: {partners}")
    for warning in report.warnings:
        print(f"warning: {warning}")


def _cmd_select(args: argparse.Namespace) -> int:
    agile_map = _read_document(args.file).build()
    selection = Selection(chosen=_split_choose(args.choose))
    report = validate_selection(agile_map, selection)
    plan = None
    if args.plan and not report.missing_required:
        plan = compose_plan(agile_map, selection)
    if args.json:
        from .service import plan_to_dict, report_to_dict

        _print_json({
            "schemaVersion": SCHEMA_VERSION,
            "report": report_to_dict(report),
            "plan": plan_to_dict(plan) if plan is not None else None,
        })
    else:
        _print_report(report, agile_map)
        if plan is not None:
            print("plan:")
            for number, stage in enumerate(plan.stages, start=1):
                print(f"  stage {number}: {', '.join(stage)}")
            print("by category:")
            for category, ids in plan.by_category:
                print(f"  {category.value}: {', '.join(ids)}")
    return 1 if report.missing_required else 0


def _cmd_export(args: argparse.Namespace) -> int:
    agile_map = _read_document(args.file).build()
    if args.format == "dot":
        sys.stdout.write(export_dot(agile_map, include_excluded=args.include_excluded))
    else:
        sys.stdout.write(export_json_graph(agile_map))
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    agile_map = _read_document(args.file).build()
    stats = map_stats(agile_map)
    requires_count = dict(stats.relation_count_by_type).get(RelationType.REQUIRES, 0)
    actuals = (stats.practice_count, stats.total_relations, requires_count)
    if args.json:
        payload = {
            "schemaVersion": SCHEMA_VERSION,
            "practiceCount": stats.practice_count,
            "excludedCount": stats.excluded_count,
            "nonSpecificCount": stats.non_specific_count,
            "relationCountByType": {rt.value: n for rt, n in stats.relation_count_by_type},
            "totalRelations": stats.total_relations,
        }
        if claims_full_map(agile_map):
            payload["fullMapAudit"] = {
                name: {"actual": actual, "expected": expected}
                for (name, expected), actual in zip(FULL_MAP_TARGETS, actuals)
            }
        _print_json(payload)
        return 0
    print(
        f"practices: {stats.practice_count} "
        f"(excluded: {stats.excluded_count}, non-specific: {stats.non_specific_count})"
    )
    print(f"relations: {stats.total_relations}")
    for rel_type, count in stats.relation_count_by_type:
        print(f"  {rel_type.value}: {count}")
    if claims_full_map(agile_map):
        parts = [
            f"{name} {actual}/{expected}" + ("" if actual == expected else " MISMATCH")
            for (name, expected), actual in zip(FULL_MAP_TARGETS, actuals)
        ]
        print(f"full-map audit: {', '.join(parts)}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    agile_map = _read_document(args.file).build()
    if args.ui_dir is not None and not Path(args.ui_dir).is_dir():
        print(f"error: --ui-dir {args.ui_dir} is not a directory", file=sys.stderr)
        return 2

    import uvicorn

    from .service import create_app

    app = create_app(agile_map, ui_dir=args.ui_dir)
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((args.host, args.port))
    except OSError as exc:
        sock.close()
        print(f"error: cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return 2
    port = sock.getsockname()[1]
    print(f"serving on http://{args.host}:{port}", flush=True)
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning"))
    server.run(sockets=[sock])
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agilemap",
        description="Validate, analyze, export, and serve agile practice maps.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help_text: str, func) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("file", help="path to a .agilemap file")
        sub.set_defaults(func=func)
        return sub

    validate = command("validate", "parse a map and report meta-model violations", _cmd_validate)
    validate.add_argument("--json", action="store_true", help="emit a JSON report")

    closure = command("closure", "list the transitive requires-closure of practices", _cmd_closure)
    closure.add_argument("ids", nargs="+", metavar="id", help="seed practice ids")
    closure.add_argument("--json", action="store_true", help="emit JSON")

    select = command("select", "validate a selection of practices", _cmd_select)
    select.add_argument(
        "--choose", required=True, metavar="ids",
        help="comma-separated practice ids (whitespace-tolerant, case-insensitive)",
    )
    select.add_argument(
        "--plan", action="store_true",
        help="also print the composition plan when the selection is complete",
    )
    select.add_argument("--json", action="store_true", help="emit JSON")

    export = command("export", "write the map as DOT or JSON to stdout", _cmd_export)
    export.add_argument("--format", required=True, choices=("dot", "json"))
    export.add_argument(
        "--include-excluded", action="store_true",
        help="include excluded practices in DOT output (JSON always carries them, flagged)",
    )

    stats = command("stats", "print practice and relation counts", _cmd_stats)
    stats.add_argument("--json", action="store_true", help="emit JSON")

    serve = command("serve", "serve the map over HTTP", _cmd_serve)
    serve.add_argument("--host", default="127.0.0.1", help="bind address (default 127.0.0.1)")
    serve.add_argument("--port", type=int, default=8000,
                       help="bind port; 0 picks an ephemeral port (default 8000)")
    serve.add_argument("--ui-dir", default=None,
                       help="directory of built UI assets to host at the web root")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: cannot read {args.file}: {exc}", file=sys.stderr)
        return 2
    except MapParseError as exc:
        for error in exc.errors:
            print(f"{args.file}:{error.line}:{error.column}: error: {error.message}",
                  file=sys.stderr)
        return 2
    except MapValidationError as exc:
        print(f"error: {args.file} is not a valid map:", file=sys.stderr)
        for violation in exc.violations:
            print(f"  {violation.kind.value}: {violation.message}", file=sys.stderr)
        return 2
    except AgileMapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
