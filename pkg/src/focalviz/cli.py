"""Command line entry point: validate, annotate, evaluate, render, serve.

Exit codes: 0 success, 1 validation/evaluation/runtime failure, 2 usage
error. Diagnostics go to stderr; data goes to stdout or files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import fields
from pathlib import Path

from .layout import LayoutConfig, LayoutError, View
from .metrics import AlignmentError, MetricsError, evaluate, load_table, render_report
from .model import validate
from .pipeline import PipelineError, ProviderConfig, annotate_document
from .render import GlyphStyle, RenderError, render_story
from .server import ServerConfig, serve
from .store import StoreError, load_story, serialize_canonical


def _err(message: str) -> None:
    print(f"focalviz: {message}", file=sys.stderr)


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _dataclass_from(cls, overrides: dict):
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(overrides) - known)
    if unknown:
        raise ValueError(f"unknown {cls.__name__} options: {unknown}")
    return cls(**overrides)


def _layout_config(args) -> LayoutConfig:
    overrides = dict(_load_config_file(getattr(args, "config", None)).get("layout", {}))
    if getattr(args, "width", None) is not None:
        overrides["container_width"] = args.width
    return _dataclass_from(LayoutConfig, overrides)


def _glyph_style(args) -> GlyphStyle:
    overrides = _load_config_file(getattr(args, "config", None)).get("style", {})
    if "facet_arcs" in overrides:
        overrides = dict(overrides)
        overrides["facet_arcs"] = tuple(tuple(arc) for arc in overrides["facet_arcs"])
    return _dataclass_from(GlyphStyle, overrides)


def cmd_validate(args) -> int:
    try:
        doc = load_story(args.file, strict=args.strict)
    except (OSError, StoreError) as exc:
        _err(f"cannot read {args.file}: {exc}")
        return 1
    report = validate(doc, strict=args.strict)
    for violation in report.violations:
        print(f"violation: {violation.path}: {violation.message}")
    for warning in report.warnings:
        print(f"warning: {warning.path}: {warning.message}", file=sys.stderr)
    return 0 if report.ok else 1


def cmd_annotate(args) -> int:
    try:
        doc = load_story(args.file)
    except (OSError, StoreError) as exc:
        _err(f"cannot read {args.file}: {exc}")
        return 1
    report = validate(doc)
    if not report.ok:
        _err(f"input does not validate: {report.violations[0].path}: "
             f"{report.violations[0].message}")
        return 1

    provider_overrides = dict(_load_config_file(args.config).get("provider", {}))
    provider_overrides["kind"] = args.provider
    if args.mock_script is not None:
        provider_overrides["mock_script"] = args.mock_script
    if args.endpoint is not None:
        provider_overrides["endpoint"] = args.endpoint
    if args.model is not None:
        provider_overrides["model"] = args.model
    if args.concurrency is not None:
        provider_overrides["concurrency"] = args.concurrency
    if args.max_retries is not None:
        provider_overrides["max_retries"] = args.max_retries
    try:
        config = _dataclass_from(ProviderConfig, provider_overrides)
    except ValueError as exc:
        _err(str(exc))
        return 2

    try:
        annotated, pipeline_report = annotate_document(doc, config)
    except PipelineError as exc:
        _err(str(exc))
        return 1

    out = Path(args.out)
    out.write_bytes(serialize_canonical(annotated))
    report_path = Path(args.report) if args.report else out.with_name(out.name + ".report.json")
    report_path.write_text(json.dumps(pipeline_report.to_dict(), indent=2) + "\n",
                           encoding="utf-8")
    for outcome in pipeline_report.events:
        for note in outcome.warnings:
            _err(f"warning: event {outcome.event_id}: {note}")
    failed = pipeline_report.failed
    if failed:
        for outcome in failed:
            _err(f"event {outcome.event_id} failed after {outcome.retries} retries: "
                 f"{outcome.error}")
        _err(f"{len(failed)} event(s) failed; see {report_path}")
        return 1
    _err(f"annotated {len(pipeline_report.events)} events -> {out}")
    return 0


def cmd_evaluate(args) -> int:
    try:
        gold = load_table(args.gold)
        pred = load_table(args.pred)
    except (OSError, StoreError, MetricsError) as exc:
        _err(str(exc))
        return 1
    try:
        report = evaluate(gold, pred, policy=args.policy)
    except AlignmentError as exc:
        _err(str(exc))
        return 1
    except MetricsError as exc:
        _err(str(exc))
        return 1
    print(render_report(report, format=args.format), end="")
    return 0


def cmd_render(args) -> int:
    try:
        doc = load_story(args.file)
    except (OSError, StoreError) as exc:
        _err(f"cannot read {args.file}: {exc}")
        return 1
    report = validate(doc)
    if not report.ok:
        _err(f"input does not validate: {report.violations[0].path}: "
             f"{report.violations[0].message}")
        return 1
    try:
        view = View.parse(args.view)
        svg = render_story(doc, view, _layout_config(args), _glyph_style(args))
    except ValueError as exc:
        _err(str(exc))
        return 2
    except (LayoutError, RenderError) as exc:
        _err(str(exc))
        return 1
    Path(args.out).write_bytes(svg.to_bytes())
    return 0


def cmd_serve(args) -> int:
    try:
        config = ServerConfig(
            stories_dir=args.stories,
            host=args.host,
            port=args.port,
            layout=_layout_config(args),
            style=_glyph_style(args),
            cors_origins=tuple(args.cors_origin or ()),
            static_dir=args.ui,
        )
        serve(config)
    except (StoreError, ValueError, OSError) as exc:
        _err(str(exc))
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="focalviz",
        description="Narrative focalization tooling: validate and annotate story "
                    "files, score annotations, render glyph timelines, and serve "
                    "the HTTP API.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a story file against every invariant")
    p.add_argument("file")
    p.add_argument("--strict", action="store_true",
                   help="also reject draft-only shapes and emit warnings")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("annotate", help="label a segmented story through a provider")
    p.add_argument("file", help="segmented story file (annotations optional)")
    p.add_argument("--provider", choices=("mock", "http"), required=True)
    p.add_argument("--mock-script", help="mock provider script file")
    p.add_argument("--endpoint", help="http provider URL")
    p.add_argument("--model", help="model name passed to the provider")
    p.add_argument("--concurrency", type=int, help="events in flight (default 4)")
    p.add_argument("--max-retries", type=int, help="retries per event (default 2)")
    p.add_argument("--out", required=True, help="annotated story output path")
    p.add_argument("--report", help="pipeline report path (default <out>.report.json)")
    p.add_argument("--config", help="JSON config file with provider overrides")
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("evaluate", help="score predicted labels against gold")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--policy", choices=("strict", "intersect"), default="strict")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("render", help="render a story timeline to SVG")
    p.add_argument("file")
    p.add_argument("--view", default="overview",
                   help="overview | scene:<id> | character:<id>")
    p.add_argument("--width", type=int, help="container width in px")
    p.add_argument("-o", "--out", required=True, help="output SVG path")
    p.add_argument("--config", help="JSON config file with layout/style overrides")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("serve", help="serve the read-only HTTP API")
    p.add_argument("--stories", required=True, help="directory of .focal.json files")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=int(os.environ.get("FOCALVIZ_PORT", "8000")),
                   help="listen port (default $FOCALVIZ_PORT or 8000)")
    p.add_argument("--cors-origin", action="append", help="allowed CORS origin (repeatable)")
    p.add_argument("--ui", help="static directory to serve at / (built web client)")
    p.add_argument("--config", help="JSON config file with layout/style overrides")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
