"""Canonical `.focal.json` on-disk format: parsing, serialization, and story catalogs.

Parsing checks structure only (shapes and types); semantic invariants are
the job of :func:`focalviz.model.validate`. Canonical serialization is a
fixed point: serialize -> parse -> serialize is byte-identical.
"""

from __future__ import annotations

import json
import warnings as _warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .model import (
    Annotation,
    Character,
    Event,
    Explanation,
    FLAG_FIELDS,
    NarrativeDocument,
    Scene,
    Span,
    validate,
)

SCHEMA_VERSION = "1.0"
FILE_SUFFIX = ".focal.json"

_DOC_KEYS = ("schema_version", "id", "title", "author", "text", "characters", "scenes")


class StoreError(Exception):
    pass


class ParseError(StoreError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class VersionError(StoreError):
    pass


class CatalogError(StoreError):
    pass


class UnknownKeyWarning(UserWarning):
    """Non-strict parse met keys the schema does not define."""


def parse(data: bytes | str, strict: bool = False) -> NarrativeDocument:
    """Parse a `.focal.json` payload into a document.

    Unknown top-level keys are preserved on ``doc.extras`` with an
    :class:`UnknownKeyWarning`; in strict mode they are an error instead.
    """
    if isinstance(data, bytes):
        if data.startswith(b"\xef\xbb\xbf"):
            raise ParseError("UTF-8 BOM is not allowed")
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc}") from exc
    else:
        text = data
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from exc

    root = _Reader(raw, "$", strict)
    version = root.req("schema_version", str)
    if version != SCHEMA_VERSION:
        raise VersionError(f"unsupported schema_version {version!r}, expected {SCHEMA_VERSION!r}")

    doc = NarrativeDocument(
        id=root.req("id", str),
        title=root.req("title", str),
        author=root.opt("author", str),
        text=root.req("text", str),
        characters=tuple(_parse_character(c) for c in root.req_list("characters")),
        scenes=tuple(_parse_scene(s) for s in root.req_list("scenes")),
        extras=root.extras(_DOC_KEYS),
    )
    return doc


def _parse_character(r: _Reader) -> Character:
    character = Character(id=r.req("id", str), name=r.req("name", str))
    r.reject_unknown(("id", "name"))
    return character


def _parse_scene(r: _Reader) -> Scene:
    scene = Scene(
        id=r.req("id", str),
        title=r.req("title", str),
        span=r.span("span"),
        events=tuple(_parse_event(e) for e in r.req_list("events")),
    )
    r.reject_unknown(("id", "title", "span", "events"))
    return scene


def _parse_event(r: _Reader) -> Event:
    event = Event(
        id=r.req("id", str),
        span=r.span("span"),
        location=r.opt("location", str),
        annotations=tuple(_parse_annotation(a) for a in r.opt_list("annotations")),
    )
    r.reject_unknown(("id", "span", "location", "annotations"))
    return event


def _parse_annotation(r: _Reader) -> Annotation:
    flags = {name: r.req(name, int) for name in FLAG_FIELDS}
    ann = Annotation(
        character=r.req("character", str),
        explanation=_parse_explanation(r),
        **flags,
    )
    r.reject_unknown(("character", "explanation") + FLAG_FIELDS)
    return ann


def _parse_explanation(r: _Reader) -> Explanation | None:
    sub = r.opt_reader("explanation")
    if sub is None:
        return None
    exp = Explanation(
        rationale=sub.req("rationale", str),
        cues=tuple(sub.span_list("cues")),
        unmatched_cues=tuple(sub.str_list("unmatched_cues")),
    )
    sub.reject_unknown(("rationale", "cues", "unmatched_cues"))
    return exp


class _Reader:
    """Path-tracking accessor over parsed JSON with strict type checks."""

    def __init__(self, raw: Any, path: str, strict: bool):
        if not isinstance(raw, dict):
            raise ParseError(f"{path}: expected an object, got {type(raw).__name__}")
        self.raw = raw
        self.path = path
        self.strict = strict

    def req(self, key: str, kind: type) -> Any:
        if key not in self.raw:
            raise ParseError(f"{self.path}.{key}: missing required field")
        value = self.raw[key]
        # bool is an int subclass; never accept it where an int bit is expected
        if not isinstance(value, kind) or isinstance(value, bool):
            raise ParseError(f"{self.path}.{key}: expected {kind.__name__}, "
                             f"got {type(value).__name__}")
        return value

    def opt(self, key: str, kind: type) -> Any | None:
        if key not in self.raw or self.raw[key] is None:
            return None
        return self.req(key, kind)

    def req_list(self, key: str) -> list[_Reader]:
        value = self.req(key, list)
        return [_Reader(item, f"{self.path}.{key}[{i}]", self.strict)
                for i, item in enumerate(value)]

    def opt_list(self, key: str) -> list[_Reader]:
        if key not in self.raw:
            return []
        return self.req_list(key)

    def opt_reader(self, key: str) -> _Reader | None:
        if key not in self.raw or self.raw[key] is None:
            return None
        return _Reader(self.raw[key], f"{self.path}.{key}", self.strict)

    def span(self, key: str) -> Span:
        value = self.req(key, list)
        if len(value) != 2 or not all(isinstance(v, int) and not isinstance(v, bool)
                                      for v in value):
            raise ParseError(f"{self.path}.{key}: span must be a [start, end] pair of integers")
        try:
            return Span(value[0], value[1])
        except ValueError as exc:
            raise ParseError(f"{self.path}.{key}: {exc}") from exc

    def span_list(self, key: str) -> list[Span]:
        if key not in self.raw:
            return []
        raw = self.req(key, list)
        return [self._span_item(f"{self.path}.{key}[{i}]", item)
                for i, item in enumerate(raw)]

    def _span_item(self, path: str, item: Any) -> Span:
        if not (isinstance(item, list) and len(item) == 2
                and all(isinstance(v, int) and not isinstance(v, bool) for v in item)):
            raise ParseError(f"{path}: span must be a [start, end] pair of integers")
        try:
            return Span(item[0], item[1])
        except ValueError as exc:
            raise ParseError(f"{path}: {exc}") from exc

    def str_list(self, key: str) -> list[str]:
        if key not in self.raw:
            return []
        raw = self.req(key, list)
        for i, item in enumerate(raw):
            if not isinstance(item, str):
                raise ParseError(f"{self.path}.{key}[{i}]: expected str, "
                                 f"got {type(item).__name__}")
        return list(raw)

    def extras(self, known: tuple[str, ...]) -> dict[str, Any]:
        unknown = {k: v for k, v in self.raw.items() if k not in known}
        if unknown:
            if self.strict:
                raise ParseError(f"{self.path}: unknown keys {sorted(unknown)}")
            _warnings.warn(f"{self.path}: preserving unknown keys {sorted(unknown)}",
                           UnknownKeyWarning, stacklevel=3)
        return unknown

    def reject_unknown(self, known: tuple[str, ...]) -> None:
        unknown = sorted(k for k in self.raw if k not in known)
        if not unknown:
            return
        if self.strict:
            raise ParseError(f"{self.path}: unknown keys {unknown}")
        _warnings.warn(f"{self.path}: ignoring unknown keys {unknown}",
                       UnknownKeyWarning, stacklevel=3)


def serialize_canonical(doc: NarrativeDocument) -> bytes:
    """Serialize with fixed key order and formatting; newline-terminated UTF-8."""
    payload: dict[str, Any] = {"schema_version": SCHEMA_VERSION, "id": doc.id,
                               "title": doc.title}
    if doc.author is not None:
        payload["author"] = doc.author
    payload["text"] = doc.text
    payload["characters"] = [{"id": c.id, "name": c.name} for c in doc.characters]
    payload["scenes"] = [_scene_dict(s) for s in doc.scenes]
    for key in sorted(doc.extras):
        payload[key] = doc.extras[key]
    return (json.dumps(payload, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


def _scene_dict(scene: Scene) -> dict[str, Any]:
    return {
        "id": scene.id,
        "title": scene.title,
        "span": [scene.span.start, scene.span.end],
        "events": [_event_dict(e) for e in scene.events],
    }


def _event_dict(event: Event) -> dict[str, Any]:
    out: dict[str, Any] = {"id": event.id, "span": [event.span.start, event.span.end]}
    if event.location is not None:
        out["location"] = event.location
    out["annotations"] = [_annotation_dict(a) for a in event.annotations]
    return out


def _annotation_dict(ann: Annotation) -> dict[str, Any]:
    out: dict[str, Any] = {"character": ann.character}
    for flag in FLAG_FIELDS:
        out[flag] = getattr(ann, flag)
    if ann.explanation is not None:
        exp: dict[str, Any] = {
            "rationale": ann.explanation.rationale,
            "cues": [[c.start, c.end] for c in ann.explanation.cues],
        }
        if ann.explanation.unmatched_cues:
            exp["unmatched_cues"] = list(ann.explanation.unmatched_cues)
        out["explanation"] = exp
    return out


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    title: str
    path: Path


@dataclass(frozen=True)
class SkippedFile:
    path: Path
    reason: str


@dataclass(frozen=True)
class StoryCatalog:
    directory: Path
    entries: tuple[CatalogEntry, ...]
    skipped: tuple[SkippedFile, ...] = ()

    def ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.entries)


def scan_catalog(directory: str | Path) -> StoryCatalog:
    """Index every parseable and valid story file in a directory, sorted by id.

    Files that fail parsing or validation are skipped with a reason.
    Duplicate story ids across files are a hard error.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise CatalogError(f"not a directory: {directory}")

    entries: list[CatalogEntry] = []
    skipped: list[SkippedFile] = []
    by_id: dict[str, Path] = {}
    for path in sorted(directory.iterdir()):
        if not path.name.endswith(FILE_SUFFIX) or not path.is_file():
            continue
        try:
            doc = parse(path.read_bytes())
        except StoreError as exc:
            skipped.append(SkippedFile(path, str(exc)))
            continue
        report = validate(doc)
        if not report.ok:
            first = report.violations[0]
            skipped.append(SkippedFile(path, f"invalid: {first.path}: {first.message}"))
            continue
        if doc.id in by_id:
            raise CatalogError(f"duplicate story id {doc.id!r} in {by_id[doc.id]} and {path}")
        by_id[doc.id] = path
        entries.append(CatalogEntry(doc.id, doc.title, path))

    entries.sort(key=lambda e: e.id)
    return StoryCatalog(directory, tuple(entries), tuple(skipped))


def load_story(path: str | Path, strict: bool = False) -> NarrativeDocument:
    """Read and parse one story file."""
    return parse(Path(path).read_bytes(), strict=strict)
