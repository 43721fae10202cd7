"""Core narrative data model: documents, scenes, events, and focalization annotations.

Text positions are half-open intervals counted in Unicode code points,
which is exactly what Python string indexing gives us.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator, NamedTuple

# Canonical label order used everywhere bits travel together: annotation
# serialization, provider tables, evaluation columns, glyph encoding.
FLAG_FIELDS = ("pov", "internal", "external", "perceptual", "ideological", "psychological")
LABELS = ("POV", "Internal", "External", "Perceptual", "Ideological", "Psychological")

FACETS = ("perceptual", "ideological", "psychological")


@dataclass(frozen=True, order=True)
class Span:
    """Half-open [start, end) interval of code points into a document's text."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.end < self.start:
            raise ValueError(f"invalid span [{self.start}, {self.end})")

    @property
    def length(self) -> int:
        return self.end - self.start

    def contains(self, other: Span) -> bool:
        return self.start <= other.start and other.end <= self.end

    def overlaps(self, other: Span) -> bool:
        return self.start < other.end and other.start < self.end

    def slice(self, text: str) -> str:
        return text[self.start : self.end]


class RowKey(NamedTuple):
    """Composite (scene, event, character) key aligning gold and predicted rows."""

    scene: str
    event: str
    character: str


def row_key(scene_id: str, event_id: str, character_id: str) -> RowKey:
    for name, value in (("scene", scene_id), ("event", event_id), ("character", character_id)):
        if not value:
            raise ValueError(f"row key {name} component is empty")
    return RowKey(scene_id, event_id, character_id)


@dataclass(frozen=True)
class Explanation:
    """Rationale for one annotation plus cue spans into the document text.

    Cue phrases the provider returned but that could not be located in the
    event text are kept verbatim in ``unmatched_cues``.
    """

    rationale: str
    cues: tuple[Span, ...] = ()
    unmatched_cues: tuple[str, ...] = ()


@dataclass(frozen=True)
class Annotation:
    """Per-(event, character) row: one POV bit plus five focalization bits."""

    character: str
    pov: int
    internal: int
    external: int
    perceptual: int
    ideological: int
    psychological: int
    explanation: Explanation | None = None

    def bits(self) -> tuple[int, int, int, int, int, int]:
        """The six flags in canonical label order."""
        return (self.pov, self.internal, self.external,
                self.perceptual, self.ideological, self.psychological)


@dataclass(frozen=True)
class Event:
    """Smallest unit of narrative progression, tied to a text span."""

    id: str
    span: Span
    location: str | None = None
    annotations: tuple[Annotation, ...] = ()

    def annotation_for(self, character_id: str) -> Annotation | None:
        for a in self.annotations:
            if a.character == character_id:
                return a
        return None


@dataclass(frozen=True)
class Scene:
    id: str
    title: str
    span: Span
    events: tuple[Event, ...] = ()


@dataclass(frozen=True)
class Character:
    id: str
    name: str


@dataclass(frozen=True)
class NarrativeDocument:
    """A narrative text with its characters, scene/event segmentation, and annotations."""

    id: str
    title: str
    text: str
    characters: tuple[Character, ...]
    scenes: tuple[Scene, ...]
    author: str | None = None
    # Unknown top-level keys found in a non-strict parse, preserved for round-trips.
    extras: dict[str, Any] = field(default_factory=dict)

    def character_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.characters)

    def scene_by_id(self, scene_id: str) -> Scene | None:
        for s in self.scenes:
            if s.id == scene_id:
                return s
        return None

    def find_event(self, event_id: str) -> tuple[Scene, Event] | None:
        for s in self.scenes:
            for e in s.events:
                if e.id == event_id:
                    return s, e
        return None

    def iter_rows(self) -> Iterator[tuple[Scene, Event, Annotation]]:
        """All annotation rows in document order."""
        for s in self.scenes:
            for e in s.events:
                for a in e.annotations:
                    yield s, e, a


@dataclass(frozen=True)
class Violation:
    path: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()
    warnings: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def lines(self) -> list[str]:
        out = [f"violation: {v.path}: {v.message}" for v in self.violations]
        out += [f"warning: {w.path}: {w.message}" for w in self.warnings]
        return out


def validate(doc: NarrativeDocument, strict: bool = False) -> ValidationReport:
    """Check every structural invariant; violations are data, not exceptions.

    Strict mode additionally rejects draft-only shapes (scenes without
    events, events without annotations, facet bits without a type bit) and
    warns when an event carries more than one POV character.
    """
    violations: list[Violation] = []
    warnings: list[Violation] = []
    bad = violations.append

    roster: set[str] = set()
    for i, c in enumerate(doc.characters):
        if not c.id:
            bad(Violation(f"characters[{i}].id", "character id is empty"))
        elif c.id in roster:
            bad(Violation(f"characters[{i}].id", f"duplicate character id {c.id!r}"))
        else:
            roster.add(c.id)
        if not c.name:
            bad(Violation(f"characters[{i}].name", f"character {c.id!r} has an empty name"))

    if not doc.scenes:
        bad(Violation("scenes", "document has no scenes"))

    text_span = Span(0, len(doc.text))
    seen_scene_ids: set[str] = set()
    seen_event_ids: set[str] = set()
    prev_scene: Scene | None = None
    scene_sweep = 0  # max end seen so far; catches overlap with any earlier scene
    for si, scene in enumerate(doc.scenes):
        spath = f"scenes[{si}]"
        if not scene.id:
            bad(Violation(f"{spath}.id", "scene id is empty"))
        elif scene.id in seen_scene_ids:
            bad(Violation(f"{spath}.id", f"duplicate scene id {scene.id!r}"))
        seen_scene_ids.add(scene.id)

        if not text_span.contains(scene.span):
            bad(Violation(f"{spath}.span", f"scene span {_fmt(scene.span)} exceeds text "
                                           f"length {len(doc.text)}"))
        if prev_scene is not None and scene.span.start < prev_scene.span.start:
            bad(Violation(f"{spath}.span", "scenes are not ordered by start offset"))
        elif scene.span.start < scene_sweep and scene.span.length > 0:
            bad(Violation(f"{spath}.span", f"scene span {_fmt(scene.span)} overlaps "
                                           f"an earlier scene"))
        scene_sweep = max(scene_sweep, scene.span.end)
        prev_scene = scene

        if strict and not scene.events:
            bad(Violation(f"{spath}.events", f"scene {scene.id!r} has no events"))

        prev_event: Event | None = None
        event_sweep = 0
        for ei, event in enumerate(scene.events):
            epath = f"{spath}.events[{ei}]"
            if not event.id:
                bad(Violation(f"{epath}.id", "event id is empty"))
            elif event.id in seen_event_ids:
                bad(Violation(f"{epath}.id", f"duplicate event id {event.id!r}"))
            seen_event_ids.add(event.id)

            if not scene.span.contains(event.span):
                bad(Violation(f"{epath}.span", f"event span {_fmt(event.span)} not contained "
                                               f"in scene span {_fmt(scene.span)}"))
            if prev_event is not None and event.span.start < prev_event.span.start:
                bad(Violation(f"{epath}.span", "events are not ordered by start offset"))
            elif event.span.start < event_sweep and event.span.length > 0:
                bad(Violation(f"{epath}.span", f"event span {_fmt(event.span)} overlaps "
                                               f"an earlier event"))
            event_sweep = max(event_sweep, event.span.end)
            prev_event = event

            if strict and not event.annotations:
                bad(Violation(f"{epath}.annotations", f"event {event.id!r} has no annotations"))

            seen_chars: set[str] = set()
            pov_count = 0
            for ai, ann in enumerate(event.annotations):
                apath = f"{epath}.annotations[{ai}]"
                if ann.character in seen_chars:
                    bad(Violation(f"{apath}.character",
                                  f"event {event.id!r} annotates character "
                                  f"{ann.character!r} more than once"))
                seen_chars.add(ann.character)
                if ann.character not in roster:
                    bad(Violation(f"{apath}.character",
                                  f"annotation references unknown character {ann.character!r}"))
                for flag in FLAG_FIELDS:
                    value = getattr(ann, flag)
                    if value not in (0, 1):
                        bad(Violation(f"{apath}.{flag}", f"flag must be 0 or 1, got {value!r}"))
                if strict and any(getattr(ann, f) == 1 for f in FACETS) \
                        and not (ann.internal == 1 or ann.external == 1):
                    bad(Violation(apath, "facet bit set without internal or external type"))
                if ann.pov == 1:
                    pov_count += 1
                if ann.explanation is not None:
                    for ci, cue in enumerate(ann.explanation.cues):
                        if not event.span.contains(cue):
                            bad(Violation(f"{apath}.explanation.cues[{ci}]",
                                          f"cue span {_fmt(cue)} not contained in event "
                                          f"span {_fmt(event.span)}"))
            if strict and pov_count > 1:
                warnings.append(Violation(epath, f"event {event.id!r} has {pov_count} "
                                                 f"POV characters"))

    return ValidationReport(tuple(violations), tuple(warnings))


def active_characters(scene: Scene) -> list[str]:
    """Character ids annotated in the scene, ordered by first appearance."""
    seen: list[str] = []
    for event in scene.events:
        for ann in event.annotations:
            if ann.character not in seen:
                seen.append(ann.character)
    return seen


def _fmt(span: Span) -> str:
    return f"[{span.start}, {span.end})"
