"""Model-assisted labeling: prompt construction, strict response parsing,
pluggable providers, and the document-level annotation driver.

Providers return free text that must satisfy a tabular JSON contract: one
row per participating character carrying the six binary labels, a short
rationale, and cue phrases. Cue phrases are resolved to text spans locally
by first exact occurrence inside the event, because providers cannot be
trusted with offsets.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Protocol

import httpx

from .model import (
    Annotation,
    Event,
    Explanation,
    LABELS,
    NarrativeDocument,
    Scene,
    Span,
)

DEFAULT_API_KEY_ENV = "FOCALVIZ_API_KEY"

_SUMMARY_LIMIT = 160  # code points of neighbor-event context


class PipelineError(Exception):
    pass


class MalformedResponse(PipelineError):
    """Response violates the tabular contract; the event is retried."""


class UnknownCharacter(MalformedResponse):
    pass


class RangeError(MalformedResponse):
    """A label value fell outside {0, 1}."""


class ProviderError(PipelineError):
    def __init__(self, message: str, retryable: bool = True):
        super().__init__(message)
        self.retryable = retryable


class MockScriptMiss(ProviderError):
    def __init__(self, fingerprint: str):
        super().__init__(f"mock script has no response for fingerprint {fingerprint}",
                         retryable=False)
        self.fingerprint = fingerprint


_DEFINITIONS = """\
You analyze narrative perspective. For one event from a story, you decide,
for each listed character, which perspective signals the passage carries.

Definitions, each with an example from a public-domain work:

- Point of view (the POV column): the character is telling the story at this
  moment; the narration speaks as that character. Melville opens Moby-Dick
  with "Call me Ishmael." -- the teller and the perceiver are the same
  character, so Ishmael holds point of view.
- Internal focalization: the reader gets direct access to the character's
  inner perceptions, knowledge, or emotions. In The Yellow Wallpaper the
  narrator writes "I get unreasonably angry with John sometimes" -- her
  feeling is given from the inside.
- External focalization: the character is presented only through outward,
  observable behavior; the text never enters their mind. Crane's The Open
  Boat gives the cook only as posture and gaze: "The cook squatted in the
  bottom and looked with both eyes at the six inches of gunwale" -- what he
  thinks or feels stays unavailable.
- Perceptual facet: the passage foregrounds what can be sensed from the
  character's position in space and time, including its limits. The Open
  Boat opens "None of them knew the color of the sky" because the men's
  eyes are locked on the waves -- sensory access itself is the subject.
- Ideological facet: the passage foregrounds norms, judgments, or values
  through which events are framed. Pride and Prejudice opens "It is a truth
  universally acknowledged, that a single man in possession of a good
  fortune must be in want of a wife" -- a social judgment presented as
  shared truth.
- Psychological facet: the passage foregrounds what the character knows,
  infers, remembers, or feels. Ishmael's "damp, drizzly November in my
  soul" reports an inner state no outside observer could see.

A character may carry several labels at once, or none. Point of view and
focalization are independent: a character can be focalized without telling
the story.\
"""


def _default_contract() -> str:
    keys = ", ".join(f'"{label}": 0 or 1' for label in LABELS)
    return (
        "Respond with only a JSON object, no prose around it, shaped exactly like:\n"
        '{"rows": [{"character": "<character id>", ' + keys + ", "
        '"rationale": "<one or two sentences of justification>", '
        '"cues": ["<short phrase copied verbatim from the event text>"]}]}\n'
        "Include one row for each listed character that appears or is perceptible\n"
        "in this event, in the order the characters are listed; omit the others.\n"
        "Label values must be the integers 0 or 1. Use the character id, never\n"
        "the display name."
    )


@dataclass(frozen=True)
class PromptTemplate:
    """System preamble (definitions) plus the output-format contract."""

    preamble: str = _DEFINITIONS
    format_contract: str = field(default_factory=_default_contract)


@dataclass(frozen=True)
class AnnotationRequest:
    event_text: str
    scene_context: str
    roster: tuple[tuple[str, str], ...]  # (id, display name)
    instructions: PromptTemplate = PromptTemplate()

    def __post_init__(self) -> None:
        if not self.event_text:
            raise ValueError("event text is empty")
        if not self.roster:
            raise ValueError("character roster is empty")


def _event_marker(text: str) -> str:
    """Fence marker guaranteed not to collide with the fenced text."""
    marker = "EVENT_TEXT"
    while marker in text:
        marker += "_X"
    return marker


def build_prompt(request: AnnotationRequest) -> str:
    """Deterministic prompt carrying the event text verbatim."""
    marker = _event_marker(request.event_text)
    roster_lines = "\n".join(f"- id: {json.dumps(cid)}  name: {json.dumps(name)}"
                             for cid, name in request.roster)
    return (
        f"{request.instructions.preamble}\n\n"
        f"SCENE CONTEXT\n{request.scene_context}\n\n"
        f"CHARACTERS\n{roster_lines}\n\n"
        f"EVENT TEXT (between the {marker} markers)\n"
        f"<<<{marker}\n{request.event_text}\n{marker}>>>\n\n"
        f"OUTPUT FORMAT\n{request.instructions.format_contract}\n"
    )


def prompt_fingerprint(prompt: str) -> str:
    """Short stable key identifying a prompt, used by mock scripts and reports."""
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class ParsedRow:
    character: str
    bits: tuple[int, int, int, int, int, int]
    rationale: str = ""
    cues: tuple[str, ...] = ()
    cue_spans: tuple[Span, ...] = ()
    unmatched_cues: tuple[str, ...] = ()


@dataclass(frozen=True)
class ProviderResponse:
    raw: str
    rows: tuple[ParsedRow, ...]


def _strip_fence(raw: str) -> str:
    text = raw.strip()
    if text.startswith("```"):
        first_newline = text.find("\n")
        if first_newline != -1 and text.endswith("```"):
            text = text[first_newline + 1 : -3].strip()
    return text


def parse_response(raw: str, roster: tuple[tuple[str, str], ...],
                   event_text: str | None = None,
                   event_start: int = 0) -> ProviderResponse:
    """Strictly parse the tabular JSON contract; rows come back in roster order.

    When the event text is supplied, cue phrases are resolved to absolute
    spans by first exact occurrence; phrases that never occur are kept
    verbatim in ``unmatched_cues``.
    """
    if not raw:
        raise MalformedResponse("empty response")
    try:
        payload = json.loads(_strip_fence(raw))
    except json.JSONDecodeError as exc:
        raise MalformedResponse(f"response is not valid JSON: {exc.msg}") from exc
    if not isinstance(payload, dict) or not isinstance(payload.get("rows"), list):
        raise MalformedResponse("response must be an object with a 'rows' array")

    roster_ids = [cid for cid, _ in roster]
    by_character: dict[str, ParsedRow] = {}
    for i, item in enumerate(payload["rows"]):
        if not isinstance(item, dict):
            raise MalformedResponse(f"rows[{i}] is not an object")
        character = item.get("character")
        if not isinstance(character, str) or not character:
            raise MalformedResponse(f"rows[{i}] is missing a character id")
        if character not in roster_ids:
            raise UnknownCharacter(f"rows[{i}] names unknown character {character!r}")
        if character in by_character:
            raise MalformedResponse(f"rows[{i}] repeats character {character!r}")
        bits = []
        for label in LABELS:
            if label not in item:
                raise MalformedResponse(f"rows[{i}] is missing label {label!r}")
            value = item[label]
            if isinstance(value, bool) or not isinstance(value, int) or value not in (0, 1):
                raise RangeError(f"rows[{i}].{label} must be 0 or 1, got {value!r}")
            bits.append(value)
        rationale = item.get("rationale", "")
        if not isinstance(rationale, str):
            raise MalformedResponse(f"rows[{i}].rationale must be a string")
        cues = item.get("cues", [])
        if not isinstance(cues, list) or any(not isinstance(c, str) for c in cues):
            raise MalformedResponse(f"rows[{i}].cues must be an array of strings")

        row = ParsedRow(character=character, bits=tuple(bits),
                        rationale=rationale, cues=tuple(cues))
        if event_text is not None:
            spans, unmatched = resolve_cues(tuple(cues), event_text, event_start)
            row = replace(row, cue_spans=spans, unmatched_cues=unmatched)
        by_character[character] = row

    ordered = tuple(by_character[cid] for cid in roster_ids if cid in by_character)
    return ProviderResponse(raw=raw, rows=ordered)


def resolve_cues(phrases: tuple[str, ...], event_text: str,
                 event_start: int = 0) -> tuple[tuple[Span, ...], tuple[str, ...]]:
    """First-occurrence match of each phrase inside the event text."""
    spans: list[Span] = []
    unmatched: list[str] = []
    for phrase in phrases:
        index = event_text.find(phrase) if phrase else -1
        if index < 0:
            unmatched.append(phrase)
        else:
            spans.append(Span(event_start + index, event_start + index + len(phrase)))
    return tuple(spans), tuple(unmatched)


class Provider(Protocol):
    def complete(self, prompt: str) -> str: ...


@dataclass(frozen=True)
class ProviderConfig:
    kind: str = "mock"  # mock | http
    endpoint: str = ""
    model: str = ""
    api_key_env: str = DEFAULT_API_KEY_ENV
    max_retries: int = 2
    concurrency: int = 4
    timeout: float = 30.0
    mock_script: str | Path | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("mock", "http"):
            raise ValueError(f"unknown provider kind {self.kind!r}")
        if self.max_retries < 0:
            raise ValueError("max retries must be >= 0")
        if self.concurrency < 1:
            raise ValueError("concurrency limit must be >= 1")


class MockProvider:
    """Scripted provider: prompt fingerprints map to queues of canned responses.

    A list value is consumed one response per call (the last entry repeats
    once exhausted), which scripts failure-then-success retry scenarios.
    Optional per-fingerprint delays let tests permute completion order.
    """

    def __init__(self, script: dict[str, Any]):
        responses = script.get("responses", {})
        if not isinstance(responses, dict):
            raise PipelineError("mock script 'responses' must be an object")
        self._responses: dict[str, list[str]] = {}
        for fingerprint, value in responses.items():
            queue = [value] if isinstance(value, str) else list(value)
            if not queue or any(not isinstance(v, str) for v in queue):
                raise PipelineError(f"mock script entry {fingerprint!r} must be a "
                                    f"string or non-empty list of strings")
            self._responses[fingerprint] = queue
        self._delays: dict[str, float] = {
            k: float(v) / 1000.0 for k, v in script.get("delays_ms", {}).items()
        }
        self._default: str | None = script.get("default")
        self._cursor: dict[str, int] = {}
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path: str | Path) -> MockProvider:
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))

    def complete(self, prompt: str) -> str:
        fingerprint = prompt_fingerprint(prompt)
        with self._lock:
            queue = self._responses.get(fingerprint)
            if queue is None:
                if self._default is not None:
                    response = self._default
                else:
                    raise MockScriptMiss(fingerprint)
            else:
                index = self._cursor.get(fingerprint, 0)
                response = queue[min(index, len(queue) - 1)]
                self._cursor[fingerprint] = index + 1
            delay = self._delays.get(fingerprint, 0.0)
        if delay > 0.0:
            time.sleep(delay)
        return response


class HttpProvider:
    """Single-endpoint HTTP provider: POST {model, prompt} -> {text}."""

    def __init__(self, config: ProviderConfig, transport: httpx.BaseTransport | None = None):
        if not config.endpoint:
            raise PipelineError("http provider requires an endpoint")
        self._config = config
        headers = {}
        api_key = os.environ.get(config.api_key_env, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self._client = httpx.Client(timeout=config.timeout, headers=headers,
                                    transport=transport)

    def complete(self, prompt: str) -> str:
        try:
            response = self._client.post(
                self._config.endpoint,
                json={"model": self._config.model, "prompt": prompt},
            )
            response.raise_for_status()
            payload = response.json()
        except httpx.HTTPError as exc:
            raise ProviderError(f"provider request failed: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ProviderError(f"provider returned invalid JSON: {exc.msg}") from exc
        text = payload.get("text") if isinstance(payload, dict) else None
        if not isinstance(text, str):
            raise ProviderError("provider response is missing the 'text' field")
        return text


def make_provider(config: ProviderConfig,
                  transport: httpx.BaseTransport | None = None) -> Provider:
    if config.kind == "mock":
        if config.mock_script is None:
            raise PipelineError("mock provider requires a script file")
        return MockProvider.from_file(config.mock_script)
    return HttpProvider(config, transport=transport)


@dataclass(frozen=True)
class EventOutcome:
    scene_id: str
    event_id: str
    status: str  # ok | failed
    fingerprint: str
    retries: int = 0
    warnings: tuple[str, ...] = ()
    error: str | None = None


@dataclass(frozen=True)
class PipelineReport:
    story_id: str
    provider_kind: str
    model: str
    concurrency: int
    events: tuple[EventOutcome, ...]

    @property
    def failed(self) -> tuple[EventOutcome, ...]:
        return tuple(e for e in self.events if e.status == "failed")

    @property
    def ok(self) -> bool:
        return not self.failed

    def to_dict(self) -> dict[str, Any]:
        return {
            "story": self.story_id,
            "provider": self.provider_kind,
            "model": self.model,
            "concurrency": self.concurrency,
            "ok_events": sum(1 for e in self.events if e.status == "ok"),
            "failed_events": len(self.failed),
            "events": [
                {
                    "scene": e.scene_id,
                    "event": e.event_id,
                    "status": e.status,
                    "fingerprint": e.fingerprint,
                    "retries": e.retries,
                    "warnings": list(e.warnings),
                    "error": e.error,
                }
                for e in self.events
            ],
        }


def _summarize(text: str) -> str:
    squashed = " ".join(text.split())
    if len(squashed) <= _SUMMARY_LIMIT:
        return squashed
    return squashed[:_SUMMARY_LIMIT] + "..."


def build_request(doc: NarrativeDocument, scene: Scene, index: int,
                  template: PromptTemplate | None = None) -> AnnotationRequest:
    """Request for one event: event text plus scene title and neighbor summaries."""
    event = scene.events[index]
    before = scene.events[index - 1] if index > 0 else None
    after = scene.events[index + 1] if index + 1 < len(scene.events) else None
    context_lines = [f"Scene: {scene.title}"]
    context_lines.append(
        "Previous event: " + (_summarize(before.span.slice(doc.text))
                              if before else "(none; first event of the scene)"))
    context_lines.append(
        "Next event: " + (_summarize(after.span.slice(doc.text))
                          if after else "(none; last event of the scene)"))
    return AnnotationRequest(
        event_text=event.span.slice(doc.text),
        scene_context="\n".join(context_lines),
        roster=tuple((c.id, c.name) for c in doc.characters),
        instructions=template or PromptTemplate(),
    )


def _row_to_annotation(row: ParsedRow) -> Annotation:
    explanation = None
    if row.rationale or row.cue_spans or row.unmatched_cues:
        explanation = Explanation(rationale=row.rationale, cues=row.cue_spans,
                                  unmatched_cues=row.unmatched_cues)
    pov, internal, external, perceptual, ideological, psychological = row.bits
    return Annotation(character=row.character, pov=pov, internal=internal,
                      external=external, perceptual=perceptual,
                      ideological=ideological, psychological=psychological,
                      explanation=explanation)


def annotate_document(doc: NarrativeDocument, config: ProviderConfig,
                      provider: Provider | None = None,
                      template: PromptTemplate | None = None,
                      ) -> tuple[NarrativeDocument, PipelineReport]:
    """Label every event through the provider, bounded-parallel across events.

    Failed events (retries exhausted) keep their existing annotations and are
    listed in the report; the document is returned either way. Results are
    assembled in document order, so output never depends on completion order.
    """
    provider = provider or make_provider(config)

    jobs: list[tuple[Scene, int, str]] = []  # (scene, event index, prompt)
    for scene in doc.scenes:
        for index in range(len(scene.events)):
            request = build_request(doc, scene, index, template)
            jobs.append((scene, index, build_prompt(request)))

    def run(job: tuple[Scene, int, str]) -> tuple[tuple[ParsedRow, ...] | None, EventOutcome]:
        scene, index, prompt = job
        event = scene.events[index]
        fingerprint = prompt_fingerprint(prompt)
        retries = 0
        error: str | None = None
        for attempt in range(config.max_retries + 1):
            try:
                raw = provider.complete(prompt)
                response = parse_response(raw, tuple((c.id, c.name) for c in doc.characters),
                                          event_text=event.span.slice(doc.text),
                                          event_start=event.span.start)
            except MalformedResponse as exc:
                error = str(exc)
                if attempt < config.max_retries:
                    retries += 1
                    continue
                break
            except ProviderError as exc:
                error = str(exc)
                if exc.retryable and attempt < config.max_retries:
                    retries += 1
                    continue
                break
            warnings = tuple(
                f"cue {phrase!r} for {row.character!r} not found in event text"
                for row in response.rows for phrase in row.unmatched_cues
            )
            outcome = EventOutcome(scene.id, event.id, "ok", fingerprint,
                                   retries=retries, warnings=warnings)
            return response.rows, outcome
        outcome = EventOutcome(scene.id, event.id, "failed", fingerprint,
                               retries=retries, error=error)
        return None, outcome

    with ThreadPoolExecutor(max_workers=config.concurrency) as pool:
        results = list(pool.map(run, jobs))

    outcomes = [outcome for _, outcome in results]
    rows_by_event = {outcome.event_id: rows for (rows, outcome) in results if rows is not None}

    new_scenes = []
    for scene in doc.scenes:
        new_events = []
        for event in scene.events:
            rows = rows_by_event.get(event.id)
            if rows is None:
                new_events.append(event)
            else:
                annotations = tuple(_row_to_annotation(row) for row in rows)
                new_events.append(replace(event, annotations=annotations))
        new_scenes.append(replace(scene, events=tuple(new_events)))

    annotated = replace(doc, scenes=tuple(new_scenes))
    report = PipelineReport(
        story_id=doc.id,
        provider_kind=config.kind,
        model=config.model,
        concurrency=config.concurrency,
        events=tuple(outcomes),
    )
    return annotated, report
