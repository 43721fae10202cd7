#!/usr/bin/env python3
"""Regenerate every checked-in fixture under fixtures/.

Everything here is deterministic: story files are canonical serializations
of documents constructed in code, the mock provider script is derived from
the gold annotations, and golden outputs are produced by the library
itself. Run from the repository root after intentional format changes:

    python3 scripts/make_fixtures.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from focalviz.layout import View  # noqa: E402
from focalviz.model import (  # noqa: E402
    Annotation,
    Character,
    Event,
    Explanation,
    LABELS,
    NarrativeDocument,
    Scene,
    Span,
    validate,
)
from focalviz.pipeline import (  # noqa: E402
    ProviderConfig,
    annotate_document,
    build_prompt,
    build_request,
    prompt_fingerprint,
)
from focalviz.render import render_story  # noqa: E402
from focalviz.store import parse, serialize_canonical  # noqa: E402

FIX = ROOT / "fixtures"


# ---------------------------------------------------------------------------
# Sample story 1: excerpt from The Yellow Wallpaper (Gilman, 1892; public
# domain). Two scenes, four events, two characters. Gold labels are this
# repository's own annotations.

WP_PARAS = [
    "It is very seldom that mere ordinary people like John and myself secure "
    "ancestral halls for the summer. A colonial mansion, a hereditary estate, "
    "I would say a haunted house, and reach the height of romantic "
    "felicity—but that would be asking too much of fate! Still I will "
    "proudly declare that there is something queer about it. Else, why should "
    "it be let so cheaply? And why have stood so long untenanted?",

    "John laughs at me, of course, but one expects that in marriage. John is "
    "practical in the extreme. He has no patience with faith, an intense "
    "horror of superstition, and he scoffs openly at any talk of things not "
    "to be felt and seen and put down in figures.",

    "John is a physician, and perhaps—(I would not say it to a living "
    "soul, of course, but this is dead paper and a great relief to my mind)"
    "—perhaps that is one reason I do not get well faster. You see, he "
    "does not believe I am sick!",

    "And what can one do? If a physician of high standing, and one's own "
    "husband, assures friends and relatives that there is really nothing the "
    "matter with one but temporary nervous depression—a slight "
    "hysterical tendency—what is one to do?",
]

# (event key, character, bits in canonical label order, rationale, cue phrases)
WP_GOLD = [
    ("s1e1", "narrator", (1, 1, 0, 1, 1, 1),
     "First-person narration; the house is judged through her own fancies and standards.",
     ["I would say a haunted house", "proudly declare"]),
    ("s1e1", "john", (0, 0, 1, 0, 0, 0),
     "John is named only as a fellow tenant; nothing of his view is given.",
     ["John and myself"]),
    ("s2e1", "narrator", (1, 1, 0, 0, 0, 1),
     "She reads John's laughter through her own resigned expectation of marriage.",
     ["one expects that in marriage"]),
    ("s2e1", "john", (0, 0, 1, 1, 1, 0),
     "John appears through outward behavior; his practicality is a norm the narrator reports.",
     ["John laughs at me", "scoffs openly"]),
    ("s2e2", "narrator", (1, 1, 0, 0, 0, 1), "", []),
    ("s2e2", "john", (0, 1, 1, 0, 1, 1),
     "His disbelief is stated as fact, giving indirect access to his judgment "
     "while he is seen from outside.",
     ["he does not believe I am sick"]),
    ("s2e3", "narrator", (1, 1, 0, 0, 1, 1),
     "Her helplessness is framed against the authority of physician and husband.",
     ["what is one to do?"]),
    ("s2e3", "john", (0, 0, 1, 0, 1, 0),
     "The husband's professional assurance is reported as social authority, "
     "not as his inner view.",
     ["assures friends and relatives"]),
]


def _annotation(event_text: str, event_start: int, character: str, bits, rationale,
                phrases) -> Annotation:
    cues = []
    for phrase in phrases:
        index = event_text.find(phrase)
        assert index >= 0, f"cue {phrase!r} not in event text"
        cues.append(Span(event_start + index, event_start + index + len(phrase)))
    explanation = None
    if rationale or cues:
        explanation = Explanation(rationale=rationale, cues=tuple(cues))
    pov, internal, external, perceptual, ideological, psychological = bits
    return Annotation(character=character, pov=pov, internal=internal, external=external,
                      perceptual=perceptual, ideological=ideological,
                      psychological=psychological, explanation=explanation)


def build_wallpaper() -> NarrativeDocument:
    text = "\n\n".join(WP_PARAS)
    starts = []
    cursor = 0
    for para in WP_PARAS:
        starts.append(cursor)
        cursor += len(para) + 2
    spans = {
        "s1e1": Span(starts[0], starts[0] + len(WP_PARAS[0])),
        "s2e1": Span(starts[1], starts[1] + len(WP_PARAS[1])),
        "s2e2": Span(starts[2], starts[2] + len(WP_PARAS[2])),
        "s2e3": Span(starts[3], starts[3] + len(WP_PARAS[3])),
    }

    annotations: dict[str, list[Annotation]] = {k: [] for k in spans}
    for event_id, character, bits, rationale, phrases in WP_GOLD:
        span = spans[event_id]
        annotations[event_id].append(
            _annotation(span.slice(text), span.start, character, bits, rationale, phrases))

    events = {
        eid: Event(id=eid, span=spans[eid], annotations=tuple(annotations[eid]))
        for eid in spans
    }
    return NarrativeDocument(
        id="yellow-wallpaper",
        title="The Yellow Wallpaper (excerpt)",
        author="Charlotte Perkins Gilman",
        text=text,
        characters=(Character("narrator", "The Narrator"), Character("john", "John")),
        scenes=(
            Scene("s1", "The Colonial Mansion", Span(0, spans["s1e1"].end),
                  (events["s1e1"],)),
            Scene("s2", "John the Physician", Span(spans["s2e1"].start, len(text)),
                  (events["s2e1"], events["s2e2"], events["s2e3"])),
        ),
    )


# ---------------------------------------------------------------------------
# Sample story 2: excerpt from The Open Boat (Crane, 1898; public domain).

OB_PARAS = [
    "None of them knew the color of the sky. Their eyes glanced level, and "
    "were fastened upon the waves that swept toward them. These waves were "
    "of the hue of slate, save for the tops, which were of foaming white, "
    "and all of the men knew the colors of the sea.",

    "Many a man ought to have a bath-tub larger than the boat which here "
    "rode upon the sea. These waves were most wrongfully and barbarously "
    "abrupt and tall, and each froth-top was a problem in small boat "
    "navigation. The cook squatted in the bottom and looked with both eyes "
    "at the six inches of gunwale which separated him from the ocean.",
]

OB_GOLD = [
    ("b1e1", "crew", (0, 1, 0, 1, 0, 0),
     "The limit of what the men can see is given from their own position.",
     ["None of them knew the color of the sky"]),
    ("b1e2", "cook", (0, 0, 1, 1, 0, 0),
     "Only posture and directed gaze are reported; his mind stays closed.",
     ["The cook squatted in the bottom"]),
]


def build_open_boat() -> NarrativeDocument:
    text = "\n\n".join(OB_PARAS)
    e1_span = Span(0, len(OB_PARAS[0]))
    e2_span = Span(len(OB_PARAS[0]) + 2, len(text))
    spans = {"b1e1": e1_span, "b1e2": e2_span}

    annotations: dict[str, list[Annotation]] = {k: [] for k in spans}
    for event_id, character, bits, rationale, phrases in OB_GOLD:
        span = spans[event_id]
        annotations[event_id].append(
            _annotation(span.slice(text), span.start, character, bits, rationale, phrases))

    return NarrativeDocument(
        id="open-boat",
        title="The Open Boat (excerpt)",
        author="Stephen Crane",
        text=text,
        characters=(Character("crew", "The Crew"), Character("cook", "The Cook"),
                    Character("captain", "The Captain")),
        scenes=(
            Scene("b1", "Dawn on the Sea", Span(0, len(text)),
                  (Event("b1e1", e1_span, annotations=tuple(annotations["b1e1"])),
                   Event("b1e2", e2_span, annotations=tuple(annotations["b1e2"])))),
        ),
    )


# ---------------------------------------------------------------------------


def strip_annotations(doc: NarrativeDocument) -> NarrativeDocument:
    from dataclasses import replace

    scenes = tuple(
        replace(scene, events=tuple(replace(e, annotations=()) for e in scene.events))
        for scene in doc.scenes
    )
    return replace(doc, scenes=scenes)


def build_mock_script(doc: NarrativeDocument) -> dict:
    """Map each event's prompt fingerprint to a response matching the gold rows."""
    bare = strip_annotations(doc)
    responses = {}
    for scene in bare.scenes:
        for index, event in enumerate(scene.events):
            gold_scene = doc.scene_by_id(scene.id)
            gold_event = gold_scene.events[index]
            rows = []
            for ann in gold_event.annotations:
                row = {"character": ann.character}
                row.update(dict(zip(LABELS, ann.bits())))
                exp = ann.explanation
                row["rationale"] = exp.rationale if exp else ""
                row["cues"] = ([c.slice(doc.text) for c in exp.cues] if exp else [])
                rows.append(row)
            prompt = build_prompt(build_request(bare, scene, index))
            responses[prompt_fingerprint(prompt)] = json.dumps({"rows": rows})
    return {"responses": responses}


def derived_label_tables() -> tuple[dict, dict]:
    """Two-row tables whose metrics are pinned by the brute-force oracle."""
    keys = [("s1", "s1e1", "narrator"), ("s1", "s1e1", "john")]
    gold_bits = [(1, 1, 0, 1, 0, 1), (0, 0, 1, 0, 1, 0)]
    pred_bits = [(1, 0, 0, 1, 0, 1), (0, 0, 1, 1, 1, 0)]

    def table(bit_rows):
        rows = []
        for (scene, event, character), bits in zip(keys, bit_rows):
            row = {"scene": scene, "event": event, "character": character}
            row.update(dict(zip(LABELS, bits)))
            rows.append(row)
        return {"rows": rows}

    return table(gold_bits), table(pred_bits)


def glyph_conformance_cases() -> dict:
    """Expected fill tokens for all 64 bit vectors, straight from the encoding rules."""
    cases = []
    for n in range(64):
        bits = [(n >> (5 - i)) & 1 for i in range(6)]
        pov, internal, external, perceptual, ideological, psychological = bits
        if internal and external:
            ring = "split"
        elif internal:
            ring = "internal"
        elif external:
            ring = "external"
        else:
            ring = "empty"
        cases.append({
            "bits": bits,
            "center": "pov" if pov else "empty",
            "type": ring,
            "facets": {
                "perceptual": "present" if perceptual else "absent",
                "ideological": "present" if ideological else "absent",
                "psychological": "present" if psychological else "absent",
            },
        })
    return {"labels": list(LABELS), "cases": cases}


def make_invalid_fixtures(gold_bytes: bytes, out_dir: Path) -> None:
    base = json.loads(gold_bytes.decode("utf-8"))

    # Pull the second event's start back across the first event's end; its
    # own cues stay inside the widened span, so exactly one violation fires.
    overlap = json.loads(gold_bytes.decode("utf-8"))
    events = overlap["scenes"][1]["events"]
    events[1]["span"] = [events[0]["span"][1] - 10, events[1]["span"][1]]
    _dump(out_dir / "overlap.focal.json", overlap)

    dangling = json.loads(gold_bytes.decode("utf-8"))
    dangling["scenes"][0]["events"][0]["annotations"][0]["character"] = "ghost"
    _dump(out_dir / "dangling.focal.json", dangling)

    badbit = json.loads(gold_bytes.decode("utf-8"))
    badbit["scenes"][0]["events"][0]["annotations"][0]["pov"] = 2
    _dump(out_dir / "badbit.focal.json", badbit)

    cue_outside = json.loads(gold_bytes.decode("utf-8"))
    event = cue_outside["scenes"][0]["events"][0]
    event["annotations"][0]["explanation"]["cues"] = [[event["span"][1], event["span"][1] + 40]]
    _dump(out_dir / "cue_outside.focal.json", cue_outside)

    version = dict(base)
    version["schema_version"] = "9.9"
    _dump(out_dir / "version.focal.json", version)

    (out_dir / "syntax.focal.json").write_text('{"schema_version": "1.0", "id": "tru',
                                               encoding="utf-8")


def _dump(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, ensure_ascii=False, indent=2) + "\n",
                    encoding="utf-8")


def main() -> None:
    for sub in ("stories", "unannotated", "mock_scripts", "labels", "invalid", "golden"):
        (FIX / sub).mkdir(parents=True, exist_ok=True)

    wallpaper = build_wallpaper()
    open_boat = build_open_boat()
    for doc in (wallpaper, open_boat):
        report = validate(doc, strict=True)
        assert report.ok and not report.warnings, report.lines()
        data = serialize_canonical(doc)
        assert parse(data) == doc
        (FIX / "stories" / f"{doc.id}.focal.json").write_bytes(data)

    bare = strip_annotations(wallpaper)
    (FIX / "unannotated" / "yellow-wallpaper.focal.json").write_bytes(
        serialize_canonical(bare))

    script = build_mock_script(wallpaper)
    _dump(FIX / "mock_scripts" / "yellow-wallpaper.json", script)

    config = ProviderConfig(kind="mock",
                            mock_script=FIX / "mock_scripts" / "yellow-wallpaper.json")
    annotated, report = annotate_document(bare, config)
    assert report.ok, report.to_dict()
    assert serialize_canonical(annotated) == serialize_canonical(wallpaper), \
        "mock pipeline does not reproduce the gold document"

    gold_table, pred_table = derived_label_tables()
    _dump(FIX / "labels" / "derived_gold.labels.json", gold_table)
    _dump(FIX / "labels" / "derived_pred.labels.json", pred_table)

    _dump(FIX / "glyph_conformance.json", glyph_conformance_cases())

    make_invalid_fixtures(serialize_canonical(wallpaper), FIX / "invalid")

    svg = render_story(wallpaper, View("overview"))
    (FIX / "golden" / "yellow-wallpaper.overview.svg").write_bytes(svg.to_bytes())

    print(f"fixtures written under {FIX}")


if __name__ == "__main__":
    main()
