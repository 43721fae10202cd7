"""Test-only helpers: the brute-force metrics oracle and a random document
generator. The oracle deliberately re-derives every number from scratch so
it stays independent of the implementation under test."""

from __future__ import annotations

import random
import string

from focalviz.model import (
    Annotation,
    Character,
    Event,
    Explanation,
    LABELS,
    NarrativeDocument,
    Scene,
    Span,
)


def oracle_eval(gold_rows: list[tuple[int, ...]], pred_rows: list[tuple[int, ...]]) -> dict:
    """Per-cell confusion tally over six label columns, formulas applied longhand."""
    n = len(gold_rows)
    assert n > 0 and len(pred_rows) == n
    per_label: dict[str, dict[str, float]] = {}
    pooled_tp = pooled_fp = pooled_fn = 0
    f1_values = []
    for col, label in enumerate(LABELS):
        tp = fp = fn = tn = 0
        for g, p in zip(gold_rows, pred_rows):
            if g[col] == 1:
                if p[col] == 1:
                    tp += 1
                else:
                    fn += 1
            else:
                if p[col] == 1:
                    fp += 1
                else:
                    tn += 1
        precision = tp / (tp + fp) if (tp + fp) > 0 else 0.0
        recall = tp / (tp + fn) if (tp + fn) > 0 else 0.0
        f1 = (2 * precision * recall / (precision + recall)) if (precision + recall) > 0 else 0.0
        per_label[label] = {
            "accuracy": (tp + tn) / n,
            "precision": precision,
            "recall": recall,
            "f1": f1,
        }
        f1_values.append(f1)
        pooled_tp += tp
        pooled_fp += fp
        pooled_fn += fn

    micro_p = pooled_tp / (pooled_tp + pooled_fp) if (pooled_tp + pooled_fp) > 0 else 0.0
    micro_r = pooled_tp / (pooled_tp + pooled_fn) if (pooled_tp + pooled_fn) > 0 else 0.0
    micro_f1 = (2 * micro_p * micro_r / (micro_p + micro_r)) if (micro_p + micro_r) > 0 else 0.0
    exact = sum(1 for g, p in zip(gold_rows, pred_rows) if tuple(g) == tuple(p)) / n
    return {
        "per_label": per_label,
        "micro_f1": micro_f1,
        "macro_f1": sum(f1_values) / len(LABELS),
        "exact_row_match": exact,
    }


def random_bits(rng: random.Random) -> tuple[int, ...]:
    return tuple(rng.randint(0, 1) for _ in LABELS)


def random_document(rng: random.Random, min_scenes: int = 1, max_scenes: int = 6,
                    allow_empty_scenes: bool = False) -> NarrativeDocument:
    """A structurally valid document with randomized segmentation and labels."""
    n_chars = rng.randint(1, 5)
    characters = tuple(Character(f"c{i}", f"Person {i}é") for i in range(n_chars))

    pieces: list[str] = []
    cursor = 0
    scenes: list[Scene] = []
    event_counter = 0
    for si in range(rng.randint(min_scenes, max_scenes)):
        scene_start = cursor
        events: list[Event] = []
        n_events = rng.randint(0 if allow_empty_scenes else 1, 5)
        for _ in range(n_events):
            if rng.random() < 0.3:
                gap = " " * rng.randint(1, 4)
                pieces.append(gap)
                cursor += len(gap)
            length = rng.randint(20, 80)
            body = "".join(rng.choice(string.ascii_lowercase + " —ü")
                           for _ in range(length))
            pieces.append(body)
            span = Span(cursor, cursor + length)
            cursor += length
            annotations = []
            for character in rng.sample(characters, rng.randint(0, n_chars)):
                explanation = None
                if rng.random() < 0.5:
                    cue_start = rng.randint(span.start, span.end - 1)
                    cue_end = rng.randint(cue_start + 1, span.end)
                    explanation = Explanation(
                        rationale=f"reason {rng.randint(0, 999)}",
                        cues=(Span(cue_start, cue_end),),
                        unmatched_cues=("missing phrase",) if rng.random() < 0.2 else (),
                    )
                bits = random_bits(rng)
                annotations.append(Annotation(character.id, *bits, explanation=explanation))
            event_counter += 1
            events.append(Event(f"e{event_counter}", span,
                                location=f"loc{si}" if rng.random() < 0.3 else None,
                                annotations=tuple(annotations)))
        scene_end = cursor
        scenes.append(Scene(f"s{si}", f"Scene {si} – t", Span(scene_start, scene_end),
                            tuple(events)))
        pieces.append("\n\n")
        cursor += 2

    return NarrativeDocument(
        id=f"doc-{rng.randint(0, 10**6)}",
        title="Random Document",
        author="Fuzz" if rng.random() < 0.5 else None,
        text="".join(pieces),
        characters=characters,
        scenes=tuple(scenes),
    )
