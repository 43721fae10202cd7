from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from focalviz.model import (
    Annotation,
    Character,
    Event,
    Explanation,
    NarrativeDocument,
    Scene,
    Span,
    active_characters,
    row_key,
    validate,
)

from helpers import random_document


def _doc(scenes, characters=(Character("narrator", "The Narrator"),), text_len=100):
    return NarrativeDocument(id="d", title="T", text="x" * text_len,
                             characters=tuple(characters), scenes=tuple(scenes))


def _ann(character="narrator", **bits):
    values = dict(pov=0, internal=0, external=0, perceptual=0, ideological=0,
                  psychological=0)
    values.update(bits)
    return Annotation(character=character, **values)


class TestSpan:
    def test_rejects_inverted(self):
        with pytest.raises(ValueError):
            Span(5, 4)

    def test_contains_and_overlaps(self):
        outer = Span(0, 50)
        assert outer.contains(Span(0, 50))
        assert outer.contains(Span(10, 20))
        assert not outer.contains(Span(40, 51))
        assert Span(0, 50).overlaps(Span(40, 90))
        assert not Span(0, 50).overlaps(Span(50, 90))  # half-open: touching is fine


class TestValidate:
    def test_minimal_document_is_clean(self):
        doc = _doc([Scene("s1", "One", Span(0, 50),
                          (Event("e1", Span(0, 50), annotations=(_ann(pov=1),)),))])
        report = validate(doc)
        assert report.ok and not report.warnings

    def test_overlapping_events_flagged_at_second_event(self):
        doc = _doc([Scene("s1", "One", Span(0, 100),
                          (Event("e1", Span(0, 50)), Event("e2", Span(40, 90))))])
        report = validate(doc)
        assert len(report.violations) == 1
        assert report.violations[0].path == "scenes[0].events[1].span"
        assert "overlap" in report.violations[0].message

    def test_overlap_with_earlier_non_adjacent_event(self):
        # Ordered by start, but the third event lands inside the first.
        doc = _doc([Scene("s1", "One", Span(0, 100),
                          (Event("e1", Span(0, 60)), Event("e2", Span(10, 20)),
                           Event("e3", Span(30, 40))))])
        report = validate(doc)
        paths = [v.path for v in report.violations if "overlap" in v.message]
        assert paths == ["scenes[0].events[1].span", "scenes[0].events[2].span"]

    def test_dangling_character_reference(self):
        doc = _doc([Scene("s1", "One", Span(0, 50),
                          (Event("e1", Span(0, 50), annotations=(_ann("ghost"),)),))])
        report = validate(doc)
        assert len(report.violations) == 1
        assert "ghost" in report.violations[0].message
        assert report.violations[0].path.endswith("annotations[0].character")

    def test_scene_span_outside_text(self):
        doc = _doc([Scene("s1", "One", Span(0, 200))], text_len=100)
        assert any(v.path == "scenes[0].span" for v in validate(doc).violations)

    def test_scenes_out_of_order(self):
        doc = _doc([Scene("s1", "A", Span(50, 80)), Scene("s2", "B", Span(0, 40))])
        assert any("ordered" in v.message for v in validate(doc).violations)

    def test_event_outside_scene(self):
        doc = _doc([Scene("s1", "One", Span(0, 50), (Event("e1", Span(40, 60)),))])
        assert any("not contained" in v.message for v in validate(doc).violations)

    def test_out_of_range_bit(self):
        doc = _doc([Scene("s1", "One", Span(0, 50),
                          (Event("e1", Span(0, 50), annotations=(_ann(pov=2),)),))])
        report = validate(doc)
        assert len(report.violations) == 1
        assert report.violations[0].path.endswith(".pov")

    def test_cue_outside_event(self):
        exp = Explanation("r", cues=(Span(60, 70),))
        ann = Annotation("narrator", 1, 1, 0, 0, 0, 0, explanation=exp)
        doc = _doc([Scene("s1", "One", Span(0, 100),
                          (Event("e1", Span(0, 50), annotations=(ann,)),))])
        report = validate(doc)
        assert len(report.violations) == 1
        assert "cues[0]" in report.violations[0].path

    def test_duplicate_annotation_for_character(self):
        doc = _doc([Scene("s1", "One", Span(0, 50),
                          (Event("e1", Span(0, 50), annotations=(_ann(), _ann())),))])
        assert any("more than once" in v.message for v in validate(doc).violations)

    def test_duplicate_character_ids(self):
        doc = _doc([Scene("s1", "One", Span(0, 50), (Event("e1", Span(0, 50)),))],
                   characters=(Character("a", "A"), Character("a", "B")))
        assert any("duplicate character id" in v.message for v in validate(doc).violations)

    def test_no_scenes(self):
        doc = _doc([])
        assert any(v.path == "scenes" for v in validate(doc).violations)

    def test_zero_event_scene_only_strict(self):
        doc = _doc([Scene("s1", "One", Span(0, 50))])
        assert validate(doc).ok
        assert not validate(doc, strict=True).ok

    def test_zero_annotation_event_only_strict(self):
        doc = _doc([Scene("s1", "One", Span(0, 50), (Event("e1", Span(0, 50)),))])
        assert validate(doc).ok
        assert not validate(doc, strict=True).ok

    def test_facet_without_type_only_strict(self):
        doc = _doc([Scene("s1", "One", Span(0, 50),
                          (Event("e1", Span(0, 50),
                                 annotations=(_ann(perceptual=1),)),))])
        assert validate(doc).ok
        report = validate(doc, strict=True)
        assert any("facet" in v.message for v in report.violations)

    def test_multi_pov_is_strict_warning_not_violation(self):
        anns = (_ann("a", pov=1, internal=1), _ann("b", pov=1, internal=1))
        doc = _doc([Scene("s1", "One", Span(0, 50),
                          (Event("e1", Span(0, 50), annotations=anns),))],
                   characters=(Character("a", "A"), Character("b", "B")))
        strict = validate(doc, strict=True)
        assert strict.ok
        assert len(strict.warnings) == 1
        assert not validate(doc).warnings

    def test_all_zero_annotation_is_allowed(self):
        doc = _doc([Scene("s1", "One", Span(0, 50),
                          (Event("e1", Span(0, 50), annotations=(_ann(),)),))])
        assert validate(doc, strict=True).ok

    @given(st.integers(0, 10**6))
    def test_idempotent_and_clean_on_random_documents(self, seed):
        doc = random_document(random.Random(seed), allow_empty_scenes=True)
        first = validate(doc)
        assert first == validate(doc)
        assert first.ok


class TestActiveCharacters:
    def test_single(self, wallpaper):
        assert active_characters(wallpaper.scenes[0]) == ["narrator", "john"]

    def test_first_appearance_order(self):
        events = (
            Event("e1", Span(0, 10), annotations=(_ann("a"),)),
            Event("e2", Span(10, 20), annotations=(_ann("b"), _ann("a"))),
        )
        scene = Scene("s1", "One", Span(0, 20), events)
        assert active_characters(scene) == ["a", "b"]

    def test_empty_scene(self):
        assert active_characters(Scene("s1", "One", Span(0, 10))) == []

    @given(st.integers(0, 10**6))
    def test_subset_of_roster_without_duplicates(self, seed):
        doc = random_document(random.Random(seed))
        roster = set(doc.character_ids())
        for scene in doc.scenes:
            active = active_characters(scene)
            assert len(active) == len(set(active))
            assert set(active) <= roster


class TestRowKey:
    def test_equality(self):
        assert row_key("s1", "s1e1", "narrator") == row_key("s1", "s1e1", "narrator")

    def test_character_distinguishes(self):
        assert row_key("s1", "s1e1", "a") != row_key("s1", "s1e1", "b")

    def test_empty_component_rejected(self):
        with pytest.raises(ValueError):
            row_key("s1", "", "a")

    def test_sort_is_stable(self):
        keys = [row_key("s2", "e9", "b"), row_key("s1", "e2", "z"), row_key("s1", "e2", "a")]
        assert sorted(keys) == sorted(list(reversed(keys)))


class TestInvariants:
    @given(st.integers(0, 10**6))
    def test_event_spans_always_inside_scene(self, seed):
        doc = random_document(random.Random(seed))
        for scene in doc.scenes:
            for event in scene.events:
                assert scene.span.contains(event.span)
