from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from focalviz.store import (
    CatalogError,
    ParseError,
    UnknownKeyWarning,
    VersionError,
    load_story,
    parse,
    scan_catalog,
    serialize_canonical,
)

from helpers import random_document

MINIMAL = {
    "schema_version": "1.0",
    "id": "mini",
    "title": "Minimal",
    "text": "Once upon a time there was a narrator.",
    "characters": [{"id": "narrator", "name": "The Narrator"}],
    "scenes": [
        {
            "id": "s1",
            "title": "Only Scene",
            "span": [0, 38],
            "events": [
                {
                    "id": "e1",
                    "span": [0, 38],
                    "annotations": [
                        {
                            "character": "narrator",
                            "pov": 1,
                            "internal": 1,
                            "external": 0,
                            "perceptual": 0,
                            "ideological": 0,
                            "psychological": 1,
                            "explanation": {"rationale": "why", "cues": [[0, 4]]},
                        }
                    ],
                }
            ],
        }
    ],
}


def _bytes(payload) -> bytes:
    return json.dumps(payload).encode("utf-8")


class TestParse:
    def test_minimal_fixture(self):
        doc = parse(_bytes(MINIMAL))
        assert doc.id == "mini"
        assert doc.author is None
        assert doc.scenes[0].events[0].annotations[0].pov == 1
        assert doc.scenes[0].events[0].annotations[0].explanation.rationale == "why"

    def test_unknown_schema_version(self):
        bad = dict(MINIMAL, schema_version="9.9")
        with pytest.raises(VersionError):
            parse(_bytes(bad))

    def test_truncated_input_has_position(self):
        data = _bytes(MINIMAL)[:40]
        with pytest.raises(ParseError) as exc_info:
            parse(data)
        assert exc_info.value.line is not None

    def test_bad_utf8(self):
        with pytest.raises(ParseError):
            parse(b"\xff\xfe{}")

    def test_bom_rejected(self):
        with pytest.raises(ParseError, match="BOM"):
            parse(b"\xef\xbb\xbf" + _bytes(MINIMAL))

    def test_missing_field_names_path(self):
        bad = json.loads(json.dumps(MINIMAL))
        del bad["scenes"][0]["events"][0]["span"]
        with pytest.raises(ParseError, match=r"scenes\[0\].events\[0\].span"):
            parse(_bytes(bad))

    def test_wrong_type_rejected(self):
        bad = json.loads(json.dumps(MINIMAL))
        bad["scenes"][0]["events"][0]["annotations"][0]["pov"] = "1"
        with pytest.raises(ParseError, match="expected int"):
            parse(_bytes(bad))

    def test_semantically_invalid_bits_parse_fine(self):
        # Parsing checks structure only; validate() owns value ranges.
        bad = json.loads(json.dumps(MINIMAL))
        bad["scenes"][0]["events"][0]["annotations"][0]["pov"] = 7
        assert parse(_bytes(bad)).scenes[0].events[0].annotations[0].pov == 7

    def test_unknown_top_level_key_warns_and_preserves(self):
        extra = dict(MINIMAL, commentary="hand-added note")
        with pytest.warns(UnknownKeyWarning):
            doc = parse(_bytes(extra))
        assert doc.extras == {"commentary": "hand-added note"}
        round_tripped = json.loads(serialize_canonical(doc))
        assert round_tripped["commentary"] == "hand-added note"

    def test_unknown_top_level_key_rejected_in_strict(self):
        extra = dict(MINIMAL, commentary="note")
        with pytest.raises(ParseError, match="commentary"):
            parse(_bytes(extra), strict=True)

    def test_unknown_nested_key_rejected_in_strict(self):
        bad = json.loads(json.dumps(MINIMAL))
        bad["scenes"][0]["mood"] = "gloomy"
        with pytest.raises(ParseError, match="mood"):
            parse(_bytes(bad), strict=True)


class TestSerializeCanonical:
    def test_round_trip_bytes_fixed_point(self, wallpaper):
        first = serialize_canonical(wallpaper)
        again = serialize_canonical(parse(first))
        assert first == again

    def test_structurally_equal_docs_serialize_identically(self, wallpaper):
        clone = parse(serialize_canonical(wallpaper))
        assert clone == wallpaper
        assert serialize_canonical(clone) == serialize_canonical(wallpaper)

    def test_key_reordering_is_normalized(self):
        reordered = {k: MINIMAL[k] for k in reversed(list(MINIMAL))}
        assert serialize_canonical(parse(_bytes(reordered))) == \
            serialize_canonical(parse(_bytes(MINIMAL)))

    def test_newline_terminated_utf8_no_bom(self, wallpaper):
        data = serialize_canonical(wallpaper)
        assert data.endswith(b"\n")
        assert not data.startswith(b"\xef\xbb\xbf")
        data.decode("utf-8")

    @settings(max_examples=40)
    @given(st.integers(0, 10**6))
    def test_round_trip_identity_on_random_documents(self, seed):
        doc = random_document(random.Random(seed), allow_empty_scenes=True)
        assert parse(serialize_canonical(doc)) == doc


class TestCatalog:
    def test_scan_sorted_by_id(self, stories_dir):
        catalog = scan_catalog(stories_dir)
        assert catalog.ids() == ("open-boat", "yellow-wallpaper")
        assert not catalog.skipped

    def test_invalid_files_skipped_with_reason(self, tmp_path, stories_dir):
        target = tmp_path / "stories"
        target.mkdir()
        for path in stories_dir.iterdir():
            (target / path.name).write_bytes(path.read_bytes())
        (target / "broken.focal.json").write_text("{nope", encoding="utf-8")
        (target / "notes.txt").write_text("ignored", encoding="utf-8")
        catalog = scan_catalog(target)
        assert catalog.ids() == ("open-boat", "yellow-wallpaper")
        assert len(catalog.skipped) == 1
        assert catalog.skipped[0].path.name == "broken.focal.json"

    def test_duplicate_ids_error_names_both_paths(self, tmp_path, stories_dir):
        target = tmp_path / "stories"
        target.mkdir()
        source = stories_dir / "open-boat.focal.json"
        (target / "a.focal.json").write_bytes(source.read_bytes())
        (target / "b.focal.json").write_bytes(source.read_bytes())
        with pytest.raises(CatalogError) as exc_info:
            scan_catalog(target)
        assert "a.focal.json" in str(exc_info.value)
        assert "b.focal.json" in str(exc_info.value)

    def test_empty_directory(self, tmp_path):
        catalog = scan_catalog(tmp_path)
        assert catalog.entries == ()

    def test_missing_directory(self, tmp_path):
        with pytest.raises(CatalogError):
            scan_catalog(tmp_path / "nope")

    def test_validation_failures_are_skipped(self, tmp_path, fixtures_dir):
        target = tmp_path / "stories"
        target.mkdir()
        source = fixtures_dir / "invalid" / "overlap.focal.json"
        (target / "overlap.focal.json").write_bytes(source.read_bytes())
        catalog = scan_catalog(target)
        assert catalog.entries == ()
        assert "invalid" in catalog.skipped[0].reason


class TestLoadStory:
    def test_loads_fixture(self, stories_dir):
        doc = load_story(stories_dir / "yellow-wallpaper.focal.json")
        assert doc.id == "yellow-wallpaper"
        assert len(doc.scenes) == 2
        assert sum(len(s.events) for s in doc.scenes) == 4
        assert len(doc.characters) == 2
