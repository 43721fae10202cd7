from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from focalviz.layout import (
    CardTooWide,
    LayoutConfig,
    LayoutError,
    UnknownViewTarget,
    View,
    build_layout,
    card_dimensions,
    flow_cards,
    layout_to_dict,
    scene_card,
)
from focalviz.model import active_characters

from helpers import random_document

DEFAULTS = LayoutConfig()


def _clamp_oracle(n_events, n_characters, cfg):
    """Straight transcription of the dimension formula, kept dumb on purpose."""
    plot_w = cfg.event_spacing * (n_events - 1)
    plot_h = cfg.character_spacing * (n_characters - 1)
    card_w = cfg.label_width + plot_w + cfg.padding
    card_h = cfg.title_height + plot_h + cfg.padding
    return (plot_w, plot_h,
            max(card_w, cfg.min_card_width), max(card_h, cfg.min_card_height))


class TestCardDimensions:
    def test_single_cell_clamps_to_minimum(self):
        assert card_dimensions(1, 1) == (0, 0, 188, 160)

    def test_four_by_three_with_defaults(self):
        # 4 events, 3 characters: plot 168x88, width 256, height clamped to 160.
        assert card_dimensions(4, 3) == (168, 88, 256, 160)

    def test_ten_events_single_row(self):
        assert card_dimensions(10, 1) == (504, 0, 592, 160)

    def test_zero_counts_rejected(self):
        with pytest.raises(LayoutError):
            card_dimensions(0, 1)
        with pytest.raises(LayoutError):
            card_dimensions(1, 0)

    @given(st.integers(1, 12), st.integers(1, 12))
    def test_matches_formula_oracle_exactly(self, n_events, n_characters):
        assert card_dimensions(n_events, n_characters) == \
            _clamp_oracle(n_events, n_characters, DEFAULTS)

    @given(st.integers(1, 11), st.integers(1, 11))
    def test_monotone_in_both_counts(self, n_events, n_characters):
        _, _, w0, h0 = card_dimensions(n_events, n_characters)
        _, _, w1, _ = card_dimensions(n_events + 1, n_characters)
        _, _, _, h1 = card_dimensions(n_events, n_characters + 1)
        assert w1 >= w0
        assert h1 >= h0


class TestSceneCard:
    def test_anchor_grid_spacing(self, wallpaper):
        card = scene_card(wallpaper.scenes[1], DEFAULTS)
        xs = [x for _, x in card.event_columns]
        ys = [y for _, y in card.character_rows]
        assert [b - a for a, b in zip(xs, xs[1:])] == [DEFAULTS.event_spacing] * 2
        assert [b - a for a, b in zip(ys, ys[1:])] == [DEFAULTS.character_spacing]

    def test_anchors_only_for_annotated_pairs(self, wallpaper):
        scene = wallpaper.scenes[1]
        card = scene_card(scene, DEFAULTS)
        expected = {(e.id, a.character) for e in scene.events for a in e.annotations}
        assert {(e, c) for e, c, _, _ in card.anchors} == expected

    def test_anchors_sit_on_grid(self, wallpaper):
        card = scene_card(wallpaper.scenes[1], DEFAULTS)
        col_x = dict(card.event_columns)
        row_y = dict(card.character_rows)
        for event_id, character_id, x, y in card.anchors:
            assert x == col_x[event_id]
            assert y == row_y[character_id]

    def test_grid_centered_in_clamped_card(self, wallpaper):
        # Clamping grows the card; the grid must keep symmetric margins.
        for scene in wallpaper.scenes:
            card = scene_card(scene, DEFAULTS)
            left = card.event_columns[0][1] - DEFAULTS.label_width
            right = card.width - card.event_columns[-1][1]
            assert left == pytest.approx(right)
            top = card.character_rows[0][1] - DEFAULTS.title_height
            bottom = card.height - card.character_rows[-1][1]
            assert top == pytest.approx(bottom)


class TestFlowCards:
    def _dims(self, widths, height=160):
        return [scene_card_stub(w, height, f"s{i}") for i, w in enumerate(widths)]

    def test_hand_packed_example(self):
        cfg = LayoutConfig(container_width=600, card_gap=24)
        cards = self._dims([256, 256, 256])
        placed = flow_cards(cards, cfg)
        assert (placed[0].x, placed[0].y) == (0, 0)
        assert (placed[1].x, placed[1].y) == (280, 0)
        assert placed[2].x == 0.0
        assert placed[2].y == 160 + 24

    def test_single_card_at_origin(self):
        placed = flow_cards(self._dims([256]), DEFAULTS)
        assert (placed[0].x, placed[0].y) == (0, 0)

    def test_full_width_cards_stack(self):
        cfg = LayoutConfig(container_width=400)
        placed = flow_cards(self._dims([400, 400]), cfg)
        assert placed[0].y == 0
        assert placed[1].x == 0
        assert placed[1].y == 160 + cfg.card_gap

    def test_oversized_card_names_scene(self):
        cfg = LayoutConfig(container_width=200)
        with pytest.raises(CardTooWide) as exc_info:
            flow_cards(self._dims([320]), cfg)
        assert exc_info.value.scene_id == "s0"

    def test_row_height_is_max_in_row(self):
        cfg = LayoutConfig(container_width=600)
        cards = [scene_card_stub(200, 160, "a"), scene_card_stub(200, 260, "b"),
                 scene_card_stub(500, 160, "c")]
        placed = flow_cards(cards, cfg)
        assert placed[2].y == 260 + cfg.card_gap


def scene_card_stub(width, height, scene_id):
    from focalviz.layout import CardGeometry

    return CardGeometry(scene_id=scene_id, n_events=1, n_characters=1,
                        plot_width=0, plot_height=0, width=width, height=height)


class TestView:
    def test_parse(self):
        assert View.parse("overview") == View("overview")
        assert View.parse("scene:s2") == View("scene", "s2")
        assert View.parse("character:john") == View("character", "john")

    def test_round_trip_str(self):
        for text in ("overview", "scene:s2", "character:john"):
            assert str(View.parse(text)) == text

    def test_malformed(self):
        for bad in ("", "scene:", "zoom:s1", "scene"):
            with pytest.raises(ValueError):
                View.parse(bad)


class TestBuildLayout:
    def test_overview_cards_and_arrows(self, wallpaper):
        layout = build_layout(wallpaper, View("overview"))
        assert [c.scene_id for c in layout.cards] == ["s1", "s2"]
        assert len(layout.arrows) == 1
        assert layout.arrows[0].from_scene == "s1"

    def test_overview_card_sizes(self, wallpaper):
        layout = build_layout(wallpaper, View("overview"))
        assert (layout.cards[0].width, layout.cards[0].height) == (188, 160)
        assert (layout.cards[1].width, layout.cards[1].height) == (200, 160)

    def test_scene_view_single_card(self, wallpaper):
        layout = build_layout(wallpaper, View("scene", "s2"))
        assert len(layout.cards) == 1
        assert layout.cards[0].n_events == 3
        assert layout.cards[0].n_characters == 2
        assert layout.arrows == ()

    def test_scene_view_unknown_id(self, wallpaper):
        with pytest.raises(UnknownViewTarget):
            build_layout(wallpaper, View("scene", "nope"))

    def test_character_view_single_rows(self, wallpaper):
        layout = build_layout(wallpaper, View("character", "john"))
        assert len(layout.cards) == 2
        assert all(c.n_characters == 1 for c in layout.cards)
        assert all(cid == "john" for c in layout.cards for cid, _ in c.character_rows)
        assert len(layout.arrows) == 1

    def test_character_view_counts_active_scenes(self, open_boat):
        # crew is annotated only in the first event's scene; one card, no arrows.
        layout = build_layout(open_boat, View("character", "crew"))
        assert len(layout.cards) == 1
        assert layout.arrows == ()

    def test_character_view_unknown_and_inactive(self, open_boat):
        with pytest.raises(UnknownViewTarget):
            build_layout(open_boat, View("character", "nobody"))
        with pytest.raises(LayoutError):
            build_layout(open_boat, View("character", "captain"))

    def test_arrow_endpoints_within_row(self, wallpaper):
        layout = build_layout(wallpaper, View("overview"))
        (x0, y0), (x1, y1) = layout.arrows[0].points
        first, second = layout.cards
        assert (x0, y0) == (first.right, first.y + first.height / 2)
        assert (x1, y1) == (second.x, second.y + second.height / 2)

    def test_arrow_endpoints_on_wrap(self, wallpaper):
        cfg = LayoutConfig(container_width=220)
        layout = build_layout(wallpaper, View("overview"), cfg)
        assert layout.cards[1].y > layout.cards[0].y
        (x0, y0), (x1, y1) = layout.arrows[0].points
        first, second = layout.cards
        assert (x0, y0) == (first.x + first.width / 2, first.bottom)
        assert (x1, y1) == (second.x + second.width / 2, second.y)

    def test_empty_scenes_filtered(self, unannotated_wallpaper):
        layout = build_layout(unannotated_wallpaper, View("overview"))
        assert layout.cards == ()

    def test_deterministic(self, wallpaper):
        a = build_layout(wallpaper, View("overview"))
        b = build_layout(wallpaper, View("overview"))
        assert a == b
        assert layout_to_dict(a) == layout_to_dict(b)

    @settings(max_examples=60)
    @given(st.integers(0, 10**6))
    def test_packing_safety_on_random_documents(self, seed):
        doc = random_document(random.Random(seed), allow_empty_scenes=True)
        layout = build_layout(doc, View("overview"))
        for card in layout.cards:
            assert card.right <= layout.config.container_width
        cards = layout.cards
        for i in range(len(cards)):
            for j in range(i + 1, len(cards)):
                a, b = cards[i], cards[j]
                overlap_x = a.x < b.right and b.x < a.right
                overlap_y = a.y < b.bottom and b.y < a.bottom
                assert not (overlap_x and overlap_y)

    @settings(max_examples=60)
    @given(st.integers(0, 10**6))
    def test_arrow_count_and_scene_order(self, seed):
        doc = random_document(random.Random(seed), allow_empty_scenes=True)
        layout = build_layout(doc, View("overview"))
        expected = [s.id for s in doc.scenes if s.events and active_characters(s)]
        assert [c.scene_id for c in layout.cards] == expected
        assert len(layout.arrows) == max(0, len(layout.cards) - 1)


class TestLayoutDict:
    def test_shape(self, wallpaper):
        payload = layout_to_dict(build_layout(wallpaper, View("overview")))
        assert payload["view"] == "overview"
        assert len(payload["cards"]) == 2
        card = payload["cards"][1]
        assert {a["event"] for a in card["anchors"]} == {"s2e1", "s2e2", "s2e3"}
        assert len(payload["arrows"]) == 1
        assert payload["arrows"][0]["from"] == "s1"
