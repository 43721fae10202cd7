"""Deterministic scene-card geometry and waterfall timeline layout.

Card dimensions follow the fixed spacing formula: the plot area grows by
one event-column spacing per extra event and one character-row spacing per
extra character, plus label, title, and padding allowances, clamped to a
minimum card size. Cards pack left to right and wrap onto new rows;
consecutive cards are joined by directed arrows.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Literal

from .model import NarrativeDocument, Scene, active_characters

MIN_CARD_WIDTH = 188
MIN_CARD_HEIGHT = 160


class LayoutError(Exception):
    def __init__(self, message: str, scene_id: str | None = None):
        super().__init__(message)
        self.scene_id = scene_id


class UnknownViewTarget(LayoutError):
    pass


class CardTooWide(LayoutError):
    pass


@dataclass(frozen=True)
class LayoutConfig:
    event_spacing: int = 56       # horizontal distance between event columns
    character_spacing: int = 44   # vertical distance between character rows
    label_width: int = 72         # left strip holding character names
    title_height: int = 28        # top strip holding the scene title
    padding: int = 16
    container_width: int = 1200
    card_gap: int = 24
    min_card_width: int = MIN_CARD_WIDTH
    min_card_height: int = MIN_CARD_HEIGHT

    def __post_init__(self) -> None:
        for name in ("event_spacing", "character_spacing", "label_width", "title_height",
                     "padding", "container_width", "card_gap", "min_card_width",
                     "min_card_height"):
            if getattr(self, name) <= 0:
                raise ValueError(f"layout config {name} must be > 0")


def card_dimensions(n_events: int, n_characters: int,
                    cfg: LayoutConfig | None = None) -> tuple[int, int, int, int]:
    """(plot_w, plot_h, card_w, card_h) for a grid of n_events x n_characters.

    Card width and height are clamped independently to the configured
    minimum card size. Empty scenes must be filtered out before layout.
    """
    cfg = cfg or LayoutConfig()
    if n_events < 1 or n_characters < 1:
        raise LayoutError(f"card needs at least one event and one character, "
                          f"got {n_events} x {n_characters}")
    plot_w = cfg.event_spacing * (n_events - 1)
    plot_h = cfg.character_spacing * (n_characters - 1)
    card_w = max(cfg.label_width + plot_w + cfg.padding, cfg.min_card_width)
    card_h = max(cfg.title_height + plot_h + cfg.padding, cfg.min_card_height)
    return plot_w, plot_h, card_w, card_h


@dataclass(frozen=True)
class CardGeometry:
    """One positioned scene card with its glyph anchor grid.

    Column/row positions cover the full grid; ``anchors`` holds an entry
    only for (event, character) pairs that actually carry an annotation,
    each sitting exactly on its grid point.
    """

    scene_id: str
    n_events: int
    n_characters: int
    plot_width: int
    plot_height: int
    width: int
    height: int
    x: float = 0.0
    y: float = 0.0
    event_columns: tuple[tuple[str, float], ...] = ()    # (event id, local x)
    character_rows: tuple[tuple[str, float], ...] = ()   # (character id, local y)
    anchors: tuple[tuple[str, str, float, float], ...] = ()  # (event, character, local x, y)

    @property
    def right(self) -> float:
        return self.x + self.width

    @property
    def bottom(self) -> float:
        return self.y + self.height

    def moved_to(self, x: float, y: float) -> CardGeometry:
        return replace(self, x=x, y=y)

    def anchor_point(self, event_id: str, character_id: str) -> tuple[float, float]:
        """Anchor position in timeline coordinates."""
        for e, c, ax, ay in self.anchors:
            if e == event_id and c == character_id:
                return self.x + ax, self.y + ay
        raise KeyError((event_id, character_id))


@dataclass(frozen=True)
class Arrow:
    from_scene: str
    to_scene: str
    points: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class View:
    kind: Literal["overview", "scene", "character"]
    target: str | None = None

    def __str__(self) -> str:
        return self.kind if self.target is None else f"{self.kind}:{self.target}"

    @staticmethod
    def parse(text: str) -> View:
        if text == "overview":
            return View("overview")
        for kind in ("scene", "character"):
            prefix = kind + ":"
            if text.startswith(prefix) and len(text) > len(prefix):
                return View(kind, text[len(prefix):])  # type: ignore[arg-type]
        raise ValueError(f"malformed view {text!r}; expected overview, "
                         f"scene:<id>, or character:<id>")


@dataclass(frozen=True)
class TimelineLayout:
    view: View
    config: LayoutConfig
    cards: tuple[CardGeometry, ...]
    arrows: tuple[Arrow, ...]
    width: float
    height: float


def scene_card(scene: Scene, cfg: LayoutConfig,
               characters: list[str] | None = None) -> CardGeometry:
    """Unpositioned card for a scene; rows default to its active characters.

    The anchor grid is centered in the plot area left over after clamping,
    so undersized cards keep exact column/row spacing.
    """
    rows = active_characters(scene) if characters is None else characters
    events = [e.id for e in scene.events]
    plot_w, plot_h, card_w, card_h = card_dimensions(len(events), len(rows), cfg)

    x0 = cfg.label_width + (card_w - cfg.label_width - plot_w) / 2
    y0 = cfg.title_height + (card_h - cfg.title_height - plot_h) / 2
    columns = tuple((eid, x0 + j * cfg.event_spacing) for j, eid in enumerate(events))
    row_pos = tuple((cid, y0 + i * cfg.character_spacing) for i, cid in enumerate(rows))

    col_x = dict(columns)
    row_y = dict(row_pos)
    anchors = tuple(
        (event.id, ann.character, col_x[event.id], row_y[ann.character])
        for event in scene.events
        for ann in event.annotations
        if ann.character in row_y
    )
    return CardGeometry(
        scene_id=scene.id,
        n_events=len(events),
        n_characters=len(rows),
        plot_width=plot_w,
        plot_height=plot_h,
        width=card_w,
        height=card_h,
        event_columns=columns,
        character_rows=row_pos,
        anchors=anchors,
    )


def flow_cards(cards: list[CardGeometry], cfg: LayoutConfig) -> list[CardGeometry]:
    """Greedy left-to-right packing with row wrapping; rows are top-aligned
    and advance by the tallest card in the row plus the gap."""
    for card in cards:
        if card.width > cfg.container_width:
            raise CardTooWide(f"scene {card.scene_id!r} card width {card.width} exceeds "
                              f"container width {cfg.container_width}", card.scene_id)
    placed: list[CardGeometry] = []
    x = 0.0
    y = 0.0
    row_height = 0.0
    for card in cards:
        if placed and x + card.width > cfg.container_width:
            x = 0.0
            y += row_height + cfg.card_gap
            row_height = 0.0
        placed.append(card.moved_to(x, y))
        x += card.width + cfg.card_gap
        row_height = max(row_height, card.height)
    return placed


def _connect(cards: list[CardGeometry]) -> tuple[Arrow, ...]:
    """Right-mid to left-mid within a row; bottom-mid to top-mid on wrap."""
    arrows = []
    for prev, nxt in zip(cards, cards[1:]):
        if nxt.y == prev.y:
            points = ((prev.right, prev.y + prev.height / 2),
                      (nxt.x, nxt.y + nxt.height / 2))
        else:
            points = ((prev.x + prev.width / 2, prev.bottom),
                      (nxt.x + nxt.width / 2, nxt.y))
        arrows.append(Arrow(prev.scene_id, nxt.scene_id, points))
    return tuple(arrows)


def build_layout(doc: NarrativeDocument, view: View,
                 cfg: LayoutConfig | None = None) -> TimelineLayout:
    """Compute the positioned timeline for one of the three views.

    Overview: one card per non-empty scene. Scene view: that scene's card
    alone. Character view: one single-row card per scene where the
    character is active.
    """
    cfg = cfg or LayoutConfig()
    if view.kind == "overview":
        cards = [scene_card(s, cfg) for s in doc.scenes
                 if s.events and active_characters(s)]
    elif view.kind == "scene":
        scene = doc.scene_by_id(view.target or "")
        if scene is None:
            raise UnknownViewTarget(f"unknown scene id {view.target!r}")
        if not scene.events or not active_characters(scene):
            raise LayoutError(f"scene {view.target!r} has nothing to lay out", view.target)
        cards = [scene_card(scene, cfg)]
    elif view.kind == "character":
        target = view.target or ""
        if target not in doc.character_ids():
            raise UnknownViewTarget(f"unknown character id {target!r}")
        cards = [scene_card(s, cfg, characters=[target]) for s in doc.scenes
                 if s.events and target in active_characters(s)]
        if not cards:
            raise LayoutError(f"character {target!r} has no annotations", target)
    else:  # pragma: no cover - View constrains the kind
        raise LayoutError(f"unknown view kind {view.kind!r}")

    placed = flow_cards(cards, cfg)
    arrows = _connect(placed)
    width = max((c.right for c in placed), default=0.0)
    height = max((c.bottom for c in placed), default=0.0)
    return TimelineLayout(view=view, config=cfg, cards=tuple(placed),
                          arrows=arrows, width=width, height=height)


def _num(x: float) -> int | float:
    return int(x) if float(x).is_integer() else round(x, 3)


def layout_to_dict(layout: TimelineLayout) -> dict[str, Any]:
    """JSON-ready form consumed by the SVG renderer's clients and the web UI."""
    return {
        "view": str(layout.view),
        "container_width": layout.config.container_width,
        "width": _num(layout.width),
        "height": _num(layout.height),
        "cards": [
            {
                "scene": c.scene_id,
                "x": _num(c.x),
                "y": _num(c.y),
                "width": c.width,
                "height": c.height,
                "plot_width": c.plot_width,
                "plot_height": c.plot_height,
                "label_width": layout.config.label_width,
                "title_height": layout.config.title_height,
                "events": [{"id": eid, "x": _num(x)} for eid, x in c.event_columns],
                "characters": [{"id": cid, "y": _num(y)} for cid, y in c.character_rows],
                "anchors": [
                    {"event": e, "character": ch, "x": _num(ax), "y": _num(ay)}
                    for e, ch, ax, ay in c.anchors
                ],
            }
            for c in layout.cards
        ],
        "arrows": [
            {
                "from": a.from_scene,
                "to": a.to_scene,
                "points": [[_num(px), _num(py)] for px, py in a.points],
            }
            for a in layout.arrows
        ],
    }
