"""Deterministic SVG rendering of glyphs, scene cards, and timelines.

The glyph is three concentric layers: a center disc for POV, a middle ring
for focalization type (solid when one type, split vertically when both),
and an outer ring of three equal arcs for the facets. Output is plain
SVG 1.1 text, byte-stable for identical inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable
from xml.sax.saxutils import escape, quoteattr

from .layout import LayoutConfig, TimelineLayout, View, build_layout
from .model import Annotation, NarrativeDocument

FACET_ORDER = ("perceptual", "psychological", "ideological")


class RenderError(Exception):
    pass


@dataclass(frozen=True)
class GlyphStyle:
    """Radii, color tokens, and facet arc placement for the glyph."""

    center_radius: float = 5.0
    type_inner: float = 7.0
    type_outer: float = 10.0
    facet_inner: float = 11.0
    facet_outer: float = 14.0
    outer_radius: float = 15.0
    pov_color: str = "#4C7DD0"
    internal_color: str = "#4CAF7D"
    external_color: str = "#E8923A"
    facet_present_color: str = "#9E9E9E"
    facet_absent_color: str = "#FFFFFF"
    ring_stroke: str = "#8A8A8A"
    # Angles in degrees clockwise from 12 o'clock; three equal disjoint arcs.
    facet_arcs: tuple[tuple[str, float, float], ...] = (
        ("perceptual", 0.0, 120.0),     # top-right
        ("psychological", 120.0, 240.0),  # bottom
        ("ideological", 240.0, 360.0),  # top-left
    )

    def __post_init__(self) -> None:
        radii = (self.center_radius, self.type_inner, self.type_outer,
                 self.facet_inner, self.facet_outer, self.outer_radius)
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError(f"glyph radii must strictly increase outward: {radii}")
        spans = sorted((start, end) for _, start, end in self.facet_arcs)
        if len(self.facet_arcs) != 3 or any(end - start != 120.0 for start, end in spans) \
                or [s for s, _ in spans] != [0.0, 120.0, 240.0]:
            raise ValueError("facet arcs must be three disjoint 120-degree arcs "
                             "covering the full circle")

    def color_of(self, token: str) -> str:
        return {
            "pov": self.pov_color,
            "internal": self.internal_color,
            "external": self.external_color,
            "facet_present": self.facet_present_color,
            "facet_absent": self.facet_absent_color,
            "ring_stroke": self.ring_stroke,
        }[token]


def _fmt(x: float) -> str:
    """Fixed-precision number formatting so output never depends on float repr."""
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def _polar(r: float, angle_deg: float) -> tuple[float, float]:
    """Point at radius r, measured clockwise from 12 o'clock, center (0, 0)."""
    rad = math.radians(angle_deg)
    return r * math.sin(rad), -r * math.cos(rad)


def _sector_path(r_in: float, r_out: float, a0: float, a1: float) -> str:
    """Annular sector swept clockwise from a0 to a1 degrees."""
    x0, y0 = _polar(r_out, a0)
    x1, y1 = _polar(r_out, a1)
    x2, y2 = _polar(r_in, a1)
    x3, y3 = _polar(r_in, a0)
    large = 1 if (a1 - a0) > 180.0 else 0
    return (f"M {_fmt(x0)} {_fmt(y0)} "
            f"A {_fmt(r_out)} {_fmt(r_out)} 0 {large} 1 {_fmt(x1)} {_fmt(y1)} "
            f"L {_fmt(x2)} {_fmt(y2)} "
            f"A {_fmt(r_in)} {_fmt(r_in)} 0 {large} 0 {_fmt(x3)} {_fmt(y3)} Z")


def _annulus_path(r_in: float, r_out: float) -> str:
    """Full ring as two circles, filled with the even-odd rule."""

    def circle(r: float) -> str:
        return (f"M {_fmt(0.0)} {_fmt(-r)} "
                f"A {_fmt(r)} {_fmt(r)} 0 1 1 {_fmt(0.0)} {_fmt(r)} "
                f"A {_fmt(r)} {_fmt(r)} 0 1 1 {_fmt(0.0)} {_fmt(-r)} Z")

    return circle(r_out) + " " + circle(r_in)


def render_glyph(annotation: Annotation, style: GlyphStyle | None = None) -> str:
    """One glyph centered at (0, 0) as an SVG <g> fragment."""
    style = style or GlyphStyle()
    parts: list[str] = ['<g class="glyph">']

    facet_bits = {"perceptual": annotation.perceptual,
                  "psychological": annotation.psychological,
                  "ideological": annotation.ideological}
    for name, start, end in style.facet_arcs:
        fill = style.facet_present_color if facet_bits[name] == 1 else style.facet_absent_color
        parts.append(f'<path class="glyph-facet glyph-facet-{name}" '
                     f'd="{_sector_path(style.facet_inner, style.facet_outer, start, end)}" '
                     f'fill="{fill}" stroke="{style.ring_stroke}" stroke-width="0.5"/>')

    if annotation.internal == 1 and annotation.external == 1:
        # Both types: split at the vertical axis, internal left, external right.
        parts.append(f'<path class="glyph-type glyph-type-internal" '
                     f'd="{_sector_path(style.type_inner, style.type_outer, 180.0, 360.0)}" '
                     f'fill="{style.internal_color}"/>')
        parts.append(f'<path class="glyph-type glyph-type-external" '
                     f'd="{_sector_path(style.type_inner, style.type_outer, 0.0, 180.0)}" '
                     f'fill="{style.external_color}"/>')
    elif annotation.internal == 1 or annotation.external == 1:
        kind = "internal" if annotation.internal == 1 else "external"
        parts.append(f'<path class="glyph-type glyph-type-{kind}" fill-rule="evenodd" '
                     f'd="{_annulus_path(style.type_inner, style.type_outer)}" '
                     f'fill="{style.color_of(kind)}"/>')
    else:
        parts.append(f'<path class="glyph-type glyph-type-empty" fill-rule="evenodd" '
                     f'd="{_annulus_path(style.type_inner, style.type_outer)}" '
                     f'fill="none" stroke="{style.ring_stroke}" stroke-width="0.5"/>')

    if annotation.pov == 1:
        parts.append(f'<circle class="glyph-center" r="{_fmt(style.center_radius)}" '
                     f'fill="{style.pov_color}"/>')
    else:
        parts.append(f'<circle class="glyph-center" r="{_fmt(style.center_radius)}" '
                     f'fill="none" stroke="{style.ring_stroke}" stroke-width="1"/>')

    parts.append("</g>")
    return "".join(parts)


@dataclass(frozen=True)
class SvgDocument:
    width: float
    height: float
    body: str

    def to_text(self) -> str:
        return (f'<svg xmlns="http://www.w3.org/2000/svg" '
                f'width="{_fmt(self.width)}" height="{_fmt(self.height)}" '
                f'viewBox="0 0 {_fmt(self.width)} {_fmt(self.height)}">'
                f"{self.body}</svg>\n")

    def to_bytes(self) -> bytes:
        return self.to_text().encode("utf-8")


_ARROW_DEFS = ('<defs><marker id="arrowhead" markerWidth="8" markerHeight="8" '
               'refX="7" refY="4" orient="auto" markerUnits="userSpaceOnUse">'
               '<path d="M 0 0 L 8 4 L 0 8 Z" fill="#666666"/></marker></defs>')

_CARD_FONT = 'font-family="Helvetica, Arial, sans-serif"'


def render_timeline(layout: TimelineLayout, doc: NarrativeDocument,
                    style: GlyphStyle | None = None) -> SvgDocument:
    """Full timeline: one group per card plus directed arrows between cards."""
    style = style or GlyphStyle()
    names = {c.id: c.name for c in doc.characters}
    titles = {s.id: s.title for s in doc.scenes}
    parts: list[str] = [_ARROW_DEFS]

    for k, arrow in enumerate(layout.arrows):
        points = " L ".join(f"{_fmt(x)} {_fmt(y)}" for x, y in arrow.points)
        parts.append(f'<path id="arrow-{k}" class="timeline-arrow" d="M {points}" '
                     f'fill="none" stroke="#666666" stroke-width="1.5" '
                     f'marker-end="url(#arrowhead)"/>')

    for card in layout.cards:
        scene = doc.scene_by_id(card.scene_id)
        if scene is None:
            raise RenderError(f"layout references unknown scene {card.scene_id!r}")
        events = {e.id: e for e in scene.events}
        group = [f'<g id="card-{_attr_id(card.scene_id)}" class="scene-card" '
                 f'transform="translate({_fmt(card.x)} {_fmt(card.y)})">']
        group.append(f'<rect class="card-frame" x="0" y="0" width="{_fmt(card.width)}" '
                     f'height="{_fmt(card.height)}" rx="6" fill="#FFFFFF" '
                     f'stroke="#C8C8C8"/>')
        group.append(f'<text class="card-title" x="8" y="18" {_CARD_FONT} '
                     f'font-size="13" font-weight="bold">'
                     f'{escape(titles[card.scene_id])}</text>')
        for cid, y in card.character_rows:
            if cid not in names:
                raise RenderError(f"layout references unknown character {cid!r}")
            group.append(f'<text class="row-label" x="{_fmt(layout.config.label_width - 8)}" '
                         f'y="{_fmt(y + 4)}" {_CARD_FONT} font-size="11" '
                         f'text-anchor="end">{escape(names[cid])}</text>')
        for j, (eid, x) in enumerate(card.event_columns):
            group.append(f'<text class="column-index" x="{_fmt(x)}" '
                         f'y="{_fmt(layout.config.title_height + 10)}" {_CARD_FONT} '
                         f'font-size="9" fill="#999999" text-anchor="middle">{j + 1}</text>')
        for eid, cid, ax, ay in card.anchors:
            event = events.get(eid)
            annotation = event.annotation_for(cid) if event is not None else None
            if annotation is None:
                raise RenderError(f"anchor ({eid!r}, {cid!r}) has no matching annotation")
            group.append(f'<g id="glyph-{_attr_id(eid)}-{_attr_id(cid)}" '
                         f'transform="translate({_fmt(ax)} {_fmt(ay)})">'
                         f"{render_glyph(annotation, style)}</g>")
        group.append("</g>")
        parts.append("".join(group))

    return SvgDocument(layout.width, layout.height, "".join(parts))


def render_story(doc: NarrativeDocument, view: View,
                 cfg: LayoutConfig | None = None,
                 style: GlyphStyle | None = None) -> SvgDocument:
    """Layout + render in one step."""
    return render_timeline(build_layout(doc, view, cfg), doc, style)


def render_legend(style: GlyphStyle | None = None) -> str:
    """Persistent encoding reference: three exemplar rings plus the absent state."""
    style = style or GlyphStyle()
    rows: list[str] = ['<g id="legend" class="legend">']
    y = 18.0
    step = 36.0
    label_x = 40.0

    rows.append(f'<g id="legend-center" transform="translate(18 {_fmt(y)})">'
                f'<circle r="{_fmt(style.center_radius)}" fill="{style.pov_color}" '
                f'stroke="{style.ring_stroke}" stroke-width="0.5"/></g>')
    rows.append(_legend_text(label_x, y, "Point of view: filled center = POV character"))
    y += step

    rows.append(f'<g id="legend-type" transform="translate(18 {_fmt(y)})">'
                f'<path id="legend-type-internal" '
                f'd="{_sector_path(style.type_inner, style.type_outer, 180.0, 360.0)}" '
                f'fill="{style.internal_color}"/>'
                f'<path id="legend-type-external" '
                f'd="{_sector_path(style.type_inner, style.type_outer, 0.0, 180.0)}" '
                f'fill="{style.external_color}"/></g>')
    rows.append(_legend_text(label_x, y, "Type ring: internal (left) / external (right)"))
    y += step

    arcs = []
    for name, start, end in style.facet_arcs:
        arcs.append(f'<path id="legend-facet-{name}" '
                    f'd="{_sector_path(style.facet_inner, style.facet_outer, start, end)}" '
                    f'fill="{style.facet_present_color}" '
                    f'stroke="{style.ring_stroke}" stroke-width="0.5"/>')
    rows.append(f'<g id="legend-facet" transform="translate(18 {_fmt(y)})">'
                + "".join(arcs) + "</g>")
    rows.append(_legend_text(label_x, y, "Facet arcs: perceptual (top right), "
                                         "psychological (bottom), ideological (top left)"))
    y += step

    rows.append(f'<g id="legend-facet-absent" transform="translate(18 {_fmt(y)})">'
                f'<path d="{_sector_path(style.facet_inner, style.facet_outer, 0.0, 120.0)}" '
                f'fill="{style.facet_absent_color}" '
                f'stroke="{style.ring_stroke}" stroke-width="0.5"/></g>')
    rows.append(_legend_text(label_x, y, "Unfilled arc = facet absent"))
    rows.append("</g>")
    return "".join(rows)


def _legend_text(x: float, y: float, text: str) -> str:
    return (f'<text x="{_fmt(x)}" y="{_fmt(y + 4)}" {_CARD_FONT} '
            f'font-size="11">{escape(text)}</text>')


def _attr_id(value: str) -> str:
    """Ids land inside XML attributes; escape anything unsafe."""
    out = []
    for ch in value:
        if ch.isalnum() or ch in "-_.":
            out.append(ch)
        else:
            out.append(f"_{ord(ch):x}_")
    return "".join(out)
