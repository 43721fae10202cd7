#!/usr/bin/env python3
"""Render all 64 glyph bit vectors onto one SVG sheet for visual inspection.

    python3 scripts/glyph_gallery.py [out.svg]
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from focalviz.model import Annotation  # noqa: E402
from focalviz.render import GlyphStyle, SvgDocument, render_glyph, render_legend  # noqa: E402

CELL = 64
COLUMNS = 8


def main() -> None:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else ROOT / "glyph_gallery.svg"
    style = GlyphStyle()
    parts = [f'<g transform="translate(8 8)">{render_legend(style)}</g>']
    top = 170
    for n in range(64):
        bits = [(n >> (5 - i)) & 1 for i in range(6)]
        row, col = divmod(n, COLUMNS)
        x = col * CELL + CELL / 2
        y = top + row * CELL + CELL / 2
        parts.append(f'<g transform="translate({x} {y})">'
                     f"{render_glyph(Annotation('c', *bits), style)}</g>")
        parts.append(f'<text x="{x}" y="{y + 27}" font-family="monospace" '
                     f'font-size="8" text-anchor="middle">{"".join(map(str, bits))}</text>')
    sheet = SvgDocument(COLUMNS * CELL, top + 8 * CELL, "".join(parts))
    out.write_bytes(sheet.to_bytes())
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
