/**
 * Persistent encoding legend. Clicking a ring reveals the definition of the
 * variable that ring encodes and how its categories are drawn.
 */

import { DEFAULT_STYLE, GlyphStyle, renderGlyph } from "./glyph.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export type RingName = "center" | "type" | "facet";

export const RING_DEFINITIONS: Record<RingName, string> = {
  center:
    "Center disc: point of view. A filled blue center marks the character " +
    "telling the story in this event; an empty center marks everyone else.",
  type:
    "Middle ring: focalization type. Green means internal (direct access to " +
    "the character's perceptions, knowledge, or emotions), orange means " +
    "external (only outward behavior is available). When both occur in one " +
    "event the ring splits: internal on the left half, external on the right.",
  facet:
    "Outer ring: focalization facets as three equal arcs. Top right is the " +
    "perceptual facet (sensory access), bottom is the psychological facet " +
    "(knowledge and feeling), top left is the ideological facet (norms and " +
    "judgment). A gray arc means the facet is foregrounded; white means absent."
};

export class Legend {
  private help: HTMLElement;

  constructor(readonly root: HTMLElement,
              private readonly style: GlyphStyle = DEFAULT_STYLE) {
    this.root.classList.add("legend");
    this.help = this.root.ownerDocument.createElement("p");
    this.help.className = "legend-help";
    this.help.hidden = true;
    this.renderRings();
    this.root.appendChild(this.help);
  }

  private renderRings(): void {
    const owner = this.root.ownerDocument;
    const svg = owner.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", "-20 -20 40 40");
    svg.setAttribute("width", "72");
    svg.setAttribute("height", "72");
    svg.setAttribute("class", "legend-glyph");
    // Exemplar glyph: POV holder, both types, all facets present.
    const glyph = renderGlyph([1, 1, 1, 1, 1, 1], this.style, owner);
    svg.appendChild(glyph);
    this.attachRingTargets(glyph);
    this.root.appendChild(svg);

    const caption = owner.createElement("span");
    caption.className = "legend-caption";
    caption.textContent = "Encoding legend (click a ring)";
    this.root.appendChild(caption);
  }

  private attachRingTargets(glyph: SVGGElement): void {
    const targets: [string, RingName][] = [
      [".glyph-center", "center"],
      [".glyph-type", "type"],
      [".glyph-facet", "facet"]
    ];
    for (const [selector, ring] of targets) {
      for (const node of glyph.querySelectorAll(selector)) {
        node.addEventListener("click", () => this.explain(ring));
        (node as SVGElement).dataset.ring = ring;
      }
    }
  }

  explain(ring: RingName): void {
    this.help.textContent = RING_DEFINITIONS[ring];
    this.help.dataset.ring = ring;
    this.help.hidden = false;
  }

  dismiss(): void {
    this.help.hidden = true;
    delete this.help.dataset.ring;
  }

  get visibleDefinition(): string | null {
    return this.help.hidden ? null : this.help.textContent;
  }
}
