/**
 * Client-side glyph renderer. The bit-vector to fill-token rules here must
 * stay in lockstep with the server renderer; the shared fixture
 * fixtures/glyph_conformance.json pins all 64 cases for both sides.
 */

export type FacetName = "perceptual" | "psychological" | "ideological";
export type CenterToken = "pov" | "empty";
export type TypeToken = "internal" | "external" | "split" | "empty";
export type FacetToken = "present" | "absent";

export interface GlyphTokens {
  center: CenterToken;
  type: TypeToken;
  facets: Record<FacetName, FacetToken>;
}

export interface GlyphStyle {
  centerRadius: number;
  typeInner: number;
  typeOuter: number;
  facetInner: number;
  facetOuter: number;
  outerRadius: number;
  povColor: string;
  internalColor: string;
  externalColor: string;
  facetPresentColor: string;
  facetAbsentColor: string;
  ringStroke: string;
  /** Degrees clockwise from 12 o'clock; three equal disjoint arcs. */
  facetArcs: [FacetName, number, number][];
}

export const DEFAULT_STYLE: GlyphStyle = {
  centerRadius: 5,
  typeInner: 7,
  typeOuter: 10,
  facetInner: 11,
  facetOuter: 14,
  outerRadius: 15,
  povColor: "#4C7DD0",
  internalColor: "#4CAF7D",
  externalColor: "#E8923A",
  facetPresentColor: "#9E9E9E",
  facetAbsentColor: "#FFFFFF",
  ringStroke: "#8A8A8A",
  facetArcs: [
    ["perceptual", 0, 120],
    ["psychological", 120, 240],
    ["ideological", 240, 360]
  ]
};

/** Bits in canonical order: POV, Internal, External, Perceptual, Ideological, Psychological. */
export function glyphTokens(bits: readonly number[]): GlyphTokens {
  const [pov, internal, external, perceptual, ideological, psychological] = bits;
  let type: TypeToken;
  if (internal === 1 && external === 1) type = "split";
  else if (internal === 1) type = "internal";
  else if (external === 1) type = "external";
  else type = "empty";
  return {
    center: pov === 1 ? "pov" : "empty",
    type,
    facets: {
      perceptual: perceptual === 1 ? "present" : "absent",
      ideological: ideological === 1 ? "present" : "absent",
      psychological: psychological === 1 ? "present" : "absent"
    }
  };
}

const SVG_NS = "http://www.w3.org/2000/svg";

function polar(r: number, angleDeg: number): [number, number] {
  const rad = (angleDeg * Math.PI) / 180;
  return [r * Math.sin(rad), -r * Math.cos(rad)];
}

function fmt(x: number): string {
  const rounded = Math.round(x * 1000) / 1000;
  return Object.is(rounded, -0) ? "0" : String(rounded);
}

function sectorPath(rIn: number, rOut: number, a0: number, a1: number): string {
  const [x0, y0] = polar(rOut, a0);
  const [x1, y1] = polar(rOut, a1);
  const [x2, y2] = polar(rIn, a1);
  const [x3, y3] = polar(rIn, a0);
  const large = a1 - a0 > 180 ? 1 : 0;
  return (
    `M ${fmt(x0)} ${fmt(y0)} ` +
    `A ${fmt(rOut)} ${fmt(rOut)} 0 ${large} 1 ${fmt(x1)} ${fmt(y1)} ` +
    `L ${fmt(x2)} ${fmt(y2)} ` +
    `A ${fmt(rIn)} ${fmt(rIn)} 0 ${large} 0 ${fmt(x3)} ${fmt(y3)} Z`
  );
}

function annulusPath(rIn: number, rOut: number): string {
  const circle = (r: number) =>
    `M 0 ${fmt(-r)} A ${fmt(r)} ${fmt(r)} 0 1 1 0 ${fmt(r)} ` +
    `A ${fmt(r)} ${fmt(r)} 0 1 1 0 ${fmt(-r)} Z`;
  return `${circle(rOut)} ${circle(rIn)}`;
}

function el(doc: Document, tag: string, attrs: Record<string, string>): SVGElement {
  const node = doc.createElementNS(SVG_NS, tag) as SVGElement;
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  return node;
}

/** Build one glyph centered at (0, 0) as an SVG <g> element. */
export function renderGlyph(bits: readonly number[], style: GlyphStyle = DEFAULT_STYLE,
                            doc: Document = document): SVGGElement {
  const tokens = glyphTokens(bits);
  const group = el(doc, "g", { class: "glyph" }) as SVGGElement;

  for (const [facet, start, end] of style.facetArcs) {
    group.appendChild(el(doc, "path", {
      class: `glyph-facet glyph-facet-${facet}`,
      d: sectorPath(style.facetInner, style.facetOuter, start, end),
      fill: tokens.facets[facet] === "present"
        ? style.facetPresentColor : style.facetAbsentColor,
      stroke: style.ringStroke,
      "stroke-width": "0.5"
    }));
  }

  if (tokens.type === "split") {
    group.appendChild(el(doc, "path", {
      class: "glyph-type glyph-type-internal",
      d: sectorPath(style.typeInner, style.typeOuter, 180, 360),
      fill: style.internalColor
    }));
    group.appendChild(el(doc, "path", {
      class: "glyph-type glyph-type-external",
      d: sectorPath(style.typeInner, style.typeOuter, 0, 180),
      fill: style.externalColor
    }));
  } else if (tokens.type === "internal" || tokens.type === "external") {
    group.appendChild(el(doc, "path", {
      class: `glyph-type glyph-type-${tokens.type}`,
      "fill-rule": "evenodd",
      d: annulusPath(style.typeInner, style.typeOuter),
      fill: tokens.type === "internal" ? style.internalColor : style.externalColor
    }));
  } else {
    group.appendChild(el(doc, "path", {
      class: "glyph-type glyph-type-empty",
      "fill-rule": "evenodd",
      d: annulusPath(style.typeInner, style.typeOuter),
      fill: "none",
      stroke: style.ringStroke,
      "stroke-width": "0.5"
    }));
  }

  const center: Record<string, string> = {
    class: "glyph-center",
    r: fmt(style.centerRadius)
  };
  if (tokens.center === "pov") {
    center.fill = style.povColor;
  } else {
    center.fill = "none";
    center.stroke = style.ringStroke;
    center["stroke-width"] = "1";
  }
  group.appendChild(el(doc, "circle", center));
  return group;
}

export function annotationBits(annotation: {
  pov: number; internal: number; external: number;
  perceptual: number; ideological: number; psychological: number;
}): number[] {
  return [annotation.pov, annotation.internal, annotation.external,
          annotation.perceptual, annotation.ideological, annotation.psychological];
}
