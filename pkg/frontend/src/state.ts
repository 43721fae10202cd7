/**
 * View state and its URL-hash encoding. Story, view, and selection are the
 * shareable parts; hover and panel position are transient screen state.
 */

export type ViewKind = "overview" | "scene" | "character";

export interface ViewSpec {
  kind: ViewKind;
  target?: string;
}

export interface GlyphRef {
  event: string;
  character: string;
}

export interface ViewState {
  story: string | null;
  view: ViewSpec;
  selection: GlyphRef | null;
  hover: GlyphRef | null;
  panelOpen: boolean;
  panelPos: { x: number; y: number };
  scrollAnchor: string | null;
}

export function initialState(): ViewState {
  return {
    story: null,
    view: { kind: "overview" },
    selection: null,
    hover: null,
    panelOpen: false,
    panelPos: { x: 24, y: 24 },
    scrollAnchor: null
  };
}

export function viewToString(view: ViewSpec): string {
  return view.kind === "overview" ? "overview" : `${view.kind}:${view.target ?? ""}`;
}

export function parseView(text: string): ViewSpec {
  if (text === "overview") return { kind: "overview" };
  for (const kind of ["scene", "character"] as const) {
    const prefix = `${kind}:`;
    if (text.startsWith(prefix) && text.length > prefix.length) {
      return { kind, target: text.slice(prefix.length) };
    }
  }
  throw new Error(`malformed view ${JSON.stringify(text)}`);
}

/** Encode the shareable parts of the state into a location hash. */
export function encodeHash(state: Pick<ViewState, "story" | "view" | "selection">): string {
  const params = new URLSearchParams();
  if (state.story) params.set("story", state.story);
  params.set("view", viewToString(state.view));
  if (state.selection) {
    params.set("sel", `${state.selection.event}/${state.selection.character}`);
  }
  return `#${params.toString()}`;
}

/** Decode a location hash; malformed pieces fall back to defaults. */
export function decodeHash(hash: string): Pick<ViewState, "story" | "view" | "selection"> {
  const params = new URLSearchParams(hash.replace(/^#/, ""));
  let view: ViewSpec = { kind: "overview" };
  const viewText = params.get("view");
  if (viewText) {
    try {
      view = parseView(viewText);
    } catch {
      view = { kind: "overview" };
    }
  }
  let selection: GlyphRef | null = null;
  const sel = params.get("sel");
  if (sel) {
    const slash = sel.indexOf("/");
    if (slash > 0 && slash < sel.length - 1) {
      selection = { event: sel.slice(0, slash), character: sel.slice(slash + 1) };
    }
  }
  return { story: params.get("story"), view, selection };
}
