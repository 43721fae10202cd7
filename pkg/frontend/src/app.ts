/**
 * Application shell coordinating the timeline, text panel, legend, and
 * explanation panel against the story API. View state (story, view,
 * selection) is mirrored into the URL hash so sessions are shareable;
 * in-flight loads are cancel-on-supersede so stale responses never land.
 */

import { ApiClient, LayoutData, StoryDocument, StoryEntry } from "./api.js";
import { ExplanationPanel } from "./explain.js";
import { Legend } from "./legend.js";
import { GlyphRef, ViewSpec, ViewState, decodeHash, encodeHash, initialState,
         viewToString } from "./state.js";
import { TextPanel } from "./textpanel.js";
import { Timeline } from "./timeline.js";

export class App {
  readonly state: ViewState = initialState();
  readonly timeline: Timeline;
  readonly textPanel: TextPanel;
  readonly legend: Legend;
  readonly panel: ExplanationPanel;

  document: StoryDocument | null = null;
  layout: LayoutData | null = null;
  stories: StoryEntry[] = [];

  private dropdown: HTMLSelectElement;
  private errorBanner: HTMLElement;
  private loadToken = 0;
  private controller: AbortController | null = null;
  private pending: Promise<void> = Promise.resolve();

  constructor(readonly root: HTMLElement, private readonly api: ApiClient,
              private readonly win: Window) {
    const owner = root.ownerDocument;
    root.classList.add("focalviz-app");

    const header = owner.createElement("header");
    header.className = "app-header";
    const label = owner.createElement("label");
    label.textContent = "Story ";
    this.dropdown = owner.createElement("select");
    this.dropdown.className = "story-select";
    this.dropdown.addEventListener("change", () => {
      void this.switchStory(this.dropdown.value);
    });
    label.appendChild(this.dropdown);
    header.appendChild(label);
    this.errorBanner = owner.createElement("span");
    this.errorBanner.className = "error-banner";
    this.errorBanner.hidden = true;
    header.appendChild(this.errorBanner);
    root.appendChild(header);

    const main = owner.createElement("main");
    main.className = "app-main";
    const left = owner.createElement("div");
    left.className = "app-left";
    this.legend = new Legend(owner.createElement("div"));
    left.appendChild(this.legend.root);
    this.timeline = new Timeline(owner.createElement("div"));
    left.appendChild(this.timeline.root);
    main.appendChild(left);
    this.textPanel = new TextPanel(owner.createElement("div"));
    main.appendChild(this.textPanel.root);
    root.appendChild(main);

    this.panel = new ExplanationPanel(root);

    this.win.addEventListener("hashchange", () => {
      void this.track(this.applyHash(this.win.location.hash));
    });
  }

  /** Remember the latest async action so tests can await quiescence. */
  private track(task: Promise<void>): Promise<void> {
    this.pending = task.catch(() => undefined);
    return task;
  }

  async whenIdle(): Promise<void> {
    let last;
    do {
      last = this.pending;
      await last;
    } while (last !== this.pending);
  }

  async start(): Promise<void> {
    this.stories = await this.api.listStories();
    this.dropdown.textContent = "";
    for (const entry of this.stories) {
      const option = this.root.ownerDocument.createElement("option");
      option.value = entry.id;
      option.textContent = entry.title;
      this.dropdown.appendChild(option);
    }
    await this.track(this.applyHash(this.win.location.hash));
  }

  /** Restore (story, view, selection) from a URL hash. */
  async applyHash(hash: string): Promise<void> {
    const decoded = decodeHash(hash);
    const story = decoded.story ?? this.stories[0]?.id ?? null;
    if (story === null) return;
    const storyChanged = story !== this.state.story;
    this.state.story = story;
    this.state.view = decoded.view;
    if (storyChanged) this.document = null;
    await this.loadView();
    if (decoded.selection) {
      await this.doSelect(decoded.selection);
    } else {
      this.clearSelection();
    }
    this.syncHash();
  }

  private syncHash(): void {
    const hash = encodeHash(this.state);
    if (this.win.location.hash !== hash) {
      this.win.history.replaceState(null, "", hash);
    }
  }

  private showError(message: string): void {
    this.errorBanner.textContent = message;
    this.errorBanner.hidden = false;
  }

  private clearError(): void {
    this.errorBanner.hidden = true;
  }

  /** Fetch document and layout for the current state; stale loads are dropped. */
  private async loadView(): Promise<boolean> {
    if (!this.state.story) return false;
    const token = ++this.loadToken;
    this.controller?.abort();
    this.controller = new AbortController();
    const { signal } = this.controller;
    try {
      const doc = this.document && this.document.id === this.state.story
        ? this.document
        : await this.api.getStory(this.state.story, signal);
      const layout = await this.api.getLayout(
        this.state.story, viewToString(this.state.view), undefined, signal);
      if (token !== this.loadToken) return false; // superseded
      this.document = doc;
      this.layout = layout;
      this.dropdown.value = this.state.story;
      this.timeline.render(doc, layout, {
        onGlyphHover: (target) => this.hoverGlyph(target),
        onGlyphLeave: () => this.unhover(),
        onGlyphClick: (target) => void this.track(this.selectGlyph(target)),
        onSceneClick: (sceneId) =>
          void this.track(this.setView({ kind: "scene", target: sceneId })),
        onCharacterClick: (characterId) =>
          void this.track(this.setView({ kind: "character", target: characterId }))
      });
      this.textPanel.render(doc);
      this.clearError();
      return true;
    } catch (error) {
      if (token !== this.loadToken) return false;
      // Keep the prior view on failure; surface a non-blocking notice.
      this.showError(error instanceof Error ? error.message : String(error));
      return false;
    }
  }

  async setView(view: ViewSpec): Promise<void> {
    const previous = this.state.view;
    this.state.view = view;
    const loaded = await this.loadView();
    if (!loaded) {
      this.state.view = previous;
      return;
    }
    if (this.state.selection) await this.doSelect(this.state.selection);
    this.syncHash();
  }

  async switchStory(storyId: string): Promise<void> {
    if (storyId === this.state.story) return;
    this.state.story = storyId;
    this.state.view = { kind: "overview" };
    this.document = null;
    this.clearSelection();
    this.textPanel.root.scrollTop = 0;
    await this.loadView();
    this.syncHash();
  }

  /** Hover preview: transient highlight, no scroll change, no selection change. */
  hoverGlyph(target: GlyphRef): void {
    this.state.hover = target;
    this.textPanel.previewEvent(target.event);
  }

  unhover(): void {
    this.state.hover = null;
    this.textPanel.clearPreview();
  }

  async selectGlyph(target: GlyphRef): Promise<void> {
    await this.doSelect(target);
    this.syncHash();
  }

  private async doSelect(target: GlyphRef): Promise<void> {
    if (!this.state.story) return;
    try {
      const explanation = await this.api.getExplanation(
        this.state.story, target.event, target.character);
      this.state.selection = target;
      this.state.scrollAnchor = target.event;
      this.textPanel.select(explanation.scene, explanation.event, explanation.cues);
      this.timeline.setSelected(target);
      const name = this.document?.characters
        .find((c) => c.id === target.character)?.name ?? target.character;
      this.panel.open(explanation, name);
      this.state.panelOpen = true;
      this.clearError();
    } catch (error) {
      this.showError(error instanceof Error ? error.message : String(error));
    }
  }

  clearSelection(): void {
    this.state.selection = null;
    this.state.scrollAnchor = null;
    this.state.panelOpen = false;
    this.textPanel.clearSelection();
    this.timeline.setSelected(null);
    this.panel.close();
  }
}

export function createApp(root: HTMLElement, api: ApiClient, win: Window): App {
  return new App(root, api, win);
}
