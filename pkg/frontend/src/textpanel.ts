/**
 * Scene-based reader panel with three highlight granularities: scene
 * context, selected event, and cue words. Hover previews are transient and
 * never move the reading position; selection scrolls to the event.
 */

import type { Span, StoryDocument } from "./api.js";
import { attrValue } from "./dom.js";

export const SCROLL_MARGIN = 48;

export class TextPanel {
  private doc: StoryDocument | null = null;
  private selectedEvent: string | null = null;

  constructor(readonly root: HTMLElement) {
    this.root.classList.add("text-panel");
  }

  render(doc: StoryDocument): void {
    this.doc = doc;
    this.selectedEvent = null;
    this.root.textContent = "";
    const owner = this.root.ownerDocument;
    for (let index = 0; index < doc.scenes.length; index++) {
      const scene = doc.scenes[index];
      const section = owner.createElement("section");
      section.className = "scene-section";
      section.dataset.sceneId = scene.id;

      const header = owner.createElement("h3");
      header.className = "scene-header";
      header.dataset.sceneId = scene.id;
      header.textContent = scene.title;
      section.appendChild(header);

      const body = owner.createElement("div");
      body.className = "scene-text";
      let cursor = scene.span[0];
      for (const event of scene.events) {
        if (event.span[0] > cursor) {
          body.appendChild(owner.createTextNode(
            doc.text.slice(cursor, event.span[0])));
        }
        const span = owner.createElement("span");
        span.className = "event-span";
        span.dataset.eventSpan = event.id;
        span.textContent = doc.text.slice(event.span[0], event.span[1]);
        body.appendChild(span);
        cursor = event.span[1];
      }
      if (cursor < scene.span[1]) {
        body.appendChild(owner.createTextNode(doc.text.slice(cursor, scene.span[1])));
      }
      section.appendChild(body);

      const next = doc.scenes[index + 1];
      const gapEnd = next ? next.span[0] : doc.text.length;
      if (gapEnd > scene.span[1]) {
        const gap = owner.createElement("div");
        gap.className = "scene-gap";
        gap.textContent = doc.text.slice(scene.span[1], gapEnd);
        section.appendChild(gap);
      }
      this.root.appendChild(section);
    }
  }

  private eventElement(eventId: string): HTMLElement | null {
    return this.root.querySelector(`[data-event-span="${attrValue(eventId)}"]`);
  }

  private sceneElement(sceneId: string): HTMLElement | null {
    return this.root.querySelector(
      `section[data-scene-id="${attrValue(sceneId)}"]`);
  }

  /** Lightweight hover preview; reading position must not change. */
  previewEvent(eventId: string): void {
    this.clearPreview();
    this.eventElement(eventId)?.classList.add("hl-transient");
  }

  clearPreview(): void {
    for (const node of this.root.querySelectorAll(".hl-transient")) {
      node.classList.remove("hl-transient");
    }
  }

  /** Stable highlighting for a committed selection, plus scroll-to-event. */
  select(sceneId: string, eventId: string, cues: Span[]): void {
    this.clearSelection();
    this.selectedEvent = eventId;
    this.sceneElement(sceneId)?.classList.add("hl-scene");
    const eventEl = this.eventElement(eventId);
    if (!eventEl || !this.doc) return;
    eventEl.classList.add("hl-event");
    this.markCues(eventEl, eventId, cues);
    this.scrollToEvent(eventEl);
  }

  clearSelection(): void {
    if (!this.selectedEvent) return;
    for (const node of this.root.querySelectorAll(".hl-scene, .hl-event")) {
      node.classList.remove("hl-scene", "hl-event");
    }
    const previous = this.eventElement(this.selectedEvent);
    if (previous && this.doc) {
      const event = this.findEvent(this.selectedEvent);
      if (event) previous.textContent = this.doc.text.slice(event[0], event[1]);
    }
    this.selectedEvent = null;
  }

  private findEvent(eventId: string): Span | null {
    for (const scene of this.doc?.scenes ?? []) {
      for (const event of scene.events) {
        if (event.id === eventId) return event.span;
      }
    }
    return null;
  }

  /** Rebuild the event span's content with <mark> wrappers around each cue. */
  private markCues(eventEl: HTMLElement, eventId: string, cues: Span[]): void {
    const span = this.findEvent(eventId);
    if (!span || !this.doc) return;
    const [start, end] = span;
    const owner = this.root.ownerDocument;
    const inRange = cues
      .filter(([s, e]) => s >= start && e <= end && e > s)
      .sort((a, b) => a[0] - b[0]);
    eventEl.textContent = "";
    let cursor = start;
    for (const [cueStart, cueEnd] of inRange) {
      if (cueStart < cursor) continue; // overlapping cue; keep the first
      if (cueStart > cursor) {
        eventEl.appendChild(owner.createTextNode(this.doc.text.slice(cursor, cueStart)));
      }
      const mark = owner.createElement("mark");
      mark.className = "hl-cue";
      mark.textContent = this.doc.text.slice(cueStart, cueEnd);
      eventEl.appendChild(mark);
      cursor = cueEnd;
    }
    if (cursor < end) {
      eventEl.appendChild(owner.createTextNode(this.doc.text.slice(cursor, end)));
    }
  }

  private scrollToEvent(eventEl: HTMLElement): void {
    this.root.scrollTop = Math.max(0, eventEl.offsetTop - SCROLL_MARGIN);
  }
}
