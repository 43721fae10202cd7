/**
 * Movable explanation panel. Once opened it stays visible across hovers and
 * can be dragged; the position survives until the panel is dismissed or the
 * story changes.
 */

import type { ExplanationResponse } from "./api.js";

export const EMPTY_RATIONALE_NOTICE = "No rationale was recorded for this annotation.";

export class ExplanationPanel {
  readonly element: HTMLElement;
  private dragOffset: { x: number; y: number } | null = null;

  constructor(host: HTMLElement) {
    const owner = host.ownerDocument;
    this.element = owner.createElement("aside");
    this.element.className = "explanation-panel";
    this.element.hidden = true;

    const header = owner.createElement("header");
    header.className = "explanation-header";
    const title = owner.createElement("span");
    title.className = "explanation-title";
    header.appendChild(title);
    const close = owner.createElement("button");
    close.className = "explanation-close";
    close.textContent = "×";
    close.addEventListener("click", () => this.close());
    header.appendChild(close);
    this.element.appendChild(header);

    const body = owner.createElement("p");
    body.className = "explanation-body";
    this.element.appendChild(body);

    header.addEventListener("pointerdown", (event) => this.startDrag(event));
    owner.addEventListener("pointermove", (event) => this.drag(event));
    owner.addEventListener("pointerup", () => (this.dragOffset = null));

    host.appendChild(this.element);
    this.setPosition(24, 24);
  }

  open(payload: ExplanationResponse, characterName: string): void {
    const title = this.element.querySelector(".explanation-title") as HTMLElement;
    const body = this.element.querySelector(".explanation-body") as HTMLElement;
    title.textContent = `${characterName} · event ${payload.event}`;
    if (payload.rationale) {
      body.textContent = payload.rationale;
      body.classList.remove("explanation-empty");
    } else {
      body.textContent = EMPTY_RATIONALE_NOTICE;
      body.classList.add("explanation-empty");
    }
    this.element.hidden = false;
  }

  close(): void {
    this.element.hidden = true;
  }

  get isOpen(): boolean {
    return !this.element.hidden;
  }

  get position(): { x: number; y: number } {
    return {
      x: parseFloat(this.element.style.left || "0"),
      y: parseFloat(this.element.style.top || "0")
    };
  }

  setPosition(x: number, y: number): void {
    this.element.style.left = `${x}px`;
    this.element.style.top = `${y}px`;
  }

  private startDrag(event: PointerEvent): void {
    const pos = this.position;
    this.dragOffset = { x: event.clientX - pos.x, y: event.clientY - pos.y };
  }

  private drag(event: PointerEvent): void {
    if (!this.dragOffset) return;
    this.setPosition(event.clientX - this.dragOffset.x,
                     event.clientY - this.dragOffset.y);
  }
}
