/**
 * Typed client for the read-only story API.
 * All methods accept an AbortSignal so in-flight loads can be superseded.
 */

export type Span = [number, number];

export interface StoryEntry {
  id: string;
  title: string;
}

export interface ExplanationData {
  rationale: string;
  cues: Span[];
  unmatched_cues: string[];
}

export interface AnnotationData {
  character: string;
  pov: number;
  internal: number;
  external: number;
  perceptual: number;
  ideological: number;
  psychological: number;
  explanation?: ExplanationData;
}

export interface EventData {
  id: string;
  span: Span;
  location?: string;
  annotations: AnnotationData[];
}

export interface SceneData {
  id: string;
  title: string;
  span: Span;
  events: EventData[];
}

export interface StoryDocument {
  schema_version: string;
  id: string;
  title: string;
  author?: string;
  text: string;
  characters: { id: string; name: string }[];
  scenes: SceneData[];
}

export interface LayoutAnchor {
  event: string;
  character: string;
  x: number;
  y: number;
}

export interface LayoutCard {
  scene: string;
  x: number;
  y: number;
  width: number;
  height: number;
  plot_width: number;
  plot_height: number;
  label_width: number;
  title_height: number;
  events: { id: string; x: number }[];
  characters: { id: string; y: number }[];
  anchors: LayoutAnchor[];
}

export interface LayoutArrow {
  from: string;
  to: string;
  points: [number, number][];
}

export interface LayoutData {
  view: string;
  container_width: number;
  width: number;
  height: number;
  cards: LayoutCard[];
  arrows: LayoutArrow[];
}

export interface ExplanationResponse {
  story: string;
  scene: string;
  scene_span: Span;
  event: string;
  event_span: Span;
  character: string;
  rationale: string;
  cues: Span[];
  unmatched_cues: string[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  path: string;
}

export class ApiError extends Error {
  constructor(readonly status: number, readonly body: ApiErrorBody) {
    super(`${body.code}: ${body.message}`);
  }
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  private async get<T>(path: string, signal?: AbortSignal): Promise<T> {
    const response = await fetch(this.base + path, { signal });
    if (!response.ok) {
      const body = (await response.json()) as ApiErrorBody;
      throw new ApiError(response.status, body);
    }
    return (await response.json()) as T;
  }

  listStories(signal?: AbortSignal): Promise<StoryEntry[]> {
    return this.get("/api/stories", signal);
  }

  getStory(id: string, signal?: AbortSignal): Promise<StoryDocument> {
    return this.get(`/api/stories/${encodeURIComponent(id)}`, signal);
  }

  getLayout(id: string, view: string, width?: number,
            signal?: AbortSignal): Promise<LayoutData> {
    const params = new URLSearchParams({ view });
    if (width !== undefined) params.set("width", String(width));
    return this.get(`/api/stories/${encodeURIComponent(id)}/layout?${params}`, signal);
  }

  getExplanation(id: string, eventId: string, characterId: string,
                 signal?: AbortSignal): Promise<ExplanationResponse> {
    return this.get(
      `/api/stories/${encodeURIComponent(id)}/explanations/` +
        `${encodeURIComponent(eventId)}/${encodeURIComponent(characterId)}`,
      signal);
  }
}
