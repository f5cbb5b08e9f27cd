// Typed client for the /api/v1 endpoints. Every number the console shows
// comes out of these response payloads; nothing is recomputed client-side.

export interface FacetDoc {
  id: number;
  name: string;
  domain: string[];
}

export interface QuestionDoc {
  id: number;
  prompt: string;
  facets: number[];
}

export interface RecordDoc {
  image_id: number;
  identity: number;
  values: Record<string, string>;
}

export interface GalleryDoc {
  seed: number;
  schema: { facets: FacetDoc[]; questions: QuestionDoc[] };
  records: RecordDoc[];
}

export interface GalleryCreated {
  gallery_id: string;
  version: string;
  seed: number;
  n: number;
  identities: number;
}

export interface QuestionPayload {
  id: number;
  prompt: string;
}

export interface TopkEntry {
  image_id: number;
  score: number;
}

export interface AnswerResponse {
  entropy: number | null;
  topk: TopkEntry[];
  done: boolean;
  stop_reason: string | null;
  next_question: QuestionPayload | null;
}

export interface TranscriptEvent {
  t: number;
  event: "ask" | "answer" | "stop";
  question_id?: number;
  constraints?: Record<string, string[]>;
  entropy?: number;
  topk?: number[];
  reason?: string;
}

export interface SessionResponse {
  session_id: string;
  gallery_id: string;
  status: string;
  done: boolean;
  stop_reason: string | null;
  budget: number;
  k: number;
  order: number[];
  asked: number[];
  entropy: number | null;
  entropy_trace: number[];
  constraints: Record<string, string[]>;
  topk: TopkEntry[];
  next_question: QuestionPayload | null;
  events: TranscriptEvent[];
}

export interface SessionParams {
  gallery_id: string;
  budget: number;
  order: number[];
  scorer: { kind: string; epsilon?: number };
  k: number;
  seed?: number;
}

export interface SessionCreated {
  session_id: string;
  gallery_id: string;
  done: boolean;
  budget: number;
  k: number;
  next_question: QuestionPayload;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseError(response: Response): Promise<never> {
  let message = `HTTP ${response.status}`;
  try {
    const body = (await response.json()) as { detail?: { message?: string } };
    if (body.detail?.message) message = body.detail.message;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, message);
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  createGallery(doc: GalleryDoc | { generate: { n: number; identities: number; seed: number } }) {
    return this.post<GalleryCreated>("/api/v1/galleries", doc);
  }

  getGallery(galleryId: string) {
    return this.request<GalleryDoc & { gallery_id: string }>(`/api/v1/galleries/${galleryId}`);
  }

  createSession(params: SessionParams) {
    return this.post<SessionCreated>("/api/v1/sessions", params);
  }

  getSession(sessionId: string) {
    return this.request<SessionResponse>(`/api/v1/sessions/${sessionId}`);
  }

  postAnswer(sessionId: string, questionId: number, constraints: Record<string, string[]>) {
    return this.post<AnswerResponse>(`/api/v1/sessions/${sessionId}/answer`, {
      question_id: questionId,
      constraints,
    });
  }
}
