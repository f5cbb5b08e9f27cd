// Pure projections from API payloads to what the page shows. Keeping these
// free of DOM and fetch makes the view state a function of the last
// response: re-fetching a session and re-projecting rebuilds the same view.

import type {
  FacetDoc,
  GalleryDoc,
  QuestionDoc,
  RecordDoc,
  SessionResponse,
  TopkEntry,
  TranscriptEvent,
} from "./api.js";

export type AnswerSelection = Record<number, string | "">;

export interface CandidateCard {
  imageId: number;
  identity: number;
  score: number;
  summary: string;
}

export interface TimelineRow {
  t: number;
  text: string;
}

export interface SessionViewModel {
  done: boolean;
  stopReason: string | null;
  pendingQuestion: QuestionDoc | null;
  asked: number[];
  entropy: number | null;
  entropyTrace: number[];
  budget: number;
  gaugeCeiling: number;
  topk: CandidateCard[];
  timeline: TimelineRow[];
}

export function questionById(gallery: GalleryDoc, id: number): QuestionDoc {
  const question = gallery.schema.questions.find((q) => q.id === id);
  if (!question) throw new Error(`gallery has no question ${id}`);
  return question;
}

export function facetById(gallery: GalleryDoc, id: number): FacetDoc {
  const facet = gallery.schema.facets.find((f) => f.id === id);
  if (!facet) throw new Error(`gallery has no facet ${id}`);
  return facet;
}

export function recordById(gallery: GalleryDoc, imageId: number): RecordDoc {
  const record = gallery.records.find((r) => r.image_id === imageId);
  if (!record) throw new Error(`gallery has no image ${imageId}`);
  return record;
}

export function recordSummary(gallery: GalleryDoc, record: RecordDoc): string {
  return gallery.schema.facets
    .map((facet) => `${facet.name}: ${record.values[String(facet.id)]}`)
    .join(" · ");
}

/** Drop "unknown" facets; the server treats missing facets as unconstrained. */
export function constraintsFromSelection(selection: AnswerSelection): Record<string, string[]> {
  const constraints: Record<string, string[]> = {};
  for (const [facetId, value] of Object.entries(selection)) {
    if (value !== "") constraints[facetId] = [value];
  }
  return constraints;
}

/** Block submissions that constrain nothing at all. */
export function validateSelection(selection: AnswerSelection): string | null {
  const chosen = Object.values(selection).filter((v) => v !== "");
  if (chosen.length === 0) {
    return "Pick at least one attribute value (or abort the session).";
  }
  return null;
}

function candidateCards(gallery: GalleryDoc, topk: TopkEntry[]): CandidateCard[] {
  return topk.map((entry) => {
    const record = recordById(gallery, entry.image_id);
    return {
      imageId: entry.image_id,
      identity: record.identity,
      score: entry.score,
      summary: recordSummary(gallery, record),
    };
  });
}

export function timelineRows(events: TranscriptEvent[]): TimelineRow[] {
  return events.map((event) => {
    if (event.event === "ask") {
      return { t: event.t, text: `asked question ${event.question_id}` };
    }
    if (event.event === "answer") {
      const parts = Object.entries(event.constraints ?? {})
        .map(([facet, tokens]) => `${facet}=${tokens.join("|")}`)
        .join(", ");
      const entropy = event.entropy !== undefined ? ` → entropy ${event.entropy.toFixed(3)}` : "";
      return { t: event.t, text: `answered q${event.question_id}: {${parts || "unknown"}}${entropy}` };
    }
    return { t: event.t, text: `stopped: ${event.reason}` };
  });
}

export function projectSession(session: SessionResponse, gallery: GalleryDoc): SessionViewModel {
  // gauge ceiling: the largest uncertainty this gallery can show; axis
  // scaling only, the displayed numbers all come from the response
  const ceiling = Math.max(Math.log(gallery.records.length), session.budget, 1e-9);
  return {
    done: session.done,
    stopReason: session.stop_reason,
    pendingQuestion: session.next_question
      ? questionById(gallery, session.next_question.id)
      : null,
    asked: session.asked,
    entropy: session.entropy,
    entropyTrace: session.entropy_trace,
    budget: session.budget,
    gaugeCeiling: ceiling,
    topk: candidateCards(gallery, session.topk),
    timeline: timelineRows(session.events),
  };
}

export function parseOrderInput(text: string, fallback: number[]): number[] {
  const trimmed = text.trim();
  if (!trimmed) return fallback;
  const order = trimmed.split(",").map((part) => Number.parseInt(part.trim(), 10));
  if (order.some((q) => Number.isNaN(q))) {
    throw new Error(`order must be comma-separated question ids, got "${text}"`);
  }
  return order;
}
