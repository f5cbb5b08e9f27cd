// Parse stored transcripts and derive per-step curves for side-by-side
// comparison of two sessions over the same gallery.

import type { TranscriptEvent } from "./api.js";

export interface ParsedTranscript {
  galleryId: string | null;
  label: string;
  events: TranscriptEvent[];
}

/**
 * Accepts either raw transcript JSON-lines (one event per line) or a console
 * export of the form {"gallery_id": ..., "events": [...]}.
 */
export function parseTranscript(text: string, label = "transcript"): ParsedTranscript {
  const trimmed = text.trim();
  if (!trimmed) return { galleryId: null, label, events: [] };
  if (trimmed.startsWith("{") && trimmed.includes('"events"')) {
    try {
      const doc = JSON.parse(trimmed) as { gallery_id?: string; events?: TranscriptEvent[] };
      if (Array.isArray(doc.events)) {
        return { galleryId: doc.gallery_id ?? null, label, events: doc.events };
      }
    } catch {
      // fall through to JSONL parsing
    }
  }
  const events: TranscriptEvent[] = [];
  for (const line of trimmed.split("\n")) {
    if (!line.trim()) continue;
    events.push(JSON.parse(line) as TranscriptEvent);
  }
  return { galleryId: null, label, events };
}

/** Entropy after each answered question. */
export function entropyCurve(transcript: ParsedTranscript): number[] {
  return transcript.events
    .filter((e) => e.event === "answer" && e.entropy !== undefined)
    .map((e) => e.entropy as number);
}

/**
 * Position (1-based) of the target image inside each answer's top-k
 * snapshot; null when it fell outside the snapshot at that step.
 */
export function targetPositionCurve(
  transcript: ParsedTranscript,
  targetImageId: number,
): Array<number | null> {
  return transcript.events
    .filter((e) => e.event === "answer" && Array.isArray(e.topk))
    .map((e) => {
      const index = (e.topk as number[]).indexOf(targetImageId);
      return index === -1 ? null : index + 1;
    });
}

export function stopReason(transcript: ParsedTranscript): string | null {
  for (let i = transcript.events.length - 1; i >= 0; i -= 1) {
    const event = transcript.events[i];
    if (event.event === "stop") return event.reason ?? null;
  }
  return null;
}

/** Warn when the two transcripts demonstrably come from different galleries. */
export function compareWarning(a: ParsedTranscript, b: ParsedTranscript): string | null {
  if (a.events.length === 0 || b.events.length === 0) return null;
  if (a.galleryId && b.galleryId && a.galleryId !== b.galleryId) {
    return `Transcripts come from different galleries (${a.galleryId} vs ${b.galleryId}); curves are not comparable.`;
  }
  return null;
}

export interface CurvePoint {
  x: number;
  y: number;
}

/** Map a curve to SVG polyline points inside a width x height box. */
export function curveToPoints(
  curve: Array<number | null>,
  width: number,
  height: number,
  yMax: number,
): CurvePoint[] {
  const points: CurvePoint[] = [];
  const steps = Math.max(curve.length - 1, 1);
  curve.forEach((value, i) => {
    if (value === null) return;
    points.push({
      x: (i / steps) * (width - 10) + 5,
      y: height - 5 - (Math.min(value, yMax) / yMax) * (height - 10),
    });
  });
  return points;
}
