// The 5-record reference gallery shared with the backend test suite, plus
// DOM bootstrapping helpers for flow tests.

import { readFileSync } from "node:fs";
import { join } from "node:path";
import type { GalleryDoc, SessionResponse } from "../src/api.js";

export const TINY_GALLERY: GalleryDoc = {
  seed: 0,
  schema: {
    facets: [
      { id: 1, name: "f1", domain: ["a", "b"] },
      { id: 2, name: "f2", domain: ["x", "y"] },
      { id: 3, name: "f3", domain: ["p", "q"] },
    ],
    questions: [
      { id: 1, prompt: "Describe the first attribute.", facets: [1] },
      { id: 2, prompt: "Describe the second attribute.", facets: [2] },
      { id: 3, prompt: "Describe the third attribute.", facets: [3] },
    ],
  },
  records: [
    { image_id: 1, identity: 1, values: { "1": "a", "2": "x", "3": "p" } },
    { image_id: 2, identity: 2, values: { "1": "a", "2": "y", "3": "p" } },
    { image_id: 3, identity: 3, values: { "1": "b", "2": "x", "3": "p" } },
    { image_id: 4, identity: 4, values: { "1": "b", "2": "y", "3": "q" } },
    { image_id: 5, identity: 5, values: { "1": "a", "2": "x", "3": "q" } },
  ],
};

/** Truthful answers for identity 1, keyed by question id. */
export const TINY_TRUTHFUL_ANSWERS: Record<number, Record<string, string[]>> = {
  1: { "1": ["a"] },
  2: { "2": ["x"] },
  3: { "3": ["p"] },
};

export function loadPageDom(): void {
  // vitest runs with cwd = frontend/, where index.html lives
  const html = readFileSync(join(process.cwd(), "index.html"), "utf-8");
  const body = html.match(/<body>([\s\S]*)<\/body>/)?.[1] ?? "";
  document.body.innerHTML = body;
}

export function sessionResponse(overrides: Partial<SessionResponse> = {}): SessionResponse {
  return {
    session_id: "s0001",
    gallery_id: "gtest",
    status: "awaiting_answer",
    done: false,
    stop_reason: null,
    budget: 0.5,
    k: 5,
    order: [1, 2, 3],
    asked: [1],
    entropy: 1.0986122886681096,
    entropy_trace: [1.0986122886681096],
    constraints: { "1": ["a"] },
    topk: [
      { image_id: 1, score: 1.0 },
      { image_id: 2, score: 1.0 },
      { image_id: 5, score: 1.0 },
    ],
    next_question: { id: 2, prompt: "Describe the second attribute." },
    events: [
      { t: 0, event: "ask", question_id: 1 },
      {
        t: 1,
        event: "answer",
        question_id: 1,
        constraints: { "1": ["a"] },
        entropy: 1.0986122886681096,
        topk: [1, 2, 5, 3, 4],
      },
      { t: 2, event: "ask", question_id: 2 },
    ],
    ...overrides,
  };
}
