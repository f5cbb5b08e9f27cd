import { describe, expect, it } from "vitest";

import {
  constraintsFromSelection,
  parseOrderInput,
  projectSession,
  recordSummary,
  timelineRows,
  validateSelection,
} from "../src/view.js";
import { sessionResponse, TINY_GALLERY } from "./fixtures.js";

describe("answer selection", () => {
  it("drops unknown facets and keeps chosen ones", () => {
    expect(constraintsFromSelection({ 1: "a", 2: "", 3: "p" })).toEqual({
      "1": ["a"],
      "3": ["p"],
    });
  });

  it("blocks a submission with nothing selected", () => {
    expect(validateSelection({ 1: "", 2: "" })).toMatch(/at least one attribute/);
    expect(validateSelection({ 1: "a", 2: "" })).toBeNull();
  });
});

describe("session projection", () => {
  it("shows the pending question and candidates from the response", () => {
    const view = projectSession(sessionResponse(), TINY_GALLERY);
    expect(view.pendingQuestion?.id).toBe(2);
    expect(view.done).toBe(false);
    expect(view.topk.map((c) => c.imageId)).toEqual([1, 2, 5]);
    expect(view.topk[0].summary).toContain("f1: a");
    expect(view.entropy).toBeCloseTo(Math.log(3), 9);
    expect(view.timeline.map((r) => r.t)).toEqual([0, 1, 2]);
  });

  it("is a pure function of the response (refresh rebuilds the same view)", () => {
    const a = projectSession(sessionResponse(), TINY_GALLERY);
    const b = projectSession(sessionResponse(), TINY_GALLERY);
    expect(b).toEqual(a);
  });

  it("projects the finished state with a stop reason", () => {
    const view = projectSession(
      sessionResponse({
        done: true,
        status: "done",
        stop_reason: "budget_met",
        next_question: null,
      }),
      TINY_GALLERY,
    );
    expect(view.pendingQuestion).toBeNull();
    expect(view.stopReason).toBe("budget_met");
  });

  it("keeps every displayed number from the payload", () => {
    const payload = sessionResponse();
    const view = projectSession(payload, TINY_GALLERY);
    expect(view.entropy).toBe(payload.entropy);
    expect(view.budget).toBe(payload.budget);
    expect(view.topk.map((c) => c.score)).toEqual(payload.topk.map((t) => t.score));
  });
});

describe("helpers", () => {
  it("summarises records facet by facet", () => {
    expect(recordSummary(TINY_GALLERY, TINY_GALLERY.records[0])).toBe("f1: a · f2: x · f3: p");
  });

  it("renders timeline rows for every event kind", () => {
    const rows = timelineRows(sessionResponse().events);
    expect(rows[0].text).toContain("asked question 1");
    expect(rows[1].text).toContain("answered q1");
    expect(rows[1].text).toContain("entropy");
  });

  it("parses order input with a fallback", () => {
    expect(parseOrderInput("2, 1,3", [1, 2, 3])).toEqual([2, 1, 3]);
    expect(parseOrderInput("   ", [1, 2, 3])).toEqual([1, 2, 3]);
    expect(() => parseOrderInput("2,x", [1])).toThrow(/comma-separated/);
  });
});
