// DOM-level tests of the session loop against a scripted fake API.

import { beforeEach, describe, expect, it } from "vitest";

import type {
  AnswerResponse,
  ApiClient,
  SessionCreated,
  SessionParams,
  SessionResponse,
} from "../src/api.js";
import { ApiError } from "../src/api.js";
import { bindFlowElements, SessionFlow } from "../src/flow.js";
import { loadPageDom, sessionResponse, TINY_GALLERY } from "./fixtures.js";

class FakeApi {
  answered: Array<{ questionId: number; constraints: Record<string, string[]> }> = [];
  private current: SessionResponse = sessionResponse({ asked: [], entropy: null, entropy_trace: [], topk: [], events: [{ t: 0, event: "ask", question_id: 1 }], next_question: { id: 1, prompt: "Describe the first attribute." }, constraints: {} });
  failNext: ApiError | null = null;

  async createSession(_params: SessionParams): Promise<SessionCreated> {
    return {
      session_id: "s0001",
      gallery_id: "gtest",
      done: false,
      budget: 0.5,
      k: 5,
      next_question: { id: 1, prompt: "Describe the first attribute." },
    };
  }

  async getSession(_sessionId: string): Promise<SessionResponse> {
    return structuredClone(this.current);
  }

  async postAnswer(
    _sessionId: string,
    questionId: number,
    constraints: Record<string, string[]>,
  ): Promise<AnswerResponse> {
    if (this.failNext) {
      const error = this.failNext;
      this.failNext = null;
      throw error;
    }
    this.answered.push({ questionId, constraints });
    this.current = sessionResponse(); // answered question 1, question 2 pending
    return {
      entropy: this.current.entropy,
      topk: this.current.topk,
      done: false,
      stop_reason: null,
      next_question: this.current.next_question,
    };
  }

  finish(): void {
    this.current = sessionResponse({
      done: true,
      status: "done",
      stop_reason: "budget_met",
      next_question: null,
      asked: [1, 2],
    });
  }

  asClient(): ApiClient {
    return this as unknown as ApiClient;
  }
}

function selectValue(facetId: number, value: string): void {
  const select = document.querySelector<HTMLSelectElement>(
    `#answer-facets select[data-facet-id="${facetId}"]`,
  );
  if (!select) throw new Error(`no select for facet ${facetId}`);
  select.value = value;
}

describe("SessionFlow", () => {
  let api: FakeApi;
  let flow: SessionFlow;

  beforeEach(async () => {
    loadPageDom();
    api = new FakeApi();
    flow = new SessionFlow(api.asClient(), bindFlowElements(document));
    await flow.start(TINY_GALLERY, {
      gallery_id: "gtest",
      budget: 0.5,
      order: [1, 2, 3],
      scorer: { kind: "ideal" },
      k: 5,
    });
  });

  it("renders the pending question with one selector per facet", () => {
    expect(document.querySelector("#question-prompt")?.textContent).toContain(
      "Describe the first attribute.",
    );
    const selects = document.querySelectorAll("#answer-facets select");
    expect(selects).toHaveLength(1);
    const options = [...selects[0].querySelectorAll("option")].map((o) => o.textContent);
    expect(options).toEqual(["(unknown)", "a", "b"]);
  });

  it("blocks submission when nothing is selected", async () => {
    const view = await flow.submitCurrent();
    expect(view).toBeNull();
    expect(api.answered).toHaveLength(0);
    const banner = document.querySelector<HTMLElement>("#error-banner");
    expect(banner?.hidden).toBe(false);
    expect(banner?.textContent).toContain("at least one attribute");
  });

  it("submits the selected constraints and advances to the next question", async () => {
    selectValue(1, "a");
    const view = await flow.submitCurrent();
    expect(api.answered).toEqual([{ questionId: 1, constraints: { "1": ["a"] } }]);
    expect(view?.pendingQuestion?.id).toBe(2);
    expect(document.querySelector("#question-prompt")?.textContent).toContain("second attribute");
    const cards = document.querySelectorAll("#topk-cards .candidate-card");
    expect(cards).toHaveLength(3);
    expect(cards[0].textContent).toContain("image 1");
  });

  it("shows the stop banner when the session finishes", async () => {
    selectValue(1, "a");
    await flow.submitCurrent();
    api.finish();
    const view = await flow.refresh();
    expect(view.done).toBe(true);
    const banner = document.querySelector<HTMLElement>("#done-banner");
    expect(banner?.hidden).toBe(false);
    expect(banner?.textContent).toContain("budget_met");
    expect(document.querySelector<HTMLButtonElement>("#btn-submit")?.disabled).toBe(true);
  });

  it("keeps the session alive and shows a banner on API errors", async () => {
    api.failNext = new ApiError(400, "answer to question 1 constrains foreign facet 3");
    selectValue(1, "a");
    const view = await flow.submitCurrent();
    expect(view).toBeNull();
    const banner = document.querySelector<HTMLElement>("#error-banner");
    expect(banner?.hidden).toBe(false);
    expect(banner?.textContent).toContain("foreign facet");
    // still able to answer afterwards
    selectValue(1, "a");
    const retry = await flow.submitCurrent();
    expect(retry?.pendingQuestion?.id).toBe(2);
  });

  it("refresh reconstructs the identical view from the server state", async () => {
    selectValue(1, "a");
    const afterSubmit = await flow.submitCurrent();
    const afterRefresh = await flow.refresh();
    expect(afterRefresh).toEqual(afterSubmit);
  });

  it("a fresh flow resuming the same session rebuilds the identical view", async () => {
    selectValue(1, "a");
    const live = await flow.submitCurrent();
    loadPageDom(); // simulate a page reload
    const resumed = new SessionFlow(api.asClient(), bindFlowElements(document));
    const view = await resumed.resume(TINY_GALLERY, "s0001");
    expect(view).toEqual(live);
    expect(document.querySelector("#question-prompt")?.textContent).toContain("second attribute");
  });

  it("renders the entropy gauge with a budget marker", async () => {
    selectValue(1, "a");
    await flow.submitCurrent();
    expect(document.querySelectorAll("#entropy-gauge rect").length).toBe(2);
    expect(document.querySelectorAll("#entropy-gauge line").length).toBe(1);
    expect(document.querySelector("#gauge-label")?.textContent).toContain("budget 0.500");
  });
});
