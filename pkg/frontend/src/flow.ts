// The interactive session loop: create a session, render each pending
// question, post structured answers, and repaint ranked candidates, the
// entropy gauge, and the timeline from every response. One request is in
// flight at a time; controls stay disabled while waiting.

import { ApiClient, ApiError } from "./api.js";
import type { GalleryDoc, RecordDoc, SessionParams, SessionResponse } from "./api.js";
import {
  constraintsFromSelection,
  projectSession,
  validateSelection,
} from "./view.js";
import type { SessionViewModel } from "./view.js";
import {
  hideBanner,
  readAnswerSelection,
  renderAnswerControls,
  renderGauge,
  renderTimeline,
  renderTopk,
  showBanner,
} from "./ui.js";

export interface FlowElements {
  questionPrompt: HTMLElement;
  answerFacets: HTMLElement;
  submitButton: HTMLButtonElement;
  errorBanner: HTMLElement;
  doneBanner: HTMLElement;
  gauge: SVGSVGElement;
  gaugeLabel: HTMLElement;
  topk: HTMLElement;
  timeline: HTMLElement;
}

export function bindFlowElements(root: Document | HTMLElement): FlowElements {
  const find = <T>(selector: string): T => {
    const node = (root as ParentNode).querySelector(selector);
    if (!node) throw new Error(`missing element ${selector}`);
    return node as T;
  };
  return {
    questionPrompt: find<HTMLElement>("#question-prompt"),
    answerFacets: find<HTMLElement>("#answer-facets"),
    submitButton: find<HTMLButtonElement>("#btn-submit"),
    errorBanner: find<HTMLElement>("#error-banner"),
    doneBanner: find<HTMLElement>("#done-banner"),
    gauge: find<SVGSVGElement>("#entropy-gauge"),
    gaugeLabel: find<HTMLElement>("#gauge-label"),
    topk: find<HTMLElement>("#topk-cards"),
    timeline: find<HTMLElement>("#timeline"),
  };
}

export class SessionFlow {
  sessionId: string | null = null;
  gallery: GalleryDoc | null = null;
  private busy = false;

  constructor(
    private readonly api: ApiClient,
    private readonly elements: FlowElements,
  ) {}

  get isBusy(): boolean {
    return this.busy;
  }

  async start(gallery: GalleryDoc, params: SessionParams): Promise<void> {
    this.gallery = gallery;
    const created = await this.api.createSession(params);
    this.sessionId = created.session_id;
    await this.refresh();
  }

  /** Reattach to an existing session, e.g. after a page reload. */
  async resume(gallery: GalleryDoc, sessionId: string): Promise<SessionViewModel> {
    this.gallery = gallery;
    this.sessionId = sessionId;
    return this.refresh();
  }

  /** Re-fetch the session and rebuild the whole view from the response. */
  async refresh(): Promise<SessionViewModel> {
    if (!this.sessionId || !this.gallery) throw new Error("no active session");
    const session = await this.api.getSession(this.sessionId);
    return this.render(session);
  }

  private render(session: SessionResponse): SessionViewModel {
    if (!this.gallery) throw new Error("no gallery loaded");
    const view = projectSession(session, this.gallery);
    const { elements } = this;

    if (view.pendingQuestion) {
      elements.questionPrompt.textContent =
        `Q${view.pendingQuestion.id}: ${view.pendingQuestion.prompt}`;
      renderAnswerControls(elements.answerFacets, this.gallery, view.pendingQuestion);
      elements.submitButton.disabled = false;
      elements.doneBanner.hidden = true;
    } else {
      elements.questionPrompt.textContent = "No question pending.";
      renderAnswerControls(elements.answerFacets, this.gallery, { id: 0, prompt: "", facets: [] });
      elements.submitButton.disabled = true;
    }

    if (view.done) {
      showBanner(
        elements.doneBanner,
        `Session finished (${view.stopReason}) after ${view.asked.length} question(s).`,
        "info",
      );
    }

    renderGauge(elements.gauge, view);
    elements.gaugeLabel.textContent =
      view.entropy === null
        ? `entropy: — · budget ${view.budget.toFixed(3)} nats`
        : `entropy: ${view.entropy.toFixed(3)} · budget ${view.budget.toFixed(3)} nats`;
    renderTopk(elements.topk, view.topk);
    renderTimeline(elements.timeline, view.timeline);
    return view;
  }

  /**
   * Read the current facet selectors and submit them as the answer to the
   * pending question. Returns the refreshed view, or null when client-side
   * validation blocked the submission.
   */
  async submitCurrent(): Promise<SessionViewModel | null> {
    if (!this.sessionId || !this.gallery) throw new Error("no active session");
    if (this.busy) return null;
    const { elements } = this;
    hideBanner(elements.errorBanner);

    const selection = readAnswerSelection(elements.answerFacets);
    const validationError = validateSelection(selection);
    if (validationError) {
      showBanner(elements.errorBanner, validationError, "error");
      return null;
    }

    const session = await this.api.getSession(this.sessionId);
    if (!session.next_question) {
      showBanner(elements.errorBanner, "Session is already finished.", "error");
      return null;
    }

    this.busy = true;
    elements.submitButton.disabled = true;
    try {
      await this.api.postAnswer(
        this.sessionId,
        session.next_question.id,
        constraintsFromSelection(selection),
      );
      return await this.refresh();
    } catch (error) {
      // keep the session state; surface the problem inline
      const message = error instanceof ApiError ? error.message : String(error);
      showBanner(elements.errorBanner, message, "error");
      if (!(error instanceof ApiError)) throw error;
      return null;
    } finally {
      this.busy = false;
      elements.submitButton.disabled = false;
    }
  }

  async exportSession(): Promise<string> {
    if (!this.sessionId) throw new Error("no active session");
    const session = await this.api.getSession(this.sessionId);
    return JSON.stringify(
      {
        gallery_id: session.gallery_id,
        session_id: session.session_id,
        budget: session.budget,
        events: session.events,
      },
      null,
      2,
    );
  }
}

export function pickRandomTarget(gallery: GalleryDoc): RecordDoc {
  const index = Math.floor(Math.random() * gallery.records.length);
  return gallery.records[index];
}
