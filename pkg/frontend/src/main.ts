// Page wiring: gallery setup, target assignment, the live session loop,
// and the transcript comparison panel.

import { ApiClient, ApiError } from "./api.js";
import type { GalleryDoc, RecordDoc } from "./api.js";
import { bindFlowElements, pickRandomTarget, SessionFlow } from "./flow.js";
import {
  compareWarning,
  entropyCurve,
  parseTranscript,
  stopReason,
  targetPositionCurve,
} from "./compare.js";
import { parseOrderInput, recordSummary } from "./view.js";
import { hideBanner, renderCurves, renderTargetCards, showBanner } from "./ui.js";
import type { NamedCurve } from "./ui.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
};

let api = new ApiClient("http://127.0.0.1:8000");
let gallery: GalleryDoc | null = null;
let galleryId: string | null = null;
let target: RecordDoc | null = null;
let flow: SessionFlow | null = null;

const setupBanner = $("setup-banner");
const targetBanner = $("target-banner");

function refreshApiBase(): void {
  api = new ApiClient(($("api-base") as HTMLInputElement).value.replace(/\/$/, ""));
}

async function loadGallery(body: GalleryDoc | { generate: { n: number; identities: number; seed: number } }) {
  refreshApiBase();
  hideBanner(setupBanner);
  try {
    const created = await api.createGallery(body);
    galleryId = created.gallery_id;
    gallery = await api.getGallery(galleryId);
    $("gallery-info").textContent =
      `gallery ${created.gallery_id}: ${created.n} images, ${created.identities} identities (seed ${created.seed})`;
    renderTargetCards($("target-cards"), gallery, assignTarget);
    showBanner(setupBanner, "Gallery loaded. Pick a target or let the console pick one.", "info");
  } catch (error) {
    showBanner(setupBanner, error instanceof ApiError ? error.message : String(error), "error");
  }
}

function assignTarget(record: RecordDoc): void {
  if (!gallery) return;
  target = record;
  showBanner(
    targetBanner,
    `Target: image ${record.image_id} (identity ${record.identity}) — ${recordSummary(gallery, record)}`,
    "info",
  );
}

function syncHash(): void {
  if (galleryId && flow?.sessionId) {
    window.location.hash = `gid=${galleryId}&sid=${flow.sessionId}`;
  }
}

/** Reattach to the session named in the URL; the view is rebuilt from GET alone. */
async function resumeFromHash(): Promise<void> {
  const params = new URLSearchParams(window.location.hash.slice(1));
  const gid = params.get("gid");
  const sid = params.get("sid");
  if (!gid || !sid) return;
  refreshApiBase();
  try {
    gallery = await api.getGallery(gid);
    galleryId = gid;
    renderTargetCards($("target-cards"), gallery, assignTarget);
    flow = new SessionFlow(api, bindFlowElements(document));
    await flow.resume(gallery, sid);
    $("session-panel").hidden = false;
    showBanner(setupBanner, `Resumed session ${sid}.`, "info");
  } catch (error) {
    showBanner(setupBanner, error instanceof ApiError ? error.message : String(error), "error");
  }
}

async function startSession(): Promise<void> {
  refreshApiBase();
  hideBanner(setupBanner);
  if (!gallery || !galleryId) {
    showBanner(setupBanner, "Load a gallery first.", "error");
    return;
  }
  if (!target) assignTarget(pickRandomTarget(gallery));
  const scorerKind = ($("param-scorer") as HTMLSelectElement).value;
  const scorer =
    scorerKind === "noisy"
      ? { kind: "noisy", epsilon: Number(($("param-epsilon") as HTMLInputElement).value) }
      : { kind: "ideal" };
  try {
    const order = parseOrderInput(
      ($("param-order") as HTMLInputElement).value,
      gallery.schema.questions.map((q) => q.id),
    );
    flow = new SessionFlow(api, bindFlowElements(document));
    await flow.start(gallery, {
      gallery_id: galleryId,
      budget: Number(($("param-budget") as HTMLInputElement).value),
      order,
      scorer,
      k: Number(($("param-k") as HTMLInputElement).value),
    });
    $("session-panel").hidden = false;
    syncHash();
  } catch (error) {
    showBanner(setupBanner, error instanceof ApiError ? error.message : String(error), "error");
  }
}

function renderComparison(): void {
  const warningNode = $("compare-warning");
  hideBanner(warningNode);
  const a = parseTranscript(($("cmp-a") as HTMLTextAreaElement).value, "A");
  const b = parseTranscript(($("cmp-b") as HTMLTextAreaElement).value, "B");
  if (a.events.length === 0 && b.events.length === 0) {
    showBanner(warningNode, "Paste two transcripts (JSON lines or console exports).", "info");
    return;
  }
  const warning = compareWarning(a, b);
  if (warning) showBanner(warningNode, warning, "error");

  const entropyA = entropyCurve(a);
  const entropyB = entropyCurve(b);
  const yMax = Math.max(1e-9, ...entropyA, ...entropyB);
  const curves: NamedCurve[] = [
    { label: "A", points: entropyA, className: "curve-a" },
    { label: "B", points: entropyB, className: "curve-b" },
  ];
  renderCurves($("compare-entropy") as unknown as SVGSVGElement, curves, yMax * 1.05);

  const targetText = ($("cmp-target") as HTMLInputElement).value.trim();
  if (targetText) {
    const imageId = Number.parseInt(targetText, 10);
    const positionA = targetPositionCurve(a, imageId);
    const positionB = targetPositionCurve(b, imageId);
    const positions = [...positionA, ...positionB].filter((v): v is number => v !== null);
    renderCurves(
      $("compare-rank") as unknown as SVGSVGElement,
      [
        { label: "A", points: positionA, className: "curve-a" },
        { label: "B", points: positionB, className: "curve-b" },
      ],
      Math.max(1, ...positions),
    );
    $("compare-rank-label").textContent =
      `target image ${imageId}: position in the top-k snapshot per step (gaps = outside top-k)`;
  }
  $("compare-summary").textContent =
    `A: ${entropyA.length} answers, stop=${stopReason(a) ?? "?"} · ` +
    `B: ${entropyB.length} answers, stop=${stopReason(b) ?? "?"}`;
}

function wire(): void {
  $("btn-generate").addEventListener("click", () => {
    void loadGallery({
      generate: {
        n: Number(($("gen-n") as HTMLInputElement).value),
        identities: Number(($("gen-k") as HTMLInputElement).value),
        seed: Number(($("gen-seed") as HTMLInputElement).value),
      },
    });
  });
  $("btn-load-gallery").addEventListener("click", () => {
    try {
      const doc = JSON.parse(($("gallery-json") as HTMLTextAreaElement).value) as GalleryDoc;
      void loadGallery(doc);
    } catch (error) {
      showBanner(setupBanner, `Gallery JSON does not parse: ${String(error)}`, "error");
    }
  });
  $("btn-surprise").addEventListener("click", () => {
    if (gallery) assignTarget(pickRandomTarget(gallery));
    else showBanner(setupBanner, "Load a gallery first.", "error");
  });
  $("btn-start").addEventListener("click", () => void startSession());
  $("btn-submit").addEventListener("click", () => void flow?.submitCurrent());
  $("btn-refresh").addEventListener("click", () => void flow?.refresh());
  $("btn-export").addEventListener("click", async () => {
    if (!flow) return;
    ($("export-output") as HTMLTextAreaElement).value = await flow.exportSession();
  });
  $("btn-compare").addEventListener("click", renderComparison);
}

wire();
void resumeFromHash();
