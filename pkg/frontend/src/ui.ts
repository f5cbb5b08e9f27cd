// DOM rendering helpers. Everything here paints view models produced by
// view.ts; no fetches, no math beyond pixel layout.

import type { GalleryDoc, QuestionDoc, RecordDoc } from "./api.js";
import type { CandidateCard, SessionViewModel, TimelineRow } from "./view.js";
import { facetById, recordSummary } from "./view.js";
import { curveToPoints } from "./compare.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function clear(node: Element): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

export function showBanner(node: HTMLElement, message: string, kind: "error" | "info"): void {
  node.textContent = message;
  node.className = `banner ${kind}`;
  node.hidden = false;
}

export function hideBanner(node: HTMLElement): void {
  node.hidden = true;
  node.textContent = "";
}

/** One select per covered facet, each with a leading "unknown" option. */
export function renderAnswerControls(
  container: HTMLElement,
  gallery: GalleryDoc,
  question: QuestionDoc,
): void {
  const doc = container.ownerDocument;
  clear(container);
  for (const facetId of question.facets) {
    const facet = facetById(gallery, facetId);
    const label = el(doc, "label", "facet-label", `${facet.name} `);
    const select = el(doc, "select", "facet-select");
    select.dataset.facetId = String(facet.id);
    const unknown = el(doc, "option", undefined, "(unknown)");
    unknown.value = "";
    select.appendChild(unknown);
    for (const token of facet.domain) {
      const option = el(doc, "option", undefined, token);
      option.value = token;
      select.appendChild(option);
    }
    label.appendChild(select);
    container.appendChild(label);
  }
}

export function readAnswerSelection(container: HTMLElement): Record<number, string> {
  const selection: Record<number, string> = {};
  container.querySelectorAll<HTMLSelectElement>("select.facet-select").forEach((select) => {
    selection[Number(select.dataset.facetId)] = select.value;
  });
  return selection;
}

export function renderTopk(container: HTMLElement, cards: CandidateCard[]): void {
  const doc = container.ownerDocument;
  clear(container);
  cards.forEach((card, index) => {
    const div = el(doc, "div", "candidate-card");
    div.appendChild(el(doc, "div", "candidate-rank", `#${index + 1}`));
    div.appendChild(
      el(doc, "div", "candidate-title", `image ${card.imageId} · identity ${card.identity}`),
    );
    div.appendChild(el(doc, "div", "candidate-score", `score ${card.score.toFixed(3)}`));
    div.appendChild(el(doc, "div", "candidate-summary", card.summary));
    container.appendChild(div);
  });
}

/** Horizontal gauge: filled to the current entropy, marker at the budget. */
export function renderGauge(svg: SVGSVGElement, view: SessionViewModel): void {
  const doc = svg.ownerDocument;
  clear(svg);
  const width = 320;
  const height = 26;
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);

  const track = doc.createElementNS(SVG_NS, "rect");
  track.setAttribute("x", "0");
  track.setAttribute("y", "6");
  track.setAttribute("width", String(width));
  track.setAttribute("height", "14");
  track.setAttribute("class", "gauge-track");
  svg.appendChild(track);

  const entropy = view.entropy ?? view.gaugeCeiling;
  const fillWidth = Math.max(0, Math.min(1, entropy / view.gaugeCeiling)) * width;
  const fill = doc.createElementNS(SVG_NS, "rect");
  fill.setAttribute("x", "0");
  fill.setAttribute("y", "6");
  fill.setAttribute("width", String(fillWidth));
  fill.setAttribute("height", "14");
  fill.setAttribute("class", entropy <= view.budget ? "gauge-fill met" : "gauge-fill");
  svg.appendChild(fill);

  const markerX = Math.max(0, Math.min(1, view.budget / view.gaugeCeiling)) * width;
  const marker = doc.createElementNS(SVG_NS, "line");
  marker.setAttribute("x1", String(markerX));
  marker.setAttribute("x2", String(markerX));
  marker.setAttribute("y1", "0");
  marker.setAttribute("y2", String(height));
  marker.setAttribute("class", "gauge-budget");
  svg.appendChild(marker);
}

export function renderTimeline(list: HTMLElement, rows: TimelineRow[]): void {
  const doc = list.ownerDocument;
  clear(list);
  for (const row of rows) {
    list.appendChild(el(doc, "li", "timeline-row", `[${row.t}] ${row.text}`));
  }
}

export function renderTargetCards(
  container: HTMLElement,
  gallery: GalleryDoc,
  onPick: (record: RecordDoc) => void,
): void {
  const doc = container.ownerDocument;
  clear(container);
  for (const record of gallery.records) {
    const button = el(doc, "button", "target-card");
    button.type = "button";
    button.dataset.imageId = String(record.image_id);
    button.appendChild(
      el(doc, "div", "candidate-title", `image ${record.image_id} · identity ${record.identity}`),
    );
    button.appendChild(el(doc, "div", "candidate-summary", recordSummary(gallery, record)));
    button.addEventListener("click", () => onPick(record));
    container.appendChild(button);
  }
}

export interface NamedCurve {
  label: string;
  points: Array<number | null>;
  className: string;
}

export function renderCurves(svg: SVGSVGElement, curves: NamedCurve[], yMax: number): void {
  const doc = svg.ownerDocument;
  clear(svg);
  const width = 360;
  const height = 180;
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  const axis = doc.createElementNS(SVG_NS, "rect");
  axis.setAttribute("x", "1");
  axis.setAttribute("y", "1");
  axis.setAttribute("width", String(width - 2));
  axis.setAttribute("height", String(height - 2));
  axis.setAttribute("class", "plot-frame");
  svg.appendChild(axis);
  for (const curve of curves) {
    const polyline = doc.createElementNS(SVG_NS, "polyline");
    const points = curveToPoints(curve.points, width, height, yMax)
      .map((p) => `${p.x.toFixed(1)},${p.y.toFixed(1)}`)
      .join(" ");
    polyline.setAttribute("points", points);
    polyline.setAttribute("class", `plot-line ${curve.className}`);
    svg.appendChild(polyline);
  }
}
