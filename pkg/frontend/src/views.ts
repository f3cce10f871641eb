/**
 * View layer: fetches the active view's SVG (and JSON for hover/interaction)
 * and mounts it into the DOM.
 *
 * The SVG string returned by the API is stored and injected verbatim; the
 * client never rewrites analytics output. Responses arriving after the state
 * has moved on (revision mismatch) are dropped.
 */

import { ApiClient } from "./api.js";
import { requestFor, viewGuard, type ViewState } from "./state.js";
import type { ProgressData, SimilarityData } from "./types.js";

export interface ViewDom {
  container: HTMLElement;
  guidance: HTMLElement;
  detail: HTMLElement;
  status: HTMLElement;
}

export type GlyphClickHandler = (recordingId: string) => void;

/** Last raw SVG body mounted per view, for byte-identity checks. */
export const lastSvg = new Map<string, string>();

function formatDeviation(value: number | null): string {
  if (value === null) return "missed";
  const sign = value >= 0 ? "+" : "";
  return `${sign}${value.toFixed(3)} s (${value >= 0 ? "late" : "early"})`;
}

function attachProgressHover(
  container: HTMLElement,
  status: HTMLElement,
  data: ProgressData,
): void {
  container.addEventListener("mousemove", (event) => {
    const cell = (event.target as Element).closest?.("rect.cell");
    if (!(cell instanceof Element)) return;
    const ref = cell.getAttribute("data-ref");
    const rep = cell.getAttribute("data-rep");
    if (ref === null || rep === null) return;
    const value = data.deviations[Number(ref) * data.cols + Number(rep)];
    status.textContent = `note ${ref}, repetition ${rep}: ${formatDeviation(value)}`;
  });
}

function attachFretboardHover(container: HTMLElement, status: HTMLElement): void {
  container.addEventListener("mousemove", (event) => {
    const cell = (event.target as Element).closest?.("rect.cell");
    if (!(cell instanceof Element)) return;
    const string = cell.getAttribute("data-string");
    const fret = cell.getAttribute("data-fret");
    const count = cell.getAttribute("data-count");
    if (string === null || fret === null) return;
    status.textContent =
      `string ${string}, fret ${fret}` + (count !== null ? `: ${count} plays` : "");
  });
}

function attachGlyphClicks(
  container: HTMLElement,
  detail: HTMLElement,
  client: ApiClient,
  data: SimilarityData,
  onSelect: GlyphClickHandler,
): void {
  container.addEventListener("click", (event) => {
    const glyph = (event.target as Element).closest?.("g.glyph");
    if (!(glyph instanceof Element)) return;
    const index = Number(glyph.getAttribute("data-recording"));
    const recordingId = data.recordings[index];
    if (recordingId === undefined) return;
    void client
      .getSvg("/api/viz/fretboard", { recording: recordingId })
      .then((svg) => {
        detail.innerHTML = svg;
        detail.setAttribute("data-recording-id", recordingId);
      });
    onSelect(recordingId);
  });
}

/**
 * Render the active view. Guarded states show inline guidance and issue no
 * request. Returns once the view (or guidance) is in the DOM.
 */
export async function showView(
  state: ViewState,
  client: ApiClient,
  dom: ViewDom,
  currentRevision: () => number,
  onSelectRecording: GlyphClickHandler,
): Promise<void> {
  const guard = viewGuard(state);
  if (guard !== null) {
    dom.guidance.textContent = guard;
    dom.guidance.hidden = false;
    dom.container.replaceChildren();
    dom.detail.replaceChildren();
    return;
  }
  dom.guidance.hidden = true;

  const request = requestFor(state);
  if (request === null) return;
  const revision = state.revision;

  const svg = await client.getSvg(request.path, request.params);
  if (currentRevision() !== revision) return; // stale response, drop

  const mount = document.createElement("div");
  mount.innerHTML = svg;
  dom.container.replaceChildren(mount);
  lastSvg.set(state.activeView, svg);
  dom.status.textContent = "";
  if (state.activeView !== "similarity") {
    // the similarity detail panel (enlarged glyph) survives re-renders of
    // the same view, e.g. after a click adds a recording to the selection
    dom.detail.replaceChildren();
  }

  if (state.activeView === "progress") {
    const data = await client.progressData(request.params);
    if (currentRevision() !== revision) return;
    attachProgressHover(mount, dom.status, data);
  } else if (state.activeView === "fretboard" || state.activeView === "compare") {
    attachFretboardHover(mount, dom.status);
  } else if (state.activeView === "similarity") {
    const data = await client.similarityData(request.params.exercise);
    if (currentRevision() !== revision) return;
    const outliers = data.layout.outliers.filter(Boolean).length;
    dom.status.textContent =
      `${data.recordings.length} recordings, stress ${data.layout.stress.toFixed(4)}, ` +
      `${outliers} outlier${outliers === 1 ? "" : "s"}`;
    attachGlyphClicks(mount, dom.detail, client, data, onSelectRecording);
  }
}
