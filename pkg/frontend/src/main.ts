/**
 * Dashboard bootstrap: wires the selectors, tabs, and view container to the
 * pure state machine and the API client.
 */

import { ApiClient } from "./api.js";
import {
  initialState,
  transition,
  type AppEvent,
  type ViewState,
} from "./state.js";
import { showView, type ViewDom } from "./views.js";
import type { FitMode, ViewName } from "./types.js";

const VIEWS: ViewName[] = ["progress", "fretboard", "compare", "similarity", "roles"];

export class App {
  state: ViewState = initialState();
  /** Resolves when the most recent render settles; tests await this. */
  pending: Promise<void> = Promise.resolve();

  constructor(
    readonly client: ApiClient,
    readonly root: Document = document,
  ) {}

  private el<T extends HTMLElement>(id: string): T {
    const node = this.root.getElementById(id);
    if (node === null) throw new Error(`missing element #${id}`);
    return node as T;
  }

  dispatch(event: AppEvent): void {
    const next = transition(this.state, event);
    if (next === this.state) return;
    this.state = next;
    this.renderChrome();
    this.pending = this.renderView();
  }

  async start(): Promise<void> {
    this.el<HTMLElement>("retry").addEventListener("click", () => {
      void this.loadOverview();
    });
    for (const view of VIEWS) {
      this.el<HTMLElement>(`tab-${view}`).addEventListener("click", () => {
        this.dispatch({ kind: "selectView", view });
      });
    }
    this.el<HTMLSelectElement>("exercise").addEventListener("change", (event) => {
      const value = (event.target as HTMLSelectElement).value;
      this.dispatch({ kind: "selectExercise", exercise: value });
    });
    this.el<HTMLSelectElement>("fit").addEventListener("change", (event) => {
      const value = (event.target as HTMLSelectElement).value as FitMode;
      this.dispatch({ kind: "setFitMode", fit: value });
    });
    this.el<HTMLElement>("clear-recordings").addEventListener("click", () => {
      this.dispatch({ kind: "clearRecordings" });
    });
    await this.loadOverview();
  }

  async loadOverview(): Promise<void> {
    const banner = this.el<HTMLElement>("error-banner");
    try {
      const [players, exercises] = await Promise.all([
        this.client.players(),
        this.client.exercises(),
      ]);
      banner.hidden = true;
      this.dispatch({
        kind: "overviewLoaded",
        players: players.players,
        exercises: exercises.exercises,
      });
    } catch (error) {
      this.el<HTMLElement>("error-message").textContent =
        `could not reach the practice catalog: ${String(error)}`;
      banner.hidden = false;
    }
  }

  renderChrome(): void {
    const exerciseSelect = this.el<HTMLSelectElement>("exercise");
    exerciseSelect.replaceChildren(
      ...this.state.exercises.map((name) => {
        const option = this.root.createElement("option");
        option.value = name;
        option.textContent = name;
        option.selected = name === this.state.selectedExercise;
        return option;
      }),
    );

    const playerBox = this.el<HTMLElement>("players");
    playerBox.replaceChildren(
      ...this.state.players.map((name) => {
        const label = this.root.createElement("label");
        const box = this.root.createElement("input");
        box.type = "checkbox";
        box.checked = this.state.selectedPlayers.includes(name);
        box.addEventListener("change", () => {
          this.dispatch({ kind: "togglePlayer", player: name });
        });
        label.append(box, ` ${name}`);
        const order = this.state.selectedPlayers.indexOf(name);
        if (order === 0) label.append(" (A)");
        if (order === 1) label.append(" (B)");
        return label;
      }),
    );

    for (const view of VIEWS) {
      this.el<HTMLElement>(`tab-${view}`).classList.toggle(
        "active",
        view === this.state.activeView,
      );
    }

    const selection = this.el<HTMLElement>("selection");
    selection.replaceChildren(
      ...this.state.selectedRecordings.map((rid) => {
        const item = this.root.createElement("li");
        item.textContent = rid;
        return item;
      }),
    );
  }

  async renderView(): Promise<void> {
    const dom: ViewDom = {
      container: this.el("view"),
      guidance: this.el("guidance"),
      detail: this.el("detail"),
      status: this.el("status"),
    };
    try {
      await showView(
        this.state,
        this.client,
        dom,
        () => this.state.revision,
        (recordingId) => this.dispatch({ kind: "selectRecording", recordingId }),
      );
    } catch (error) {
      dom.guidance.textContent = `view failed: ${String(error)}`;
      dom.guidance.hidden = false;
    }
  }
}

export function bootstrap(): App {
  const app = new App(new ApiClient(""));
  void app.start();
  return app;
}

declare global {
  interface Window {
    practiceScope?: App;
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined" && document.getElementById("view")) {
  window.practiceScope = bootstrap();
}
