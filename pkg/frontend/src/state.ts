/**
 * Dashboard view state and its pure transition function.
 *
 * Every user interaction becomes an AppEvent; `transition(state, event)`
 * returns the next state without side effects, so sequences of interactions
 * are replayable in tests. The `revision` counter increments whenever the
 * state would require different data, letting the view layer drop stale
 * in-flight responses.
 */

import type { FitMode, ViewName } from "./types.js";

export interface ViewState {
  players: string[];
  exercises: string[];
  selectedExercise: string | null;
  /** Ordered selection; the first two define player A (red) and B (blue). */
  selectedPlayers: string[];
  selectedRecordings: string[];
  activeView: ViewName;
  fitMode: FitMode;
  revision: number;
}

export type AppEvent =
  | { kind: "overviewLoaded"; players: string[]; exercises: string[] }
  | { kind: "selectExercise"; exercise: string }
  | { kind: "togglePlayer"; player: string }
  | { kind: "selectView"; view: ViewName }
  | { kind: "setFitMode"; fit: FitMode }
  | { kind: "selectRecording"; recordingId: string }
  | { kind: "clearRecordings" };

export function initialState(): ViewState {
  return {
    players: [],
    exercises: [],
    selectedExercise: null,
    selectedPlayers: [],
    selectedRecordings: [],
    activeView: "progress",
    fitMode: "affine",
    revision: 0,
  };
}

export function transition(state: ViewState, event: AppEvent): ViewState {
  switch (event.kind) {
    case "overviewLoaded":
      return {
        ...state,
        players: [...event.players],
        exercises: [...event.exercises],
        // first exercise preselected
        selectedExercise: state.selectedExercise ?? event.exercises[0] ?? null,
        revision: state.revision + 1,
      };
    case "selectExercise":
      if (event.exercise === state.selectedExercise) return state;
      return {
        ...state,
        selectedExercise: event.exercise,
        selectedRecordings: [],
        revision: state.revision + 1,
      };
    case "togglePlayer": {
      const selected = state.selectedPlayers.includes(event.player)
        ? state.selectedPlayers.filter((p) => p !== event.player)
        : [...state.selectedPlayers, event.player];
      return { ...state, selectedPlayers: selected, revision: state.revision + 1 };
    }
    case "selectView":
      if (event.view === state.activeView) return state;
      return { ...state, activeView: event.view, revision: state.revision + 1 };
    case "setFitMode":
      if (event.fit === state.fitMode) return state;
      return { ...state, fitMode: event.fit, revision: state.revision + 1 };
    case "selectRecording":
      if (state.selectedRecordings.includes(event.recordingId)) return state;
      return {
        ...state,
        selectedRecordings: [...state.selectedRecordings, event.recordingId],
        revision: state.revision + 1,
      };
    case "clearRecordings":
      if (state.selectedRecordings.length === 0) return state;
      return { ...state, selectedRecordings: [], revision: state.revision + 1 };
  }
}

/**
 * Inline guidance when the active view's preconditions are unmet, else null.
 * No request may be issued while this returns a message.
 */
export function viewGuard(state: ViewState): string | null {
  if (state.selectedExercise === null) {
    return "select an exercise";
  }
  switch (state.activeView) {
    case "compare":
      return state.selectedPlayers.length === 2
        ? null
        : "select exactly two players to compare";
    case "progress":
    case "fretboard":
      if (state.selectedRecordings.length === 1 || state.selectedPlayers.length === 1) {
        return null;
      }
      return "select one player (or a single recording) first";
    case "similarity":
    case "roles":
      return null;
  }
}

export interface VizRequest {
  path: string;
  params: Record<string, string>;
}

/** The documented API request backing the active view, or null when guarded. */
export function requestFor(state: ViewState): VizRequest | null {
  if (viewGuard(state) !== null) return null;
  const exercise = state.selectedExercise as string;
  switch (state.activeView) {
    case "progress": {
      const params: Record<string, string> =
        state.selectedRecordings.length === 1
          ? { recording: state.selectedRecordings[0] }
          : { player: state.selectedPlayers[0], exercise };
      return { path: "/api/viz/progress", params: { ...params, fit: state.fitMode } };
    }
    case "fretboard": {
      const params: Record<string, string> =
        state.selectedRecordings.length === 1
          ? { recording: state.selectedRecordings[0] }
          : { player: state.selectedPlayers[0], exercise };
      return { path: "/api/viz/fretboard", params };
    }
    case "compare":
      return {
        path: "/api/viz/compare",
        params: {
          playerA: state.selectedPlayers[0],
          playerB: state.selectedPlayers[1],
          exercise,
        },
      };
    case "similarity":
      return { path: "/api/viz/similarity", params: { exercise } };
    case "roles": {
      const params: Record<string, string> = { exercise };
      if (state.selectedPlayers.length > 0) {
        params.players = state.selectedPlayers.join(",");
      }
      return { path: "/api/viz/roles", params };
    }
  }
}
