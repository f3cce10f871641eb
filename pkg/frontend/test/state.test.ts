import { describe, expect, it } from "vitest";

import {
  initialState,
  requestFor,
  transition,
  viewGuard,
  type AppEvent,
  type ViewState,
} from "../src/state";

function apply(events: AppEvent[], from: ViewState = initialState()): ViewState {
  return events.reduce(transition, from);
}

const overview: AppEvent = {
  kind: "overviewLoaded",
  players: ["alice", "bob", "eve"],
  exercises: ["blues-improv", "pentatonic-box"],
};

describe("transition", () => {
  it("preselects the first exercise on overview load", () => {
    const state = apply([overview]);
    expect(state.selectedExercise).toBe("blues-improv");
    expect(state.players).toEqual(["alice", "bob", "eve"]);
  });

  it("is pure and replayable", () => {
    const events: AppEvent[] = [
      overview,
      { kind: "togglePlayer", player: "alice" },
      { kind: "selectView", view: "compare" },
      { kind: "togglePlayer", player: "bob" },
    ];
    const a = apply(events);
    const b = apply(events);
    expect(a).toEqual(b);
    const start = initialState();
    apply(events, start);
    expect(start).toEqual(initialState()); // inputs never mutated
  });

  it("keeps player selection order (A then B)", () => {
    const state = apply([
      overview,
      { kind: "togglePlayer", player: "bob" },
      { kind: "togglePlayer", player: "alice" },
    ]);
    expect(state.selectedPlayers).toEqual(["bob", "alice"]);
  });

  it("toggling a player off removes it", () => {
    const state = apply([
      overview,
      { kind: "togglePlayer", player: "alice" },
      { kind: "togglePlayer", player: "alice" },
    ]);
    expect(state.selectedPlayers).toEqual([]);
  });

  it("recording selection is a set", () => {
    const state = apply([
      overview,
      { kind: "selectRecording", recordingId: "r1" },
      { kind: "selectRecording", recordingId: "r1" },
      { kind: "selectRecording", recordingId: "r2" },
    ]);
    expect(state.selectedRecordings).toEqual(["r1", "r2"]);
  });

  it("changing exercise clears selected recordings", () => {
    const state = apply([
      overview,
      { kind: "selectRecording", recordingId: "r1" },
      { kind: "selectExercise", exercise: "pentatonic-box" },
    ]);
    expect(state.selectedRecordings).toEqual([]);
  });

  it("bumps revision on every effective change", () => {
    const s0 = apply([overview]);
    const s1 = transition(s0, { kind: "selectView", view: "roles" });
    expect(s1.revision).toBe(s0.revision + 1);
    const s2 = transition(s1, { kind: "selectView", view: "roles" });
    expect(s2).toBe(s1); // no-op events return the same object
  });
});

describe("viewGuard", () => {
  it("compare requires exactly two players", () => {
    const one = apply([
      overview,
      { kind: "selectView", view: "compare" },
      { kind: "togglePlayer", player: "alice" },
    ]);
    expect(viewGuard(one)).toMatch(/exactly two players/);
    expect(requestFor(one)).toBeNull();

    const two = transition(one, { kind: "togglePlayer", player: "bob" });
    expect(viewGuard(two)).toBeNull();

    const three = apply([
      { kind: "togglePlayer", player: "eve" },
    ], two);
    expect(viewGuard(three)).toMatch(/exactly two players/);
  });

  it("progress needs one recording or one player", () => {
    const bare = apply([overview]);
    expect(viewGuard(bare)).not.toBeNull();
    const withPlayer = transition(bare, { kind: "togglePlayer", player: "alice" });
    expect(viewGuard(withPlayer)).toBeNull();
    const withRecording = transition(bare, {
      kind: "selectRecording",
      recordingId: "r9",
    });
    expect(viewGuard(withRecording)).toBeNull();
  });

  it("similarity and roles need only an exercise", () => {
    const state = apply([overview, { kind: "selectView", view: "similarity" }]);
    expect(viewGuard(state)).toBeNull();
    expect(viewGuard({ ...state, activeView: "roles" })).toBeNull();
    expect(viewGuard({ ...state, selectedExercise: null })).toMatch(/exercise/);
  });
});

describe("requestFor", () => {
  it("builds the compare request from selection order", () => {
    const state = apply([
      overview,
      { kind: "selectView", view: "compare" },
      { kind: "togglePlayer", player: "bob" },
      { kind: "togglePlayer", player: "alice" },
    ]);
    expect(requestFor(state)).toEqual({
      path: "/api/viz/compare",
      params: { playerA: "bob", playerB: "alice", exercise: "blues-improv" },
    });
  });

  it("progress prefers a single selected recording and carries fit", () => {
    const state = apply([
      overview,
      { kind: "togglePlayer", player: "alice" },
      { kind: "selectRecording", recordingId: "r42" },
      { kind: "setFitMode", fit: "offset" },
    ]);
    expect(requestFor(state)).toEqual({
      path: "/api/viz/progress",
      params: { recording: "r42", fit: "offset" },
    });
  });

  it("roles passes the selected players through", () => {
    const state = apply([
      overview,
      { kind: "selectView", view: "roles" },
      { kind: "togglePlayer", player: "eve" },
    ]);
    expect(requestFor(state)).toEqual({
      path: "/api/viz/roles",
      params: { exercise: "blues-improv", players: "eve" },
    });
  });
});
