/**
 * UI state: current selection, fetched trajectory, playback cursor, and
 * the breadcrumb trail of visited points. All transitions are pure so
 * they can be tested without a DOM; main.ts owns the single mutable
 * instance and re-renders after each transition.
 */

import type { GeneratePayload } from "./types";

export interface Visit {
  pb: [number, number];
  result: GeneratePayload | null;
}

export interface UiState {
  selected: [number, number] | null;
  trajectory: GeneratePayload | null;
  cursor: number;
  playing: boolean;
  history: Visit[];
  /** Indices into history chosen for the side-by-side view. */
  compare: [number, number] | null;
}

export function initialState(): UiState {
  return {
    selected: null,
    trajectory: null,
    cursor: 0,
    playing: false,
    history: [],
    compare: null,
  };
}

/** A click selects a point and appends a breadcrumb immediately. */
export function selectPoint(state: UiState, pb: [number, number]): UiState {
  return {
    ...state,
    selected: pb,
    trajectory: null,
    cursor: 0,
    history: [...state.history, { pb, result: null }],
  };
}

/** Attach a generation result to the latest matching breadcrumb. */
export function attachResult(state: UiState, pb: [number, number], result: GeneratePayload): UiState {
  const history = state.history.slice();
  for (let i = history.length - 1; i >= 0; i--) {
    if (history[i].pb[0] === pb[0] && history[i].pb[1] === pb[1] && history[i].result === null) {
      history[i] = { pb: history[i].pb, result };
      break;
    }
  }
  const isCurrent = state.selected !== null
    && state.selected[0] === pb[0] && state.selected[1] === pb[1];
  return {
    ...state,
    history,
    trajectory: isCurrent ? result : state.trajectory,
    cursor: isCurrent ? 0 : state.cursor,
    playing: isCurrent ? true : state.playing,
  };
}

/** Length of the current trajectory; playback spans exactly this many frames. */
export function frameCount(state: UiState): number {
  return state.trajectory === null ? 0 : state.trajectory.trajectory.length;
}

export function setCursor(state: UiState, cursor: number): UiState {
  const last = Math.max(frameCount(state) - 1, 0);
  return { ...state, cursor: Math.min(Math.max(cursor, 0), last) };
}

export function advanceCursor(state: UiState): UiState {
  const frames = frameCount(state);
  if (frames === 0) return state;
  return { ...state, cursor: (state.cursor + 1) % frames };
}

export function canCompare(state: UiState): boolean {
  return state.history.filter((v) => v.result !== null).length >= 2;
}

/** Compare the two most recent completed visits (or explicit indices). */
export function compareVisits(state: UiState, a?: number, b?: number): UiState {
  const done = state.history
    .map((v, i) => ({ v, i }))
    .filter(({ v }) => v.result !== null);
  if (done.length < 2) return { ...state, compare: null };
  const pick = (given: number | undefined, fallback: number) =>
    given !== undefined && state.history[given]?.result !== null ? given : fallback;
  const second = done[done.length - 1].i;
  const first = done[done.length - 2].i;
  return { ...state, compare: [pick(a, first), pick(b, second)] };
}

export function clearHistory(state: UiState): UiState {
  return { ...state, history: [], compare: null };
}
