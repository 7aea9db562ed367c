/**
 * Session state machine for the record → submit → playback loop.
 *
 * States flow idle → recording → recorded → submitting → result | error.
 * Every transition is a pure function that either returns the next state
 * or throws IllegalTransition, so the UI layer cannot wander off the map:
 * buttons are enabled exactly where the corresponding transition is legal.
 *
 * Mutual exclusions worth knowing about: recording and submitting never
 * overlap, at most one request is in flight, and playback is available
 * only in the result state (a response exists by construction there).
 */

export type Direction = "older" | "younger";

export const DIRECTIONS: readonly Direction[] = ["older", "younger"];

/** Shortest clip the server will accept; uploads below this are blocked here. */
export const MIN_CLIP_SECONDS = 0.24;

export interface Clip {
  samples: Float32Array;
  sampleRate: number;
}

export interface Prediction {
  scheme: string;
  label: string;
  classIndex: number;
  probabilities: Record<string, number>;
  modality: string;
  segments: number;
}

export interface TransformOutcome {
  /** Aged clip as WAV bytes, ready for an object URL. */
  audio: ArrayBuffer;
  /** Spectrogram PNGs as data: URLs, when the server returned them. */
  inputSpectrogram: string | null;
  outputSpectrogram: string | null;
  prediction: Prediction | null;
}

export type Phase =
  | "idle"
  | "recording"
  | "recorded"
  | "submitting"
  | "result"
  | "error";

export interface SessionState {
  phase: Phase;
  /** Captured audio; survives submit failures so retry can reuse it. */
  clip: Clip | null;
  direction: Direction;
  outcome: TransformOutcome | null;
  errorMessage: string | null;
  /** True when the error state still holds a clip worth resubmitting. */
  retryable: boolean;
}

export class IllegalTransition extends Error {
  constructor(
    readonly from: Phase,
    readonly action: string,
  ) {
    super(`cannot ${action} from the ${from} state`);
    this.name = "IllegalTransition";
  }
}

export function initialState(): SessionState {
  return {
    phase: "idle",
    clip: null,
    direction: "older",
    outcome: null,
    errorMessage: null,
    retryable: false,
  };
}

function expect(state: SessionState, action: string, ...legal: Phase[]): void {
  if (!legal.includes(state.phase)) {
    throw new IllegalTransition(state.phase, action);
  }
}

export function clipSeconds(clip: Clip): number {
  return clip.samples.length / clip.sampleRate;
}

/** Start (or restart) capture. Drops any previous clip and result. */
export function beginRecording(state: SessionState): SessionState {
  expect(state, "begin recording", "idle", "recorded", "result", "error");
  return {
    ...state,
    phase: "recording",
    clip: null,
    outcome: null,
    errorMessage: null,
    retryable: false,
  };
}

/** Capture finished; the clip may still be too short to submit. */
export function finishRecording(state: SessionState, clip: Clip): SessionState {
  expect(state, "finish recording", "recording");
  return { ...state, phase: "recorded", clip };
}

/** Capture never produced audio (permission denied, device error). */
export function captureFailed(state: SessionState, message: string): SessionState {
  expect(state, "fail capture", "recording");
  return {
    ...state,
    phase: "error",
    clip: null,
    errorMessage: message,
    retryable: false,
  };
}

export function chooseDirection(state: SessionState, direction: Direction): SessionState {
  if (!DIRECTIONS.includes(direction)) {
    throw new RangeError(`direction must be one of ${DIRECTIONS.join("/")}, got ${direction}`);
  }
  if (state.phase === "submitting") {
    throw new IllegalTransition(state.phase, "change direction");
  }
  return { ...state, direction };
}

/** True exactly when submit() would be legal. Drives the button state. */
export function canSubmit(state: SessionState): boolean {
  return (
    state.phase === "recorded" &&
    state.clip !== null &&
    clipSeconds(state.clip) >= MIN_CLIP_SECONDS
  );
}

export function canPlayback(state: SessionState): boolean {
  return state.phase === "result" && state.outcome !== null;
}

export function submit(state: SessionState): SessionState {
  expect(state, "submit", "recorded");
  if (!canSubmit(state)) {
    throw new IllegalTransition(state.phase, "submit a clip shorter than the minimum");
  }
  return { ...state, phase: "submitting", outcome: null, errorMessage: null };
}

export function submitSucceeded(state: SessionState, outcome: TransformOutcome): SessionState {
  expect(state, "deliver a result", "submitting");
  return { ...state, phase: "result", outcome, errorMessage: null, retryable: false };
}

export function submitFailed(state: SessionState, message: string): SessionState {
  expect(state, "fail a submit", "submitting");
  return {
    ...state,
    phase: "error",
    errorMessage: message,
    retryable: state.clip !== null,
  };
}

/** Resubmit the clip preserved by a failed submit. */
export function retry(state: SessionState): SessionState {
  expect(state, "retry", "error");
  if (!state.retryable || state.clip === null) {
    throw new IllegalTransition(state.phase, "retry without a preserved clip");
  }
  return { ...state, phase: "submitting", errorMessage: null };
}

/** Back to a blank session, keeping only the chosen direction. */
export function reset(state: SessionState): SessionState {
  expect(state, "reset", "recorded", "result", "error");
  return { ...initialState(), direction: state.direction };
}
