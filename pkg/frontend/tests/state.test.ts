/**
 * The session state machine: every state reachable, every illegal
 * transition rejected, and the submit guards that mirror server rules.
 */

import { describe, expect, it } from "vitest";
import {
  beginRecording,
  canPlayback,
  canSubmit,
  captureFailed,
  chooseDirection,
  clipSeconds,
  DIRECTIONS,
  finishRecording,
  IllegalTransition,
  initialState,
  MIN_CLIP_SECONDS,
  reset,
  retry,
  submit,
  submitFailed,
  submitSucceeded,
  type Clip,
  type Phase,
  type SessionState,
  type TransformOutcome,
} from "../src/state.js";

function makeClip(seconds: number): Clip {
  return { samples: new Float32Array(Math.round(seconds * 16000)), sampleRate: 16000 };
}

const OUTCOME: TransformOutcome = {
  audio: new ArrayBuffer(44),
  inputSpectrogram: null,
  outputSpectrogram: null,
  prediction: null,
};

const idle = initialState();
const recording = beginRecording(idle);
const recorded = finishRecording(recording, makeClip(2.0));
const submitting = submit(recorded);
const result = submitSucceeded(submitting, OUTCOME);
const errorRetryable = submitFailed(submitting, "boom");
const errorDead = captureFailed(recording, "denied");

const STATES: Record<string, SessionState> = {
  idle,
  recording,
  recorded,
  submitting,
  result,
  errorRetryable,
  errorDead,
};

type Action = (state: SessionState) => SessionState;

const ACTIONS: Record<string, Action> = {
  beginRecording,
  finishRecording: (s) => finishRecording(s, makeClip(2.0)),
  captureFailed: (s) => captureFailed(s, "x"),
  submit,
  submitSucceeded: (s) => submitSucceeded(s, OUTCOME),
  submitFailed: (s) => submitFailed(s, "x"),
  retry,
  reset,
};

/** The complete map of which action is legal in which state. */
const LEGAL: Record<string, readonly string[]> = {
  beginRecording: ["idle", "recorded", "result", "errorRetryable", "errorDead"],
  finishRecording: ["recording"],
  captureFailed: ["recording"],
  submit: ["recorded"],
  submitSucceeded: ["submitting"],
  submitFailed: ["submitting"],
  retry: ["errorRetryable"],
  reset: ["recorded", "result", "errorRetryable", "errorDead"],
};

describe("transition table", () => {
  for (const [actionName, action] of Object.entries(ACTIONS)) {
    for (const [stateName, state] of Object.entries(STATES)) {
      const legal = LEGAL[actionName]!.includes(stateName);
      it(`${actionName} from ${stateName} is ${legal ? "legal" : "rejected"}`, () => {
        if (legal) {
          expect(() => action(state)).not.toThrow();
        } else {
          expect(() => action(state)).toThrow(IllegalTransition);
        }
      });
    }
  }

  it("covers every state and action", () => {
    const phases = new Set(Object.values(STATES).map((s) => s.phase));
    expect(phases).toEqual(
      new Set<Phase>(["idle", "recording", "recorded", "submitting", "result", "error"]),
    );
    expect(Object.keys(ACTIONS).sort()).toEqual(Object.keys(LEGAL).sort());
  });
});

describe("reachability", () => {
  it("walks through every state on the normal loop plus one failure", () => {
    const seen = new Set<Phase>();
    let state = initialState();
    seen.add(state.phase);

    state = beginRecording(state);
    seen.add(state.phase);
    state = finishRecording(state, makeClip(2.0));
    seen.add(state.phase);
    state = submit(state);
    seen.add(state.phase);
    state = submitFailed(state, "server had a bad day");
    seen.add(state.phase);
    state = retry(state);
    state = submitSucceeded(state, OUTCOME);
    seen.add(state.phase);

    expect(seen).toEqual(
      new Set<Phase>(["idle", "recording", "recorded", "submitting", "error", "result"]),
    );
  });
});

describe("submit guards", () => {
  it("allows exactly the two directions", () => {
    expect(DIRECTIONS).toEqual(["older", "younger"]);
    expect(chooseDirection(idle, "younger").direction).toBe("younger");
    expect(() => chooseDirection(idle, "sideways" as never)).toThrow(RangeError);
  });

  it("locks the direction while a request is in flight", () => {
    expect(() => chooseDirection(submitting, "younger")).toThrow(IllegalTransition);
  });

  it("blocks uploads shorter than the server minimum", () => {
    const short = finishRecording(recording, makeClip(0.1));
    expect(clipSeconds(short.clip!)).toBeLessThan(MIN_CLIP_SECONDS);
    expect(canSubmit(short)).toBe(false);
    expect(() => submit(short)).toThrow(IllegalTransition);
  });

  it("accepts a clip exactly at the minimum", () => {
    const exact = finishRecording(recording, makeClip(MIN_CLIP_SECONDS));
    expect(canSubmit(exact)).toBe(true);
  });

  it("enables submit only in the recorded state", () => {
    for (const [name, state] of Object.entries(STATES)) {
      expect(canSubmit(state)).toBe(name === "recorded");
    }
  });
});

describe("state payloads", () => {
  it("enables playback exactly when a response exists", () => {
    for (const [name, state] of Object.entries(STATES)) {
      expect(canPlayback(state)).toBe(name === "result");
    }
    expect(result.outcome).not.toBeNull();
  });

  it("preserves the clip through a failed submit so retry can reuse it", () => {
    expect(errorRetryable.clip).toBe(recorded.clip);
    expect(errorRetryable.retryable).toBe(true);
    expect(retry(errorRetryable).phase).toBe("submitting");
  });

  it("marks capture failures as not retryable", () => {
    expect(errorDead.clip).toBeNull();
    expect(errorDead.retryable).toBe(false);
    expect(() => retry(errorDead)).toThrow(IllegalTransition);
  });

  it("drops stale clip and result when re-recording", () => {
    const again = beginRecording(result);
    expect(again.clip).toBeNull();
    expect(again.outcome).toBeNull();
    expect(again.errorMessage).toBeNull();
  });

  it("keeps the chosen direction across a reset", () => {
    const younger = chooseDirection(recorded, "younger");
    const fresh = reset(younger);
    expect(fresh.phase).toBe("idle");
    expect(fresh.direction).toBe("younger");
    expect(fresh.clip).toBeNull();
  });

  it("records the error message verbatim", () => {
    expect(submitFailed(submitting, "boom").errorMessage).toBe("boom");
    expect(captureFailed(recording, "denied").errorMessage).toBe("denied");
  });
});
