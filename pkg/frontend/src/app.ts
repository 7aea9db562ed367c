/**
 * DOM bootstrap: binds the session controller to the page.
 *
 * All enable/disable decisions come straight from the state machine, so
 * the page physically cannot issue a request the server would reject —
 * the submit button is live only when a long-enough clip exists, the
 * direction is a pair of radio buttons, and nothing is clickable twice
 * while a request is in flight.
 */

import { VoiceAgeClient } from "./api.js";
import { apiBase } from "./config.js";
import { SessionController } from "./controller.js";
import { startCapture } from "./recorder.js";
import { canPlayback, canSubmit, clipSeconds, type Direction, type SessionState } from "./state.js";

function element<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (found === null) {
    throw new Error(`missing element #${id}`);
  }
  return found as T;
}

const recordButton = element<HTMLButtonElement>("record");
const submitButton = element<HTMLButtonElement>("submit");
const retryButton = element<HTMLButtonElement>("retry");
const resetButton = element<HTMLButtonElement>("reset");
const statusLine = element<HTMLParagraphElement>("status");
const errorBanner = element<HTMLDivElement>("error-banner");
const resultSection = element<HTMLElement>("result");
const player = element<HTMLAudioElement>("player");
const inputImage = element<HTMLImageElement>("input-spectrogram");
const outputImage = element<HTMLImageElement>("output-spectrogram");
const predictionLine = element<HTMLParagraphElement>("prediction");
const directionInputs = Array.from(
  document.querySelectorAll<HTMLInputElement>('input[name="direction"]'),
);

let playbackUrl: string | null = null;

const STATUS_TEXT: Record<SessionState["phase"], string> = {
  idle: "Press record and say a few words.",
  recording: "Recording… press stop when done.",
  recorded: "",
  submitting: "Aging your voice…",
  result: "Done — press play.",
  error: "",
};

function render(state: SessionState): void {
  recordButton.textContent = state.phase === "recording" ? "Stop" : "Record";
  recordButton.disabled = state.phase === "submitting";
  submitButton.disabled = !canSubmit(state);
  retryButton.hidden = !(state.phase === "error" && state.retryable);
  resetButton.hidden = !["recorded", "result", "error"].includes(state.phase);
  for (const input of directionInputs) {
    input.disabled = state.phase === "submitting";
    input.checked = input.value === state.direction;
  }

  if (state.phase === "recorded" && state.clip !== null) {
    const seconds = clipSeconds(state.clip);
    statusLine.textContent = canSubmit(state)
      ? `Captured ${seconds.toFixed(2)} s — choose a direction and submit.`
      : `Captured only ${seconds.toFixed(2)} s; record at least 0.24 s.`;
  } else {
    statusLine.textContent = STATUS_TEXT[state.phase];
  }

  errorBanner.hidden = state.phase !== "error";
  errorBanner.textContent = state.errorMessage ?? "";

  resultSection.hidden = !canPlayback(state);
  if (canPlayback(state) && state.outcome !== null) {
    if (playbackUrl !== null) {
      URL.revokeObjectURL(playbackUrl);
    }
    playbackUrl = URL.createObjectURL(new Blob([state.outcome.audio], { type: "audio/wav" }));
    player.src = playbackUrl;
    inputImage.hidden = state.outcome.inputSpectrogram === null;
    outputImage.hidden = state.outcome.outputSpectrogram === null;
    inputImage.src = state.outcome.inputSpectrogram ?? "";
    outputImage.src = state.outcome.outputSpectrogram ?? "";
    predictionLine.textContent =
      state.outcome.prediction === null
        ? ""
        : `Predicted age group: ${state.outcome.prediction.label}`;
  }
}

const controller = new SessionController(new VoiceAgeClient(apiBase()), startCapture, render);

recordButton.addEventListener("click", () => {
  if (controller.state.phase === "recording") {
    void controller.stopRecording();
  } else {
    void controller.record();
  }
});
submitButton.addEventListener("click", () => void controller.submit());
retryButton.addEventListener("click", () => void controller.retry());
resetButton.addEventListener("click", () => controller.startOver());
for (const input of directionInputs) {
  input.addEventListener("change", () => controller.setDirection(input.value as Direction));
}

render(controller.state);
