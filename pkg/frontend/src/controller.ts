/**
 * Orchestrates one recording session: microphone in, aged voice out.
 *
 * The controller owns the state machine and performs the side effects
 * around it (capture, WAV encoding, HTTP). The capture source is
 * injected so tests can feed a fixture clip through the exact code path
 * the microphone uses. Every state change flows through notify(), which
 * is where the DOM layer re-renders from.
 */

import { userMessage, VoiceAgeClient } from "./api.js";
import type { RecorderHandle } from "./recorder.js";
import {
  beginRecording,
  captureFailed,
  chooseDirection,
  finishRecording,
  initialState,
  reset,
  retry,
  submit,
  submitFailed,
  submitSucceeded,
  type Direction,
  type Prediction,
  type SessionState,
  type TransformOutcome,
} from "./state.js";
import { encodeWavPcm16 } from "./wav.js";

export type CaptureSource = () => Promise<RecorderHandle>;

export class SessionController {
  private session: SessionState = initialState();
  private handle: RecorderHandle | null = null;

  constructor(
    private readonly client: VoiceAgeClient,
    private readonly capture: CaptureSource,
    private readonly onChange: (state: SessionState) => void = () => {},
  ) {}

  get state(): SessionState {
    return this.session;
  }

  /** Ask for the microphone and start capturing. */
  async record(): Promise<void> {
    this.apply(beginRecording(this.session));
    try {
      this.handle = await this.capture();
    } catch (cause) {
      this.handle = null;
      this.apply(captureFailed(this.session, userMessage(cause)));
    }
  }

  /** Stop capturing; the clip lands in the recorded state. */
  async stopRecording(): Promise<void> {
    if (this.handle === null) {
      return; // capture already failed and reported itself
    }
    const handle = this.handle;
    this.handle = null;
    this.apply(finishRecording(this.session, await handle.stop()));
  }

  setDirection(direction: Direction): void {
    this.apply(chooseDirection(this.session, direction));
  }

  /** Encode the clip and send it for aging. */
  async submit(): Promise<void> {
    this.apply(submit(this.session));
    await this.send();
  }

  /** Resubmit after a failure that preserved the clip. */
  async retry(): Promise<void> {
    this.apply(retry(this.session));
    await this.send();
  }

  startOver(): void {
    this.apply(reset(this.session));
  }

  private async send(): Promise<void> {
    const clip = this.session.clip;
    if (clip === null) {
      throw new Error("submitting state without a clip"); // unreachable by machine rules
    }
    const wav = encodeWavPcm16(clip.samples, clip.sampleRate);
    try {
      const transformed = await this.client.transform(wav, this.session.direction, {
        spectrograms: true,
      });
      const outcome: TransformOutcome = {
        audio: transformed.audio,
        inputSpectrogram: transformed.inputSpectrogram,
        outputSpectrogram: transformed.outputSpectrogram,
        prediction: await this.tryPredict(wav),
      };
      this.apply(submitSucceeded(this.session, outcome));
    } catch (cause) {
      this.apply(submitFailed(this.session, userMessage(cause)));
    }
  }

  /** Prediction decorates the result; a server without the classifier is fine. */
  private async tryPredict(wav: ArrayBuffer): Promise<Prediction | null> {
    try {
      return await this.client.predict(wav);
    } catch {
      return null;
    }
  }

  private apply(next: SessionState): void {
    this.session = next;
    this.onChange(next);
  }
}
