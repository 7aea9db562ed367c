/**
 * Typed client for the voiceage HTTP API.
 *
 * Every server failure arrives as one JSON envelope,
 * {"error": {"code", "message"}}, and surfaces here as an ApiError
 * carrying the machine-readable code. userMessage() turns codes into
 * the strings shown in the UI, so the mapping lives in one place.
 */

import type { Direction, Prediction } from "./state.js";

export interface HealthReport {
  status: string;
  models: Record<string, boolean>;
}

export interface TransformResponse {
  /** WAV bytes of the aged clip. */
  audio: ArrayBuffer;
  /** data: URLs for the spectrogram pair, when requested. */
  inputSpectrogram: string | null;
  outputSpectrogram: string | null;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** Thrown when the server could not be reached at all. */
export class NetworkError extends Error {
  constructor(cause: unknown) {
    super(`server unreachable: ${cause instanceof Error ? cause.message : String(cause)}`);
    this.name = "NetworkError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class VoiceAgeClient {
  private readonly fetchFn: FetchLike;

  constructor(
    readonly baseUrl: string,
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  async health(): Promise<HealthReport> {
    const response = await this.request("/api/health", {});
    return (await response.json()) as HealthReport;
  }

  async modelInfo(): Promise<unknown> {
    const response = await this.request("/api/model-info", {});
    return await response.json();
  }

  /** Upload a WAV clip; resolve to the aged audio (plus spectrograms if asked). */
  async transform(
    wav: ArrayBuffer,
    direction: Direction,
    options: { spectrograms?: boolean } = {},
  ): Promise<TransformResponse> {
    const form = new FormData();
    form.append("audio", new Blob([wav], { type: "audio/wav" }), "clip.wav");
    form.append("direction", direction);
    if (options.spectrograms) {
      form.append("return_spectrograms", "true");
    }
    const response = await this.request("/api/transform", { method: "POST", body: form });

    const contentType = response.headers.get("content-type") ?? "";
    if (contentType.startsWith("application/json")) {
      const body = (await response.json()) as {
        audio_wav_base64: string;
        input_spectrogram_png_base64: string;
        output_spectrogram_png_base64: string;
      };
      return {
        audio: base64ToBytes(body.audio_wav_base64),
        inputSpectrogram: pngDataUrl(body.input_spectrogram_png_base64),
        outputSpectrogram: pngDataUrl(body.output_spectrogram_png_base64),
      };
    }
    return {
      audio: await response.arrayBuffer(),
      inputSpectrogram: null,
      outputSpectrogram: null,
    };
  }

  /** Ask the service to predict an age bin for a clip. */
  async predict(wav: ArrayBuffer): Promise<Prediction> {
    const form = new FormData();
    form.append("audio", new Blob([wav], { type: "audio/wav" }), "clip.wav");
    const response = await this.request("/api/predict", { method: "POST", body: form });
    const body = (await response.json()) as {
      scheme: string;
      label: string;
      class_index: number;
      probabilities: Record<string, number>;
      modality: string;
      segments: number;
    };
    return {
      scheme: body.scheme,
      label: body.label,
      classIndex: body.class_index,
      probabilities: body.probabilities,
      modality: body.modality,
      segments: body.segments,
    };
  }

  private async request(path: string, init: RequestInit): Promise<Response> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, init);
    } catch (cause) {
      throw new NetworkError(cause);
    }
    if (!response.ok) {
      throw await toApiError(response);
    }
    return response;
  }
}

async function toApiError(response: Response): Promise<ApiError> {
  try {
    const body = (await response.json()) as { error: { code: string; message: string } };
    return new ApiError(response.status, body.error.code, body.error.message);
  } catch {
    return new ApiError(response.status, "unexpected_response", `HTTP ${response.status}`);
  }
}

const USER_MESSAGES: Record<string, string> = {
  model_not_loaded: "Model not loaded on the server — start it with a checkpoint directory.",
  audio_too_short: "That recording is too short; capture at least a quarter second.",
  audio_too_long: "That recording is too long for the server; keep it under 30 seconds.",
  payload_too_large: "That recording is too large to upload; keep it under 2 MB.",
  bad_audio: "The server could not read that audio; try recording again.",
  bad_direction: "Pick either the older or the younger voice.",
  missing_audio: "No audio reached the server; record a clip first.",
  bad_face: "The server could not read that image.",
};

/** One distinct, actionable sentence per failure mode. */
export function userMessage(failure: unknown): string {
  if (failure instanceof NetworkError) {
    return "Could not reach the server — check the connection and retry.";
  }
  if (failure instanceof ApiError) {
    return USER_MESSAGES[failure.code] ?? `Server rejected the request (${failure.code}).`;
  }
  return failure instanceof Error ? failure.message : String(failure);
}

function base64ToBytes(base64: string): ArrayBuffer {
  const binary = atob(base64);
  const bytes = new Uint8Array(binary.length);
  for (let i = 0; i < binary.length; i++) {
    bytes[i] = binary.charCodeAt(i);
  }
  return bytes.buffer;
}

function pngDataUrl(base64: string): string {
  return `data:image/png;base64,${base64}`;
}
