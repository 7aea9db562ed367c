/**
 * Microphone capture that ends in mono 16 kHz float samples.
 *
 * Capture runs at whatever rate the device prefers; the downmix and
 * resample to the server's canonical rate happen at stop() time. A
 * ScriptProcessorNode collects raw Float32 frames — unlike MediaRecorder
 * it yields PCM directly, which is what the WAV encoder needs.
 */

import type { Clip } from "./state.js";
import { TARGET_SAMPLE_RATE, downmixToMono, resampleLinear } from "./wav.js";

export class PermissionDeniedError extends Error {
  constructor() {
    super("Microphone permission was denied — allow access in the browser and try again.");
    this.name = "PermissionDeniedError";
  }
}

export interface RecorderHandle {
  /** Stop capture and return the clip, resampled to 16 kHz mono. */
  stop(): Promise<Clip>;
}

export async function startCapture(): Promise<RecorderHandle> {
  let stream: MediaStream;
  try {
    stream = await navigator.mediaDevices.getUserMedia({
      audio: { channelCount: 1, echoCancellation: true, noiseSuppression: true },
    });
  } catch (cause) {
    if (cause instanceof DOMException && cause.name === "NotAllowedError") {
      throw new PermissionDeniedError();
    }
    throw cause;
  }

  const context = new AudioContext();
  const source = context.createMediaStreamSource(stream);
  const processor = context.createScriptProcessor(4096, 1, 1);
  const chunks: Float32Array[] = [];

  processor.onaudioprocess = (event) => {
    chunks.push(new Float32Array(event.inputBuffer.getChannelData(0)));
  };
  source.connect(processor);
  processor.connect(context.destination);

  return {
    async stop(): Promise<Clip> {
      processor.disconnect();
      source.disconnect();
      for (const track of stream.getTracks()) {
        track.stop();
      }
      const captureRate = context.sampleRate;
      await context.close();

      const total = chunks.reduce((n, chunk) => n + chunk.length, 0);
      const joined = new Float32Array(total);
      let offset = 0;
      for (const chunk of chunks) {
        joined.set(chunk, offset);
        offset += chunk.length;
      }
      const mono = downmixToMono([joined]);
      const samples = resampleLinear(mono, captureRate, TARGET_SAMPLE_RATE);
      return { samples, sampleRate: TARGET_SAMPLE_RATE };
    },
  };
}
