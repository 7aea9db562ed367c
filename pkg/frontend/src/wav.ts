/**
 * Client-side WAV handling.
 *
 * The server speaks exactly one format — PCM 16-bit mono little-endian —
 * so the browser does the downmix and resample before upload. Decoding
 * exists for the return trip: it lets the UI report the aged clip's
 * duration without an AudioContext.
 */

export const TARGET_SAMPLE_RATE = 16000;

const PCM_FORMAT = 1;
const INT16_SCALE = 32768;

export interface DecodedWav {
  samples: Float32Array;
  sampleRate: number;
}

/** Average any number of channels down to one. */
export function downmixToMono(channels: readonly Float32Array[]): Float32Array {
  if (channels.length === 0) {
    throw new RangeError("no channels to downmix");
  }
  const first = channels[0]!;
  if (channels.length === 1) {
    return first;
  }
  const mono = new Float32Array(first.length);
  for (const channel of channels) {
    if (channel.length !== first.length) {
      throw new RangeError("channel lengths differ");
    }
    for (let i = 0; i < channel.length; i++) {
      mono[i]! += channel[i]! / channels.length;
    }
  }
  return mono;
}

/**
 * Linear-interpolation resample. Fidelity is fine for speech capture;
 * anything fancier belongs on the server side of the API.
 */
export function resampleLinear(
  samples: Float32Array,
  fromRate: number,
  toRate: number,
): Float32Array {
  if (fromRate <= 0 || toRate <= 0) {
    throw new RangeError("sample rates must be positive");
  }
  if (fromRate === toRate) {
    return samples;
  }
  const outLength = Math.round((samples.length * toRate) / fromRate);
  const out = new Float32Array(outLength);
  const step = fromRate / toRate;
  for (let i = 0; i < outLength; i++) {
    const position = i * step;
    const left = Math.floor(position);
    const right = Math.min(left + 1, samples.length - 1);
    const frac = position - left;
    out[i] = samples[left]! * (1 - frac) + samples[right]! * frac;
  }
  return out;
}

/** Encode mono float samples in [-1, 1] as a PCM 16-bit WAV file. */
export function encodeWavPcm16(samples: Float32Array, sampleRate: number): ArrayBuffer {
  const pcmBytes = samples.length * 2;
  const buffer = new ArrayBuffer(44 + pcmBytes);
  const view = new DataView(buffer);

  writeAscii(view, 0, "RIFF");
  view.setUint32(4, 36 + pcmBytes, true);
  writeAscii(view, 8, "WAVE");
  writeAscii(view, 12, "fmt ");
  view.setUint32(16, 16, true);
  view.setUint16(20, PCM_FORMAT, true);
  view.setUint16(22, 1, true); // mono
  view.setUint32(24, sampleRate, true);
  view.setUint32(28, sampleRate * 2, true);
  view.setUint16(32, 2, true);
  view.setUint16(34, 16, true);
  writeAscii(view, 36, "data");
  view.setUint32(40, pcmBytes, true);

  for (let i = 0; i < samples.length; i++) {
    const clamped = Math.max(-1, Math.min(1, samples[i]!));
    const quantized = Math.max(
      -INT16_SCALE,
      Math.min(INT16_SCALE - 1, Math.round(clamped * INT16_SCALE)),
    );
    view.setInt16(44 + 2 * i, quantized, true);
  }
  return buffer;
}

/** Decode a PCM 16-bit mono/stereo WAV; stereo is averaged down. */
export function decodeWavPcm16(buffer: ArrayBuffer): DecodedWav {
  const view = new DataView(buffer);
  if (buffer.byteLength < 12 || readAscii(view, 0, 4) !== "RIFF") {
    throw new Error("not a RIFF container");
  }
  if (readAscii(view, 8, 4) !== "WAVE") {
    throw new Error("not a WAVE form");
  }

  let format: { tag: number; channels: number; sampleRate: number; bits: number } | null = null;
  let pcm: { offset: number; length: number } | null = null;
  let pos = 12;
  while (pos + 8 <= buffer.byteLength) {
    const chunkId = readAscii(view, pos, 4);
    const chunkSize = view.getUint32(pos + 4, true);
    if (chunkId === "fmt ") {
      format = {
        tag: view.getUint16(pos + 8, true),
        channels: view.getUint16(pos + 10, true),
        sampleRate: view.getUint32(pos + 12, true),
        bits: view.getUint16(pos + 22, true),
      };
    } else if (chunkId === "data") {
      pcm = { offset: pos + 8, length: chunkSize };
    }
    pos += 8 + chunkSize + (chunkSize % 2); // chunks are word-aligned
  }

  if (format === null || pcm === null) {
    throw new Error("missing fmt or data chunk");
  }
  if (format.tag !== PCM_FORMAT || format.bits !== 16) {
    throw new Error(`expected PCM 16-bit, got tag ${format.tag} at ${format.bits}-bit`);
  }
  if (format.channels !== 1 && format.channels !== 2) {
    throw new Error(`expected mono or stereo, got ${format.channels} channels`);
  }

  const usable = Math.min(pcm.length, buffer.byteLength - pcm.offset);
  const frameCount = Math.floor(usable / (2 * format.channels));
  const samples = new Float32Array(frameCount);
  for (let i = 0; i < frameCount; i++) {
    let sum = 0;
    for (let c = 0; c < format.channels; c++) {
      sum += view.getInt16(pcm.offset + 2 * (i * format.channels + c), true);
    }
    samples[i] = sum / format.channels / INT16_SCALE;
  }
  return { samples, sampleRate: format.sampleRate };
}

function writeAscii(view: DataView, offset: number, text: string): void {
  for (let i = 0; i < text.length; i++) {
    view.setUint8(offset + i, text.charCodeAt(i));
  }
}

function readAscii(view: DataView, offset: number, length: number): string {
  let out = "";
  for (let i = 0; i < length; i++) {
    out += String.fromCharCode(view.getUint8(offset + i));
  }
  return out;
}
