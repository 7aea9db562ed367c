"""RIFF/WAVE reading and writing.

Reads PCM 16-bit mono or stereo (stereo is averaged down to mono).
Writes PCM 16-bit mono little-endian. No other container or codec.
"""

from __future__ import annotations

import struct

import numpy as np

from voiceage.audio.clip import AudioClip
from voiceage.errors import FormatError, UnsupportedFormatError

_PCM = 1
_INT16_SCALE = 32768.0


def load_wav(data: bytes) -> AudioClip:
    """Decode a RIFF/WAVE byte string into a mono AudioClip.

    16-bit samples map to [-1, 1] by division by 32768; the container's
    sample rate is preserved (resampling is the caller's job).
    """
    if len(data) < 12:
        raise FormatError("file too short for a RIFF header")
    magic = data[0:4]
    if magic != b"RIFF":
        raise FormatError(f"not a RIFF container (magic {magic!r})")
    if data[8:12] != b"WAVE":
        raise FormatError(f"not a WAVE form (type {data[8:12]!r})")

    fmt = None
    pcm = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (chunk_size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise FormatError("fmt chunk truncated")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            if len(body) < chunk_size:
                raise FormatError("data chunk truncated")
            pcm = body
        pos += 8 + chunk_size + (chunk_size & 1)  # chunks are word-aligned

    if fmt is None:
        raise FormatError("missing fmt chunk")
    if pcm is None:
        raise FormatError("missing data chunk")

    audio_format, channels, sample_rate, _, _, bits = fmt
    if audio_format != _PCM:
        raise UnsupportedFormatError(f"only PCM supported, got format tag {audio_format}")
    if bits != 16:
        raise UnsupportedFormatError(f"only 16-bit PCM supported, got {bits}-bit")
    if channels not in (1, 2):
        raise UnsupportedFormatError(f"only mono/stereo supported, got {channels} channels")
    if sample_rate <= 0:
        raise FormatError("non-positive sample rate")

    usable = len(pcm) - (len(pcm) % (2 * channels))
    raw = np.frombuffer(pcm[:usable], dtype="<i2").astype(np.float64)
    if channels == 2:
        raw = raw.reshape(-1, 2).mean(axis=1)
    return AudioClip(raw / _INT16_SCALE, sample_rate)


def save_wav(clip: AudioClip) -> bytes:
    """Encode a clip as PCM 16-bit mono little-endian WAV bytes.

    Quantization is round-to-nearest with saturation at int16 bounds, so
    load_wav(save_wav(c)) matches c within 1/32768 per sample.
    """
    quantized = np.clip(
        np.round(clip.samples * _INT16_SCALE), -32768, 32767
    ).astype("<i2")
    pcm = quantized.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(pcm),
        b"WAVE",
        b"fmt ",
        16,
        _PCM,
        1,
        clip.sample_rate,
        clip.sample_rate * 2,
        2,
        16,
        b"data",
        len(pcm),
    )
    return header + pcm
