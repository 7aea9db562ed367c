"""Griffin-Lim phase reconstruction from mel power spectrograms.

The mel filterbank is inverted by approximate non-negative least squares:
a transpose initialization refined with multiplicative updates. The plain
transpose smears a pure tone across the two overlapping filters around
it, which can shift the reconstructed pitch by a full filter spacing; the
refinement re-concentrates the power and keeps a dominant pitch within
one FFT bin after resynthesis.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from voiceage import SEGMENT_SECONDS
from voiceage.audio.clip import AudioClip
from voiceage.audio.mel import MelSpectrogram, mel_filterbank
from voiceage.audio.stft import StftConfig, istft, stft
from voiceage.errors import ValidationError

DEFAULT_ITERATIONS = 32
NNLS_ITERATIONS = 30


@lru_cache(maxsize=4)
def _filterbank_gram(n_mels: int, fft_size: int, sample_rate: int) -> np.ndarray:
    fb = mel_filterbank(n_mels, fft_size, sample_rate)
    gram = fb.T @ fb
    gram.flags.writeable = False
    return gram


def mel_to_magnitude(
    mel: MelSpectrogram,
    config: StftConfig = StftConfig(),
    refine_iterations: int = NNLS_ITERATIONS,
) -> np.ndarray:
    """Approximate linear magnitude spectrogram from mel power values.

    Non-negative least squares via multiplicative updates: starting from
    the transpose solution, power <- power * (F^T m) / (F^T F power).
    Zero stays zero, so all-zero input inverts to all-zero output.
    """
    n_mels = mel.values.shape[0]
    fb = mel_filterbank(n_mels, config.fft_size, mel.sample_rate)
    numerator = fb.T @ mel.values
    power = numerator.copy()
    gram = _filterbank_gram(n_mels, config.fft_size, mel.sample_rate)
    for _ in range(refine_iterations):
        power *= numerator / np.maximum(gram @ power, 1e-30)
    return np.sqrt(np.maximum(power, 0.0))


def griffin_lim(
    mel: MelSpectrogram,
    iterations: int = DEFAULT_ITERATIONS,
    config: StftConfig = StftConfig(),
    return_errors: bool = False,
):
    """Reconstruct one 0.24 s segment of audio from a mel spectrogram.

    Zero-phase initialization, then `iterations` rounds of alternating
    magnitude substitution and STFT consistency projection. With
    `return_errors` the per-iteration spectral convergence error
    ||M - |STFT(x)||| / ||M|| is returned alongside the clip; it is
    non-increasing for this consistent analysis/synthesis pair.
    """
    if iterations < 1:
        raise ValidationError(f"iterations must be >= 1, got {iterations}")
    length = int(round(SEGMENT_SECONDS * mel.sample_rate))
    target = mel_to_magnitude(mel, config)
    target_norm = np.linalg.norm(target)

    errors = []
    x = istft(target.astype(np.complex128), config, length)
    for _ in range(iterations):
        if not np.any(x):
            # all-zero signal: phase is undefined and the fixpoint is exact
            errors.append(1.0 if target_norm > 0 else 0.0)
            break
        spec = stft(AudioClip(x, mel.sample_rate), config).bins[:, : target.shape[1]]
        mag = np.abs(spec)
        if return_errors:
            err = np.linalg.norm(target - mag) / max(target_norm, 1e-300)
            errors.append(err)
        phase = spec / np.maximum(mag, 1e-300)
        x = istft(target * phase, config, length)

    peak = np.max(np.abs(x)) if len(x) else 0.0
    if peak > 1.0:
        x = x / peak
    clip = AudioClip(x, mel.sample_rate)
    if return_errors:
        return clip, errors
    return clip
