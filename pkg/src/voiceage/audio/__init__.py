from voiceage.audio.clip import AudioClip, resample, segment, to_canonical
from voiceage.audio.wav import load_wav, save_wav
from voiceage.audio.stft import ComplexSpectrogram, StftConfig, istft, stft
from voiceage.audio.mel import MelSpectrogram, mel_filterbank, mel_spectrogram
from voiceage.audio.griffin_lim import griffin_lim, mel_to_magnitude

__all__ = [
    "AudioClip",
    "ComplexSpectrogram",
    "MelSpectrogram",
    "StftConfig",
    "griffin_lim",
    "istft",
    "load_wav",
    "mel_filterbank",
    "mel_spectrogram",
    "mel_to_magnitude",
    "resample",
    "save_wav",
    "segment",
    "stft",
    "to_canonical",
]
