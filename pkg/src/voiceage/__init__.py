"""Voice aging toolkit.

Audio in, aged audio out: WAV decoding, 0.24 s segmentation, 128x128
mel-spectrograms, an invertible RGB spectrogram codec, age classifiers,
CycleGAN young/old translation, and Griffin-Lim reconstruction. Shipped
as a library, a CLI (``voiceage``), and an HTTP service.
"""

__version__ = "0.1.0"

SAMPLE_RATE = 16000
SEGMENT_SECONDS = 0.24
SEGMENT_SAMPLES = int(round(SEGMENT_SECONDS * SAMPLE_RATE))  # 3840
