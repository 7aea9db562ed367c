"""HTTP service for voice aging and age prediction.

Checkpoints load once at startup from a model directory (argument or
VOICEAGE_MODEL_DIR) and are treated as immutable afterwards, so
request handling is stateless: identical requests produce identical
bytes. Every error response carries a machine-readable code plus a
human-readable message.
"""

from __future__ import annotations

import base64
import io
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from fastapi import FastAPI, File, Form, UploadFile
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from voiceage import codec, nn
from voiceage.artifacts import load_cyclegan, load_vann
from voiceage.audio.clip import AudioClip, segment, to_canonical
from voiceage.audio.mel import mel_spectrogram
from voiceage.audio.stft import StftConfig
from voiceage.audio.wav import load_wav, save_wav
from voiceage.data.features import load_face_crop, segment_input
from voiceage.errors import FormatError, UnsupportedFormatError, VoiceAgeError
from voiceage.gan.training import CycleGanModel
from voiceage.gan.transform import DIRECTIONS, transform_audio
from voiceage.models.bins import AgeBinScheme
from voiceage.models.vann import VannConfig
from voiceage.nn import ops

MAX_UPLOAD_BYTES = 2_000_000
MAX_UPLOAD_SECONDS = 30.0

CYCLEGAN_FILE = "cyclegan.ckpt"
CLASSIFIER_FILES = {
    "audio": "vann-audio.ckpt",
    "visual": "vann-visual.ckpt",
    "av-mfb": "vann-av-mfb.ckpt",
}


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class LoadedClassifier:
    model: nn.Module
    config: VannConfig
    scheme: AgeBinScheme


@dataclass
class ModelStore:
    cyclegan: CycleGanModel | None = None
    audio: LoadedClassifier | None = None
    visual: LoadedClassifier | None = None
    fused: LoadedClassifier | None = None

    @staticmethod
    def from_dir(directory: str | Path | None) -> "ModelStore":
        store = ModelStore()
        if directory is None:
            return store
        directory = Path(directory)
        gan_path = directory / CYCLEGAN_FILE
        if gan_path.exists():
            store.cyclegan, _ = load_cyclegan(gan_path)
        for slot, filename in CLASSIFIER_FILES.items():
            path = directory / filename
            if path.exists():
                model, config, scheme = load_vann(path)
                loaded = LoadedClassifier(model, config, scheme)
                if slot == "audio":
                    store.audio = loaded
                elif slot == "visual":
                    store.visual = loaded
                else:
                    store.fused = loaded
        return store

    def summary(self) -> dict:
        def classifier_info(loaded: LoadedClassifier | None) -> dict | None:
            if loaded is None:
                return None
            return {
                "scheme": loaded.scheme.name,
                "labels": list(loaded.scheme.labels),
                "class_count": loaded.config.class_count,
                "modality": loaded.config.modality,
            }

        return {
            "cyclegan": self.cyclegan is not None,
            "audio_classifier": classifier_info(self.audio),
            "visual_classifier": classifier_info(self.visual),
            "fused_classifier": classifier_info(self.fused),
        }


async def _read_upload(upload: UploadFile | None, field: str) -> bytes:
    if upload is None:
        raise ApiError(400, "missing_" + field, f"request needs a file field named {field!r}")
    data = await upload.read()
    if not data:
        raise ApiError(400, "missing_" + field, f"uploaded {field!r} file is empty")
    if len(data) > MAX_UPLOAD_BYTES:
        raise ApiError(
            413, "payload_too_large", f"{field!r} exceeds {MAX_UPLOAD_BYTES} bytes"
        )
    return data


def _decode_clip(data: bytes) -> AudioClip:
    try:
        clip = load_wav(data)
    except (FormatError, UnsupportedFormatError, VoiceAgeError) as exc:
        raise ApiError(400, "bad_audio", f"audio not decodable: {exc}") from exc
    if clip.duration > MAX_UPLOAD_SECONDS:
        raise ApiError(
            413, "audio_too_long", f"clip is {clip.duration:.2f}s, limit {MAX_UPLOAD_SECONDS}s"
        )
    return to_canonical(clip)


def _require_segments(clip: AudioClip) -> list[AudioClip]:
    segments = segment(clip)
    if not segments:
        raise ApiError(
            422,
            "audio_too_short",
            f"clip is {clip.duration:.3f}s; need at least one 0.24s segment",
        )
    return segments


def _spectrogram_png(clip_segment: AudioClip) -> str:
    img = codec.encode_spectrogram(mel_spectrogram(clip_segment, StftConfig()))
    return base64.b64encode(codec.save_png(img)).decode("ascii")


def create_app(model_dir: str | Path | None = None) -> FastAPI:
    if model_dir is None:
        model_dir = os.environ.get("VOICEAGE_MODEL_DIR")
    store = ModelStore.from_dir(model_dir)
    app = FastAPI(title="voiceage", docs_url=None, redoc_url=None)
    app.state.store = store

    @app.exception_handler(ApiError)
    async def api_error_handler(_request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    @app.get("/api/health")
    async def health():
        return {
            "status": "ok",
            "models": {
                "cyclegan": store.cyclegan is not None,
                "audio_classifier": store.audio is not None,
                "visual_classifier": store.visual is not None,
                "fused_classifier": store.fused is not None,
            },
        }

    @app.get("/api/model-info")
    async def model_info():
        return {"models": store.summary()}

    @app.post("/api/transform")
    async def transform(
        audio: UploadFile | None = File(default=None),
        direction: str = Form(default=""),
        return_spectrograms: bool = Form(default=False),
    ):
        if store.cyclegan is None:
            raise ApiError(503, "model_not_loaded", "no aging model is loaded")
        if direction not in DIRECTIONS:
            raise ApiError(
                400,
                "bad_direction",
                f"direction must be one of {list(DIRECTIONS)}, got {direction!r}",
            )
        data = await _read_upload(audio, "audio")
        clip = _decode_clip(data)
        segments = _require_segments(clip)
        result = transform_audio(store.cyclegan, clip, direction)
        wav_bytes = save_wav(result)
        if not return_spectrograms:
            return Response(content=wav_bytes, media_type="audio/wav")
        out_segments = segment(result)
        return {
            "audio_wav_base64": base64.b64encode(wav_bytes).decode("ascii"),
            "input_spectrogram_png_base64": _spectrogram_png(segments[0]),
            "output_spectrogram_png_base64": _spectrogram_png(out_segments[0]),
        }

    @app.post("/api/predict")
    async def predict(
        audio: UploadFile | None = File(default=None),
        face: UploadFile | None = File(default=None),
    ):
        if audio is None and face is None:
            raise ApiError(400, "missing_audio", "request needs an audio or face file field")
        if audio is None:
            if store.visual is None:
                raise ApiError(
                    400,
                    "missing_audio",
                    "face-only prediction needs a visual checkpoint; none is loaded",
                )
            loaded = store.visual
            face_data = await _read_upload(face, "face")
            visual_input = _load_face(face_data)
            with nn.no_grad():
                logits = loaded.model(nn.Tensor(visual_input[np.newaxis]), training=False)
                probs = ops.softmax(logits).data
            return _prediction_payload(loaded, probs.mean(axis=0), "visual", segments=0)

        data = await _read_upload(audio, "audio")
        clip = _decode_clip(data)
        segments = _require_segments(clip)
        inputs = np.stack([segment_input(s) for s in segments])

        if face is not None:
            if store.fused is None:
                raise ApiError(503, "model_not_loaded", "no fused audio+face model is loaded")
            loaded = store.fused
            face_data = await _read_upload(face, "face")
            visual_input = _load_face(face_data)
            visual_batch = np.repeat(visual_input[np.newaxis], len(segments), axis=0)
            with nn.no_grad():
                logits = loaded.model(
                    nn.Tensor(inputs), nn.Tensor(visual_batch), training=False
                )
                probs = ops.softmax(logits).data
            modality = "audio+visual"
        else:
            if store.audio is None:
                raise ApiError(503, "model_not_loaded", "no audio classifier is loaded")
            loaded = store.audio
            with nn.no_grad():
                logits = loaded.model(nn.Tensor(inputs), training=False)
                probs = ops.softmax(logits).data
            modality = "audio"
        return _prediction_payload(loaded, probs.mean(axis=0), modality, segments=len(segments))

    frontend_dir = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if frontend_dir.is_dir():
        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="frontend")
    return app


def _load_face(data: bytes) -> np.ndarray:
    try:
        buffer = io.BytesIO(data)
        return load_face_crop(buffer)
    except (FormatError, VoiceAgeError) as exc:
        raise ApiError(400, "bad_face", f"face image not decodable: {exc}") from exc


def _prediction_payload(
    loaded: LoadedClassifier, mean_probs: np.ndarray, modality: str, segments: int
) -> dict:
    index = int(np.argmax(mean_probs))
    return {
        "scheme": loaded.scheme.name,
        "label": loaded.scheme.labels[index],
        "class_index": index,
        "probabilities": {
            label: float(p) for label, p in zip(loaded.scheme.labels, mean_probs)
        },
        "modality": modality,
        "segments": segments,
    }
