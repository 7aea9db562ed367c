"""Acceptance gate: one test per release criterion.

Each test prints a single [PASS]/[FAIL] line with its measured
numbers (run pytest with -s to watch them stream). Budgets are
asserted, not aspirational: a slow pass is a fail.
"""

import socket
import subprocess
import sys
import time
from datetime import date

import httpx
import numpy as np
import pytest

from conftest import band_image, band_task_dataset, tone_clip
from test_audio import _direct_dft_frame
from test_autodiff import (
    CASES,
    SHAPES_PER_OP,
    TOLERANCE,
    _evaluate,
    _numeric_grad,
    _relative_error,
    _scalarize,
)
from voiceage import codec, nn
from voiceage.artifacts import save_cyclegan
from voiceage.audio.clip import AudioClip
from voiceage.audio.griffin_lim import griffin_lim
from voiceage.audio.mel import MelSpectrogram, mel_spectrogram
from voiceage.audio.stft import StftConfig, stft
from voiceage.audio.wav import load_wav, save_wav
from voiceage.data.ages import compute_age
from voiceage.data.manifest import (
    ManifestEntry,
    SpeakerRecord,
    VideoRecord,
    build_manifest,
    split_holdout,
)
from voiceage.gan.training import CycleGanConfig, CycleGanModel, DomainPair, train
from voiceage.gan.transform import transform_audio
from voiceage.models.training import LabeledDataset, train_classifier
from voiceage.models.vann import VannConfig, build_model


def report(name: str, ok: bool, detail: str) -> None:
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_codec_exactness():
    """decode_pixel(encode_pixel(c)) == c on 1e5 random codes plus the
    corner codes, in under a second."""
    rng = np.random.default_rng(0)
    codes = rng.integers(0, codec.CODE_MAX + 1, size=100_000).tolist()
    codes += [0, 65793, codec.CODE_MAX]
    started = time.perf_counter()
    failures = sum(
        1 for code in codes if codec.decode_pixel(*codec.encode_pixel(code)) != code
    )
    elapsed = time.perf_counter() - started
    report(
        "codec exactness",
        failures == 0 and elapsed < 1.0,
        f"{len(codes)} codes, {failures} failures, {elapsed:.2f}s (budget 1s)",
    )


def test_spectrogram_round_trip():
    """Amplitudes survive encode/decode to within one code quantum
    (a factor of exp(1/scale)) on every cell of 100 random mels."""
    cfg = codec.ScaleConfig()
    scale = cfg.scale
    rng = np.random.default_rng(1)
    worst = 0.0
    violations = 0
    for _ in range(100):
        log_amps = rng.uniform(np.log(cfg.amp_floor), np.log(cfg.amp_ceil), (128, 128))
        mel = MelSpectrogram(np.exp(log_amps))
        decoded = codec.decode_spectrogram(codec.encode_spectrogram(mel, cfg))
        log_error = np.abs(np.log(decoded.values) - np.log(mel.values))
        worst = max(worst, float(log_error.max()))
        violations += int(np.count_nonzero(log_error > (1.0 / scale) * (1 + 1e-9)))
    report(
        "spectrogram round trip",
        violations == 0,
        f"100 mels, worst |log error| {worst:.3e} vs quantum {1.0 / scale:.3e}, "
        f"{violations} violations",
    )


def test_dsp_correctness():
    """STFT agrees with an O(n^2) DFT oracle to 1e-6 relative; phase
    estimation pins a 1 kHz tone to within one FFT bin."""
    started = time.perf_counter()
    config = StftConfig()
    worst_rel = 0.0
    for seed in (11, 12, 13):
        rng = np.random.default_rng(seed)
        clip = AudioClip(rng.normal(0.0, 0.5, 3840), 16000)
        spec = stft(clip, config)
        for frame in range(spec.bins.shape[1]):
            oracle = _direct_dft_frame(clip, config, frame)
            scale = np.max(np.abs(oracle))
            rel = float(np.max(np.abs(spec.bins[:, frame] - oracle)) / scale)
            worst_rel = max(worst_rel, rel)

    clip = tone_clip(1000.0, seconds=0.24, amplitude=0.5)
    restored = griffin_lim(mel_spectrogram(clip), iterations=32)
    spectrum = np.abs(np.fft.rfft(restored.samples))
    dominant = float(np.argmax(spectrum) * 16000 / len(restored.samples))
    bin_width = 16000 / config.fft_size
    pitch_error = abs(dominant - 1000.0)
    elapsed = time.perf_counter() - started
    report(
        "dsp correctness",
        worst_rel < 1e-6 and pitch_error <= bin_width and elapsed < 30.0,
        f"stft worst rel {worst_rel:.2e} (limit 1e-6), tone at {dominant:.1f} Hz "
        f"(error {pitch_error:.2f} Hz, limit {bin_width:.3f}), {elapsed:.1f}s (budget 30s)",
    )


def test_gradient_suite():
    """Every operator's analytic gradient matches 64-bit central
    differences to 1e-4 relative over 20 fresh random shapes."""
    started = time.perf_counter()
    worst = 0.0
    checked = 0
    for case_index, case in enumerate(CASES):
        for trial in range(SHAPES_PER_OP):
            rng = np.random.default_rng(9_000_000 + 1009 * case_index + trial)
            arrays, fn = case(rng)
            arrays = [np.asarray(a, dtype=np.float64) for a in arrays]
            with nn.no_grad():
                probe = fn(*[nn.Tensor(a) for a in arrays])
            projection = rng.standard_normal(probe.shape) if probe.ndim else None
            scalar_fn = _scalarize(fn, projection)
            tensors = [nn.Tensor(a, requires_grad=True) for a in arrays]
            scalar_fn(*tensors).backward()
            for index, tensor in enumerate(tensors):
                numeric = _numeric_grad(scalar_fn, arrays, index)
                worst = max(worst, _relative_error(tensor.grad, numeric))
                checked += 1
    elapsed = time.perf_counter() - started
    report(
        "gradient suite",
        worst < TOLERANCE and elapsed < 120.0,
        f"{len(CASES)} ops x {SHAPES_PER_OP} shapes ({checked} gradients), "
        f"worst rel {worst:.2e} (limit {TOLERANCE}), {elapsed:.1f}s (budget 120s)",
    )


def test_classifier_sanity():
    """The audio classifier separates low-band from high-band synthetic
    spectrograms at batch 32, reproducibly per seed."""
    started = time.perf_counter()
    config = VannConfig(
        modality="audio",
        class_count=2,
        conv_filters=4,
        dense_width=16,
        epochs=8,
        batch_size=32,
    )
    train_set = band_task_dataset(256, seed=10)
    test_set = band_task_dataset(80, seed=11)
    records = train_classifier(build_model(config, seed=0), config, train_set, test_set, seed=0)
    accuracy = records[-1].test_acc
    repeat = train_classifier(build_model(config, seed=0), config, train_set, test_set, seed=0)
    elapsed = time.perf_counter() - started
    report(
        "classifier sanity",
        accuracy >= 0.95 and records == repeat and elapsed < 600.0,
        f"test accuracy {accuracy:.3f} after {config.epochs} epochs at batch 32 "
        f"(floor 0.95), reruns identical: {records == repeat}, {elapsed:.0f}s (budget 600s)",
    )


def _color_image(blue: bool, rng: np.random.Generator) -> np.ndarray:
    img = rng.normal(0.15, 0.05, size=(3, 128, 128)).astype(np.float32)
    img[2 if blue else 0] += 0.6
    return np.clip(img, 0.0, 1.0)


def _xor_dataset(n: int, seed: int) -> LabeledDataset:
    """Label = (audio band is high) XOR (face is blue), so neither
    modality alone carries any signal."""
    rng = np.random.default_rng(seed)
    audio, visual, labels = [], [], []
    for _ in range(n):
        high = bool(rng.integers(0, 2))
        blue = bool(rng.integers(0, 2))
        audio.append(band_image(96 if high else 30, seed=int(rng.integers(1 << 31))))
        visual.append(_color_image(blue, rng))
        labels.append(int(high != blue))
    return LabeledDataset(
        inputs=np.stack(audio),
        labels=np.array(labels, dtype=np.int64),
        visual=np.stack(visual),
    )


def test_fusion_ordering():
    """On a both-modalities task the fused model beats each single-modality
    model by at least five points."""
    started = time.perf_counter()
    train_full = _xor_dataset(240, seed=20)
    test_full = _xor_dataset(80, seed=21)

    def run(modality: str) -> float:
        config = VannConfig(
            modality=modality,
            class_count=2,
            conv_filters=4,
            dense_width=16,
            mfb_factors=4,
            mfb_output=32,
            epochs=6,
            batch_size=32,
        )
        if modality == "audio":
            tr = LabeledDataset(inputs=train_full.inputs, labels=train_full.labels)
            te = LabeledDataset(inputs=test_full.inputs, labels=test_full.labels)
        elif modality == "visual":
            tr = LabeledDataset(inputs=train_full.visual, labels=train_full.labels)
            te = LabeledDataset(inputs=test_full.visual, labels=test_full.labels)
        else:
            tr, te = train_full, test_full
        records = train_classifier(build_model(config, seed=0), config, tr, te, seed=0)
        return records[-1].test_acc

    audio_acc = run("audio")
    visual_acc = run("visual")
    fused_acc = run("av-mfb")
    margin = fused_acc - max(audio_acc, visual_acc)
    elapsed = time.perf_counter() - started
    report(
        "fusion ordering",
        margin >= 0.05,
        f"audio {audio_acc:.3f}, visual {visual_acc:.3f}, fused {fused_acc:.3f}, "
        f"margin {margin:+.3f} (floor +0.05), {elapsed:.0f}s",
    )


def _pitched_band_domain(rng: np.random.Generator, n: int, center: float) -> np.ndarray:
    rows = np.arange(32, dtype=np.float32)
    profile = np.exp(-0.5 * ((rows - center) / 3.0) ** 2)
    images = rng.normal(0.0, 0.05, size=(n, 3, 32, 32)).astype(np.float32)
    images += profile[np.newaxis, np.newaxis, :, np.newaxis] * 1.6 - 0.8
    return np.clip(images, -1.0, 1.0).astype(np.float32)


def test_cyclegan_toy_run():
    """Fifty epochs on pitched-band domains: cycle loss halves, the
    band detector sees domain B in the generator's output, and every
    logged loss stays finite."""
    started = time.perf_counter()
    a_center, b_center = 8.0, 24.0
    rng = np.random.default_rng(42)
    domains = DomainPair(
        _pitched_band_domain(rng, 8, a_center), _pitched_band_domain(rng, 8, b_center)
    )
    config = CycleGanConfig(
        gen_filters=8,
        disc_filters=16,
        residual_blocks=2,
        epochs=50,
        batch_size=2,
        snapshot_epochs=(),
    )
    model = CycleGanModel(config, seed=0)
    reports = train(model, domains, config, seed=0)

    first = reports[0].cycle_aba + reports[0].cycle_bab
    last = reports[-1].cycle_aba + reports[-1].cycle_bab
    ratio = last / first

    def band_mean(img: np.ndarray, center: float, half: int = 4) -> float:
        return float(img[:, int(center) - half : int(center) + half, :].mean())

    with nn.no_grad():
        fakes = model.g(nn.Tensor(domains.domain_a)).data
    hits = sum(
        1 for fake in fakes if band_mean(fake, b_center) > band_mean(fake, a_center)
    )
    detector_rate = hits / len(fakes)

    finite = all(
        np.isfinite([r.d_a, r.d_b, r.g_adv, r.f_adv, r.cycle_aba, r.cycle_bab]).all()
        for r in reports
    )
    elapsed = time.perf_counter() - started
    report(
        "cyclegan toy run",
        ratio <= 0.5 and detector_rate >= 0.8 and finite and elapsed < 1800.0,
        f"epoch-50/epoch-1 cycle ratio {ratio:.3f} (limit 0.5), band detector "
        f"{hits}/{len(fakes)} as B (floor 80%), finite: {finite}, {elapsed:.0f}s (budget 1800s)",
    )


def test_end_to_end_transform():
    """One second of audio ages into 0.96 seconds, and a fixed seed
    fixes the output bytes."""
    config = CycleGanConfig(gen_filters=4, disc_filters=8, residual_blocks=1)
    clip = tone_clip(440.0, seconds=1.0, amplitude=0.4)
    outputs = [
        save_wav(transform_audio(CycleGanModel(config, seed=123), clip, "older"))
        for _ in range(2)
    ]
    result = load_wav(outputs[0])
    seconds = len(result.samples) / result.sample_rate
    report(
        "end-to-end transform",
        seconds == 0.96 and outputs[0] == outputs[1],
        f"1.00s in, {seconds:.2f}s out at {result.sample_rate} Hz, "
        f"deterministic bytes: {outputs[0] == outputs[1]}",
    )


def test_age_labeling():
    """Calendar arithmetic hits the three reference examples, the capped
    manifest keeps exactly 45 videos, and the holdout is seed-stable."""
    calendar_ok = (
        compute_age(date(1960, 1, 1), date(2010, 6, 1)) == 50
        and compute_age(date(1960, 12, 31), date(2010, 6, 1)) == 49
        and compute_age(date(2010, 6, 1), date(2010, 6, 1)) == 0
    )

    speakers = [SpeakerRecord(f"spk{i}", date(1970, 1, 1)) for i in range(3)]
    videos = [
        VideoRecord(f"spk{i}_v{j:02d}", f"spk{i}", date(2010, 7, 1))
        for i in range(3)
        for j in range(20)
    ]
    index = {v.video_id: [(f"{v.video_id}.wav", None)] for v in videos}
    entries, _ = build_manifest(speakers, videos, 15, index)
    video_count = len({e.audio_segment_path for e in entries})

    big = [ManifestEntry(f"seg{i}.wav", None, 40, f"spk{i % 7}") for i in range(100)]
    split_stable = split_holdout(big, 20, seed=5) == split_holdout(big, 20, seed=5)
    split_moves = split_holdout(big, 20, seed=5) != split_holdout(big, 20, seed=6)

    report(
        "age labeling",
        calendar_ok and video_count == 45 and split_stable and split_moves,
        f"calendar examples: {calendar_ok}, capped videos: {video_count} (want 45), "
        f"holdout stable per seed: {split_stable}, seed-sensitive: {split_moves}",
    )


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


class _RunningService:
    """A real uvicorn process serving the app, torn down on exit."""

    def __init__(self, model_dir: str | None):
        self.port = _free_port()
        self.base = f"http://127.0.0.1:{self.port}"
        script = (
            "import sys, uvicorn\n"
            "from voiceage.service import create_app\n"
            "app = create_app(sys.argv[1] or None)\n"
            "uvicorn.run(app, host='127.0.0.1', port=int(sys.argv[2]), log_level='error')\n"
        )
        self.process = subprocess.Popen(
            [sys.executable, "-c", script, model_dir or "", str(self.port)],
            stdout=subprocess.DEVNULL,
            stderr=subprocess.DEVNULL,
        )

    def __enter__(self) -> str:
        deadline = time.time() + 20.0
        while time.time() < deadline:
            try:
                if httpx.get(self.base + "/api/health", timeout=1.0).status_code == 200:
                    return self.base
            except httpx.TransportError:
                time.sleep(0.1)
        self.process.terminate()
        raise RuntimeError("service did not come up in 20s")

    def __exit__(self, *exc) -> None:
        self.process.terminate()
        self.process.wait(timeout=10)


def test_service_contract(tmp_path):
    """Against live instances: the three transform error envelopes, the
    happy path, and byte-identical repeat responses."""
    config = CycleGanConfig(gen_filters=4, disc_filters=8, residual_blocks=1)
    save_cyclegan(tmp_path / "cyclegan.ckpt", CycleGanModel(config, seed=0), config)
    wav_bytes = save_wav(tone_clip(440.0, seconds=1.0))
    short_bytes = save_wav(tone_clip(440.0, seconds=0.1))

    with _RunningService(str(tmp_path)) as base:
        happy = httpx.post(
            base + "/api/transform",
            files={"audio": ("clip.wav", wav_bytes, "audio/wav")},
            data={"direction": "older"},
            timeout=60.0,
        )
        again = httpx.post(
            base + "/api/transform",
            files={"audio": ("clip.wav", wav_bytes, "audio/wav")},
            data={"direction": "older"},
            timeout=60.0,
        )
        bad_direction = httpx.post(
            base + "/api/transform",
            files={"audio": ("clip.wav", wav_bytes, "audio/wav")},
            data={"direction": "sideways"},
            timeout=30.0,
        )
        too_short = httpx.post(
            base + "/api/transform",
            files={"audio": ("clip.wav", short_bytes, "audio/wav")},
            data={"direction": "older"},
            timeout=30.0,
        )

    with _RunningService(None) as base:
        no_model = httpx.post(
            base + "/api/transform",
            files={"audio": ("clip.wav", wav_bytes, "audio/wav")},
            data={"direction": "older"},
            timeout=30.0,
        )

    out_clip = load_wav(happy.content)
    happy_ok = (
        happy.status_code == 200
        and happy.headers["content-type"] == "audio/wav"
        and len(out_clip.samples) == 15360
    )
    errors_ok = (
        bad_direction.status_code == 400
        and bad_direction.json()["error"]["code"] == "bad_direction"
        and too_short.status_code == 422
        and too_short.json()["error"]["code"] == "audio_too_short"
        and no_model.status_code == 503
        and no_model.json()["error"]["code"] == "model_not_loaded"
    )
    repeat_ok = happy.content == again.content
    report(
        "service contract",
        happy_ok and errors_ok and repeat_ok,
        f"happy 200 with 0.96s wav: {happy_ok}, envelopes 400/422/503: {errors_ok}, "
        f"byte-identical repeats: {repeat_ok}",
    )
