"""Command-line entry points.

Each subcommand maps onto one library operation: ingest builds
manifests, train-vann and train-cyclegan produce model bundles,
evaluate and stats report on them, transform runs the offline aging
pipeline, and serve starts the HTTP service.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from voiceage import codec
from voiceage.artifacts import load_cyclegan, save_cyclegan, save_vann
from voiceage.audio.wav import load_wav, save_wav
from voiceage.data.features import dataset_from_manifest
from voiceage.data.manifest import (
    build_manifest,
    load_speakers,
    load_videos,
    read_manifest,
    split_holdout,
    write_manifest,
)
from voiceage.data.stats import dataset_stats
from voiceage.errors import ValidationError, VoiceAgeError
from voiceage.gan.training import CycleGanConfig, CycleGanModel, DomainPair
from voiceage.gan.training import train as train_gan
from voiceage.gan.transform import DIRECTIONS, normalize_image, transform_audio
from voiceage.models.bins import SCHEMES
from voiceage.models.training import LabeledDataset, evaluate, train_classifier
from voiceage.models.vann import MODALITIES, VannConfig, build_model


def _scan_segments(
    segments_dir: Path, faces_dir: Path | None
) -> dict[str, list[tuple[str, str | None]]]:
    """Map video id (subdirectory name) to its (wav, face) pairs.

    A face crop pairs with a segment when it shares the stem under
    faces_dir/<video_id>/.
    """
    index: dict[str, list[tuple[str, str | None]]] = {}
    for video_dir in sorted(p for p in segments_dir.iterdir() if p.is_dir()):
        pairs: list[tuple[str, str | None]] = []
        for wav_path in sorted(video_dir.glob("*.wav")):
            face_path: str | None = None
            if faces_dir is not None:
                for suffix in (".png", ".jpg", ".jpeg"):
                    candidate = faces_dir / video_dir.name / (wav_path.stem + suffix)
                    if candidate.exists():
                        face_path = str(candidate)
                        break
            pairs.append((str(wav_path), face_path))
        if pairs:
            index[video_dir.name] = pairs
    return index


def cmd_ingest(args: argparse.Namespace) -> int:
    speakers = load_speakers(args.speakers)
    videos = load_videos(args.videos)
    faces_dir = Path(args.faces_dir) if args.faces_dir else None
    index = _scan_segments(Path(args.segments_dir), faces_dir)
    entries, warnings = build_manifest(speakers, videos, args.cap, index)
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if args.test_size:
        scheme = SCHEMES[args.stratify_scheme] if args.stratify_scheme else None
        entries = split_holdout(
            entries, args.test_size, args.seed, scheme, speaker_disjoint=args.speaker_disjoint
        )
    write_manifest(entries, args.out)
    print(f"wrote {len(entries)} entries to {args.out}")
    return 0


def cmd_train_vann(args: argparse.Namespace) -> int:
    scheme = SCHEMES[args.scheme]
    config = VannConfig(
        modality=args.modality,
        class_count=scheme.class_count,
        conv_filters=args.conv_filters,
        dense_width=args.dense_width,
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.lr,
    )
    entries = read_manifest(args.manifest)
    with_visual = args.modality in ("visual", "av-cat", "av-mfb")

    def load_split(split: str) -> LabeledDataset:
        dataset = dataset_from_manifest(entries, scheme, split, with_visual=with_visual)
        if args.modality == "visual":
            # face crops are the sole input for the visual model
            return LabeledDataset(inputs=dataset.visual, labels=dataset.labels)
        return dataset

    train_set = load_split("train")
    test_set = load_split("test") if any(e.split == "test" for e in entries) else None

    model = build_model(config, seed=args.seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    checkpoint = out_dir / f"vann-{args.modality}.ckpt"
    records = train_classifier(
        model,
        config,
        train_set,
        test_set,
        seed=args.seed,
        log_path=args.log,
        checkpoint_path=checkpoint,
        resume=args.resume,
    )
    save_vann(checkpoint, model, config, scheme)
    last = records[-1] if records else None
    if last is not None:
        print(f"epoch {last.epoch}: train_loss {last.train_loss:.4f} test_acc {last.test_acc:.4f}")
    print(f"saved {checkpoint}")
    return 0


def _load_domain(directory: Path) -> np.ndarray:
    images = []
    for path in sorted(directory.glob("*.png")):
        img = codec.load_png(path.read_bytes())
        images.append(normalize_image(img.pixels))
    if not images:
        raise ValidationError(f"no PNG images under {directory}")
    return np.stack(images)


def cmd_train_cyclegan(args: argparse.Namespace) -> int:
    config = CycleGanConfig(
        gen_filters=args.gen_filters,
        disc_filters=args.disc_filters,
        residual_blocks=args.residual_blocks,
        cycle_weight=args.cycle_weight,
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.lr,
    )
    domains = DomainPair(_load_domain(Path(args.domain_a)), _load_domain(Path(args.domain_b)))
    model = CycleGanModel(config, seed=args.seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    checkpoint = out_dir / "cyclegan.ckpt"
    reports = train_gan(
        model,
        domains,
        config,
        seed=args.seed,
        log_path=args.log,
        checkpoint_path=checkpoint,
        snapshot_dir=args.snapshot_dir,
    )
    save_cyclegan(checkpoint, model, config)
    print(reports[-1].line())
    print(f"saved {checkpoint}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    from voiceage.artifacts import load_vann

    model, config, scheme = load_vann(args.model)
    if args.scheme and args.scheme != scheme.name:
        raise ValidationError(
            f"model was trained for scheme {scheme.name!r}, not {args.scheme!r}"
        )
    entries = read_manifest(args.manifest)
    with_visual = config.modality in ("av-cat", "av-mfb")
    dataset = dataset_from_manifest(entries, scheme, args.split, with_visual=with_visual)
    accuracy, matrix = evaluate(model, dataset, scheme.labels)
    print(f"accuracy: {accuracy:.4f} over {matrix.total} samples")
    if args.confusion_out:
        Path(args.confusion_out).write_text(matrix.to_csv(), encoding="utf-8")
        print(f"wrote confusion matrix to {args.confusion_out}")
    return 0


def cmd_transform(args: argparse.Namespace) -> int:
    model, _ = load_cyclegan(args.model)
    clip = load_wav(Path(args.input).read_bytes())
    result = transform_audio(model, clip, args.direction, griffin_lim_iterations=args.iterations)
    Path(args.out).write_bytes(save_wav(result))
    print(f"wrote {result.duration:.2f}s to {args.out}")
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    entries = read_manifest(args.manifest)
    report = dataset_stats(entries)
    print(report.to_text(), end="")
    if args.csv:
        Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
        print(f"wrote {args.csv}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from voiceage.service import create_app

    app = create_app(args.model_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="voiceage", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build a manifest from metadata and segment files")
    p.add_argument("--speakers", required=True, help="JSON list of speaker records")
    p.add_argument("--videos", required=True, help="JSON list of video records")
    p.add_argument("--segments-dir", required=True, help="root of <video_id>/*.wav segments")
    p.add_argument("--faces-dir", default=None, help="root of <video_id>/*.png face crops")
    p.add_argument("--cap", type=int, default=15, help="max videos per speaker (default 15)")
    p.add_argument("--test-size", type=int, default=0, help="held-out entry count (default 0)")
    p.add_argument("--stratify-scheme", choices=sorted(SCHEMES), default=None,
                   help="require every class of this scheme in the train split")
    p.add_argument("--speaker-disjoint", action="store_true",
                   help="hold out whole speakers so none straddles the split")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="manifest path to write")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train-vann", help="train an age classifier from a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--scheme", choices=sorted(SCHEMES), default="ab")
    p.add_argument("--modality", choices=MODALITIES, default="audio")
    p.add_argument("--epochs", type=int, default=40, help="default 40")
    p.add_argument("--batch-size", type=int, default=32, help="default 32")
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--conv-filters", type=int, default=16)
    p.add_argument("--dense-width", type=int, default=128)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--resume", action="store_true", help="continue from the saved checkpoint")
    p.add_argument("--log", default=None, help="training log path")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_train_vann)

    p = sub.add_parser("train-cyclegan", help="train the aging GAN on two PNG directories")
    p.add_argument("--domain-a", required=True, help="directory of young-voice spectrogram PNGs")
    p.add_argument("--domain-b", required=True, help="directory of old-voice spectrogram PNGs")
    p.add_argument("--epochs", type=int, default=50, help="default 50")
    p.add_argument("--batch-size", type=int, default=1)
    p.add_argument("--lr", type=float, default=2e-4)
    p.add_argument("--gen-filters", type=int, default=32)
    p.add_argument("--disc-filters", type=int, default=64)
    p.add_argument("--residual-blocks", type=int, default=4)
    p.add_argument("--cycle-weight", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--log", default=None, help="loss log path")
    p.add_argument("--snapshot-dir", default=None, help="where sample PNGs land")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_train_cyclegan)

    p = sub.add_parser("evaluate", help="score a classifier bundle on a manifest split")
    p.add_argument("--manifest", required=True)
    p.add_argument("--model", required=True, help="classifier checkpoint path")
    p.add_argument("--scheme", choices=sorted(SCHEMES), default=None,
                   help="assert the bundle's scheme matches")
    p.add_argument("--split", choices=("train", "test"), default="test")
    p.add_argument("--confusion-out", default=None, help="CSV path for the confusion matrix")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("transform", help="age a WAV file offline")
    p.add_argument("--in", dest="input", required=True, help="input WAV path")
    p.add_argument("--direction", choices=DIRECTIONS, required=True)
    p.add_argument("--model", required=True, help="aging model checkpoint path")
    p.add_argument("--iterations", type=int, default=32, help="phase estimation rounds")
    p.add_argument("--out", required=True, help="output WAV path")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("stats", help="summarize a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--csv", default=None, help="also write the report as CSV")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--model-dir", default=None, help="checkpoint directory (or VOICEAGE_MODEL_DIR)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VoiceAgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
