"""Model bundles on disk.

A bundle is a checkpoint file plus a JSON sidecar of the same stem
describing how to rebuild the network before loading its weights:
kind, configuration fields, and for classifiers the binning scheme.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

from voiceage import nn
from voiceage.errors import FormatError
from voiceage.gan.training import CycleGanConfig, CycleGanModel
from voiceage.models.bins import SCHEMES, AgeBinScheme
from voiceage.models.vann import VannConfig, build_model


def sidecar_path(checkpoint_path: str | Path) -> Path:
    return Path(checkpoint_path).with_suffix(".json")


def _read_sidecar(checkpoint_path: str | Path, expected_kind: str) -> dict:
    path = sidecar_path(checkpoint_path)
    try:
        record = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"unreadable model sidecar at {path}: {exc}") from exc
    if record.get("kind") != expected_kind:
        raise FormatError(
            f"{path} describes kind {record.get('kind')!r}, expected {expected_kind!r}"
        )
    return record


def save_vann(
    checkpoint_path: str | Path,
    model: nn.Module,
    config: VannConfig,
    scheme: AgeBinScheme,
) -> None:
    nn.save_checkpoint(checkpoint_path, model.state_arrays())
    record = {
        "kind": "vann",
        "scheme": scheme.name,
        "config": dataclasses.asdict(config),
    }
    sidecar_path(checkpoint_path).write_text(
        json.dumps(record, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_vann(checkpoint_path: str | Path) -> tuple[nn.Module, VannConfig, AgeBinScheme]:
    record = _read_sidecar(checkpoint_path, "vann")
    try:
        config = VannConfig(**record["config"])
        scheme = SCHEMES[record["scheme"]]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad model sidecar for {checkpoint_path}: {exc}") from exc
    model = build_model(config)
    model.load_state(nn.load_checkpoint(checkpoint_path))
    return model, config, scheme


def save_cyclegan(
    checkpoint_path: str | Path, model: CycleGanModel, config: CycleGanConfig
) -> None:
    nn.save_checkpoint(checkpoint_path, model.state_arrays())
    record = {"kind": "cyclegan", "config": dataclasses.asdict(config)}
    sidecar_path(checkpoint_path).write_text(
        json.dumps(record, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_cyclegan(checkpoint_path: str | Path) -> tuple[CycleGanModel, CycleGanConfig]:
    record = _read_sidecar(checkpoint_path, "cyclegan")
    try:
        raw = dict(record["config"])
        if "snapshot_epochs" in raw:
            raw["snapshot_epochs"] = tuple(raw["snapshot_epochs"])
        config = CycleGanConfig(**raw)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad model sidecar for {checkpoint_path}: {exc}") from exc
    model = CycleGanModel(config)
    model.load_state(nn.load_checkpoint(checkpoint_path))
    return model, config
