"""Two-domain adversarial training with cycle consistency.

Generator g maps domain A (young voices) to domain B (old voices),
f maps back. Discriminators d_a and d_b judge each domain under
least-squares targets: real patches toward 1, generated toward 0.
Each step updates the generators first, then the discriminators on
the fakes produced before that update.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from voiceage import codec, nn
from voiceage.errors import ValidationError
from voiceage.gan.nets import Discriminator, Generator
from voiceage.nn.rng import derive_rng

LOG_HEADER = "epoch\td_a\td_b\tg_adv\tf_adv\tcycle_aba\tcycle_bab"


@dataclass(frozen=True)
class CycleGanConfig:
    gen_filters: int = 32
    disc_filters: int = 64
    residual_blocks: int = 4
    cycle_weight: float = 10.0
    epochs: int = 50
    batch_size: int = 1
    learning_rate: float = 2e-4
    beta1: float = 0.5
    snapshot_epochs: tuple[int, ...] = (1, 41)

    def __post_init__(self) -> None:
        if self.cycle_weight <= 0:
            raise ValidationError(f"cycle_weight must be > 0, got {self.cycle_weight}")
        for field in ("gen_filters", "disc_filters", "residual_blocks", "epochs", "batch_size"):
            if getattr(self, field) < 1:
                raise ValidationError(f"{field} must be >= 1")


class CycleGanModel(nn.Module):
    """Both generators and both discriminators under one parameter tree."""

    def __init__(self, config: CycleGanConfig, seed: int = 0):
        self.config = config
        self.g = Generator(config.gen_filters, config.residual_blocks, seed, "g")
        self.f = Generator(config.gen_filters, config.residual_blocks, seed, "f")
        self.d_a = Discriminator(config.disc_filters, seed, "d_a")
        self.d_b = Discriminator(config.disc_filters, seed, "d_b")

    def generator_parameters(self) -> list[tuple[str, nn.Parameter]]:
        return self.g.named_parameters("g") + self.f.named_parameters("f")

    def discriminator_parameters(self) -> list[tuple[str, nn.Parameter]]:
        return self.d_a.named_parameters("d_a") + self.d_b.named_parameters("d_b")


@dataclass(frozen=True)
class DomainPair:
    """Unpaired image sets, each (N, 3, H, W) float32 in [-1, 1]."""

    domain_a: np.ndarray
    domain_b: np.ndarray

    def __post_init__(self) -> None:
        for name, images in (("domain_a", self.domain_a), ("domain_b", self.domain_b)):
            arr = np.asarray(images, dtype=np.float32)
            if arr.ndim != 4 or arr.shape[0] == 0 or arr.shape[1] != 3:
                raise ValidationError(f"{name} must be non-empty (N, 3, H, W), got {arr.shape}")
            if np.abs(arr).max() > 1.0 + 1e-6:
                raise ValidationError(f"{name} values must lie in [-1, 1]")
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class LossReport:
    """Per-epoch means; every value must be finite and non-negative."""

    epoch: int
    d_a: float
    d_b: float
    g_adv: float
    f_adv: float
    cycle_aba: float
    cycle_bab: float

    def __post_init__(self) -> None:
        for field in ("d_a", "d_b", "g_adv", "f_adv", "cycle_aba", "cycle_bab"):
            value = getattr(self, field)
            if not math.isfinite(value) or value < 0:
                raise ValidationError(f"{field} must be finite and >= 0, got {value}")

    def line(self) -> str:
        return (
            f"{self.epoch}\t{self.d_a:.6f}\t{self.d_b:.6f}\t{self.g_adv:.6f}"
            f"\t{self.f_adv:.6f}\t{self.cycle_aba:.6f}\t{self.cycle_bab:.6f}"
        )


@dataclass
class StepLosses:
    """One step's loss graph, ready for the two backward passes."""

    g_adv: nn.Tensor
    f_adv: nn.Tensor
    cycle_aba: nn.Tensor
    cycle_bab: nn.Tensor
    d_a: nn.Tensor
    d_b: nn.Tensor
    fake_a: np.ndarray
    fake_b: np.ndarray

    def generator_loss(self, cycle_weight: float) -> nn.Tensor:
        return generator_total(self.g_adv + self.f_adv, self.cycle_aba + self.cycle_bab, cycle_weight)

    def discriminator_loss(self) -> nn.Tensor:
        return self.d_a + self.d_b


def generator_total(adversarial, cycle, cycle_weight: float):
    """adversarial + cycle_weight * cycle, e.g. (0.5, 0.2, 10) -> 2.5."""
    return adversarial + cycle * cycle_weight


def compute_losses(model, real_a: nn.Tensor, real_b: nn.Tensor) -> StepLosses:
    """All six losses for one batch pair.

    Discriminator terms see the fakes as constants, so their backward
    pass never reaches the generators.
    """
    fake_b = model.g(real_a)
    fake_a = model.f(real_b)
    rec_a = model.f(fake_b)
    rec_b = model.g(fake_a)

    score_fake_b = model.d_b(fake_b)
    score_fake_a = model.d_a(fake_a)
    g_adv = nn.mse(score_fake_b, np.ones(score_fake_b.shape, dtype=np.float32))
    f_adv = nn.mse(score_fake_a, np.ones(score_fake_a.shape, dtype=np.float32))
    cycle_aba = nn.l1(rec_a, real_a.data)
    cycle_bab = nn.l1(rec_b, real_b.data)

    def disc_loss(disc, real: nn.Tensor, fake_data: np.ndarray) -> nn.Tensor:
        real_score = disc(real)
        fake_score = disc(nn.Tensor(fake_data))
        loss_real = nn.mse(real_score, np.ones(real_score.shape, dtype=np.float32))
        loss_fake = nn.mse(fake_score, np.zeros(fake_score.shape, dtype=np.float32))
        return (loss_real + loss_fake) * 0.5

    d_a = disc_loss(model.d_a, real_a, fake_a.data)
    d_b = disc_loss(model.d_b, real_b, fake_b.data)
    return StepLosses(
        g_adv=g_adv,
        f_adv=f_adv,
        cycle_aba=cycle_aba,
        cycle_bab=cycle_bab,
        d_a=d_a,
        d_b=d_b,
        fake_a=fake_a.data.copy(),
        fake_b=fake_b.data.copy(),
    )


def _save_snapshots(directory: Path, epoch: int, losses: StepLosses) -> None:
    from voiceage.gan.transform import denormalize_image

    directory.mkdir(parents=True, exist_ok=True)
    for name, batch in (("a_to_b", losses.fake_b), ("b_to_a", losses.fake_a)):
        pixels = denormalize_image(batch[0])
        png = codec.save_png(codec.RgbSpectrogram(pixels))
        (directory / f"epoch{epoch:03d}_{name}.png").write_bytes(png)


def train(
    model: CycleGanModel,
    domains: DomainPair,
    config: CycleGanConfig | None = None,
    seed: int = 0,
    log_path: str | Path | None = None,
    checkpoint_path: str | Path | None = None,
    snapshot_dir: str | Path | None = None,
) -> list[LossReport]:
    """Alternating Adam updates; returns one LossReport per epoch."""
    if config is None:
        config = model.config
    gen_opt = nn.Adam(
        model.generator_parameters(), lr=config.learning_rate, beta1=config.beta1
    )
    disc_opt = nn.Adam(
        model.discriminator_parameters(), lr=config.learning_rate, beta1=config.beta1
    )
    n_a = domains.domain_a.shape[0]
    n_b = domains.domain_b.shape[0]
    batch = config.batch_size
    steps = max(1, min(n_a, n_b) // batch)

    reports: list[LossReport] = []
    for epoch in range(1, config.epochs + 1):
        order_a = derive_rng(seed, "gan-shuffle-a", epoch).permutation(n_a)
        order_b = derive_rng(seed, "gan-shuffle-b", epoch).permutation(n_b)
        sums = np.zeros(6)
        done = 0
        last_losses: StepLosses | None = None
        for step in range(steps):
            idx_a = order_a[step * batch : (step + 1) * batch]
            idx_b = order_b[step * batch : (step + 1) * batch]
            if idx_a.size == 0 or idx_b.size == 0:
                break
            real_a = nn.Tensor(domains.domain_a[idx_a])
            real_b = nn.Tensor(domains.domain_b[idx_b])
            losses = compute_losses(model, real_a, real_b)

            model.zero_grad()
            losses.generator_loss(config.cycle_weight).backward()
            gen_opt.step()

            model.zero_grad()
            losses.discriminator_loss().backward()
            disc_opt.step()

            sums += [
                float(losses.d_a.data),
                float(losses.d_b.data),
                float(losses.g_adv.data),
                float(losses.f_adv.data),
                float(losses.cycle_aba.data),
                float(losses.cycle_bab.data),
            ]
            done += 1
            last_losses = losses
        means = sums / max(1, done)
        reports.append(LossReport(epoch, *means))
        if snapshot_dir is not None and epoch in config.snapshot_epochs and last_losses is not None:
            _save_snapshots(Path(snapshot_dir), epoch, last_losses)

    if checkpoint_path is not None:
        arrays = dict(model.state_arrays())
        arrays["train.epoch"] = np.array([config.epochs], dtype=np.float32)
        nn.save_checkpoint(checkpoint_path, arrays)
    if log_path is not None:
        lines = [LOG_HEADER] + [r.line() for r in reports]
        Path(log_path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return reports
