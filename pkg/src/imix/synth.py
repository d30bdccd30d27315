"""Seeded two-domain synthetic scenes for the self-training sandbox.

A scene is a background (class 0) with elliptical blobs of the remaining
classes; the trailing num_rare classes get much smaller blobs, making
them rare by pixel share.  Both domains draw from the same layout family
and palette; the target domain applies a per-channel intensity offset
plus inflated noise, the controllable stand-in for a domain gap.  Target
labels are returned alongside the image but exist only for evaluation;
training code must never read them.
"""

from __future__ import annotations

import colorsys
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .grids import ImageGrid, LabelMap
from .mixing import Sample

__all__ = ["DomainPairConfig", "class_palette", "generate_pair", "generate_corpus"]


@dataclass(frozen=True)
class DomainPairConfig:
    """Geometry, rarity skew, and domain shift for paired scene generation."""

    num_classes: int = 6
    height: int = 64
    width: int = 64
    num_rare: int = 2
    blob_radius: tuple[float, float] = (0.10, 0.22)    # fraction of min(H, W)
    rare_radius: tuple[float, float] = (0.028, 0.05)
    max_blobs: int = 2
    shift: tuple[float, float, float] = (0.14, -0.10, 0.08)
    noise: float = 0.04
    target_noise_scale: float = 1.5

    def __post_init__(self):
        if self.num_classes < 2:
            raise ConfigurationError("need at least a background and one blob class")
        if self.num_rare < 0 or self.num_rare > self.num_classes - 2:
            raise ConfigurationError(
                f"num_rare must leave >= 1 common blob class, got {self.num_rare} "
                f"of {self.num_classes}"
            )
        if min(self.height, self.width) < 16:
            raise ConfigurationError("grid must be at least 16x16")
        if self.num_classes > min(self.height, self.width) // 4:
            raise ConfigurationError(
                f"{self.num_classes} classes exceed layout capacity of a "
                f"{self.height}x{self.width} grid"
            )
        if self.max_blobs < 1:
            raise ConfigurationError("max_blobs must be >= 1")
        for name in ("blob_radius", "rare_radius"):
            lo, hi = getattr(self, name)
            if not 0.0 < lo <= hi:
                raise ConfigurationError(f"{name} must satisfy 0 < lo <= hi")
        if self.noise < 0.0 or self.target_noise_scale < 0.0:
            raise ConfigurationError("noise parameters must be non-negative")

    @property
    def rare_classes(self) -> tuple[int, ...]:
        return tuple(range(self.num_classes - self.num_rare, self.num_classes))


def class_palette(num_classes: int) -> np.ndarray:
    """Deterministic (C, 3) palette: evenly spaced hues, fixed sat/value."""
    colors = [
        colorsys.hsv_to_rgb(c / num_classes, 0.62, 0.72) for c in range(num_classes)
    ]
    return np.asarray(colors, dtype=np.float64)


def _paint_blobs(canvas: np.ndarray, cls: int, radius_range: tuple[float, float],
                 cfg: DomainPairConfig, rng: np.random.Generator) -> None:
    h, w = cfg.height, cfg.width
    scale = min(h, w)
    rr, cc = np.indices((h, w))
    for _ in range(int(rng.integers(1, cfg.max_blobs + 1))):
        ry = max(1.0, scale * rng.uniform(*radius_range) * rng.uniform(0.75, 1.25))
        rx = max(1.0, scale * rng.uniform(*radius_range) * rng.uniform(0.75, 1.25))
        cy = rng.uniform(ry, h - ry) if h > 2 * ry else h / 2
        cx = rng.uniform(rx, w - rx) if w > 2 * rx else w / 2
        inside = ((rr - cy) / ry) ** 2 + ((cc - cx) / rx) ** 2 <= 1.0
        canvas[inside] = cls


def _layout(cfg: DomainPairConfig, rng: np.random.Generator) -> LabelMap:
    canvas = np.zeros((cfg.height, cfg.width), dtype=np.int64)
    common = [c for c in range(1, cfg.num_classes) if c not in cfg.rare_classes]
    for cls in rng.permutation(common):
        _paint_blobs(canvas, int(cls), cfg.blob_radius, cfg, rng)
    # rare blobs go on top so their few pixels survive occlusion
    for cls in rng.permutation(list(cfg.rare_classes)):
        _paint_blobs(canvas, int(cls), cfg.rare_radius, cfg, rng)
    return LabelMap(canvas, num_classes=cfg.num_classes)


def _render(labels: LabelMap, cfg: DomainPairConfig, rng: np.random.Generator,
            shifted: bool) -> ImageGrid:
    palette = class_palette(cfg.num_classes)
    img = palette[labels.data].transpose(2, 0, 1).copy()
    sigma = cfg.noise * (cfg.target_noise_scale if shifted else 1.0)
    if shifted:
        img += np.asarray(cfg.shift, dtype=np.float64)[:, None, None]
    if sigma > 0.0:
        img += rng.normal(0.0, sigma, size=img.shape)
    return ImageGrid(np.clip(img, 0.0, 1.0))


def generate_pair(cfg: DomainPairConfig, seed) -> tuple[Sample, Sample]:
    """One (source, target) scene pair, bit-deterministic in the seed.

    The target sample's labels are the hidden ground truth: they are for
    evaluation only and must not reach any training computation.
    """
    rng = np.random.default_rng(seed)
    source_labels = _layout(cfg, rng)
    source_image = _render(source_labels, cfg, rng, shifted=False)
    target_labels = _layout(cfg, rng)
    target_image = _render(target_labels, cfg, rng, shifted=True)
    return Sample(source_image, source_labels), Sample(target_image, target_labels)


def generate_corpus(cfg: DomainPairConfig, count: int, seed) -> tuple[list[Sample], list[Sample]]:
    """`count` independent pairs from spawned child seeds of `seed`."""
    children = np.random.SeedSequence(seed).spawn(count)
    pairs = [generate_pair(cfg, child) for child in children]
    return [p[0] for p in pairs], [p[1] for p in pairs]
