"""Dense grid types and the reductions every other module builds on.

All grids are plain row-major numpy arrays wrapped in frozen dataclasses.
Arrays are copied and marked read-only at construction, so instances are
immutable values and safe to share between threads.  Sizes here are
desk-scale (hundreds of pixels per side), so copies are cheap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DataError

__all__ = [
    "LabelMap",
    "ProbMap",
    "ImageGrid",
    "MixMask",
    "argmax_labels",
    "max_confidence",
    "masked_blend",
    "softmax",
    "one_hot",
]

_PROB_SUM_TOL = 1e-6


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class LabelMap:
    """H×W grid of class indices in [0, num_classes)."""

    data: np.ndarray
    num_classes: int

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 2:
            raise DimensionError(f"label map must be 2-D, got shape {data.shape}")
        if self.num_classes < 1:
            raise DataError(f"num_classes must be >= 1, got {self.num_classes}")
        data = data.astype(np.int64, copy=True)
        if data.size and (data.min() < 0 or data.max() >= self.num_classes):
            raise DataError(
                f"label indices must lie in [0, {self.num_classes}), "
                f"got range [{data.min()}, {data.max()}]"
            )
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def present_classes(self) -> np.ndarray:
        """Sorted array of class indices that actually occur in the map."""
        return np.unique(self.data)


@dataclass(frozen=True)
class ProbMap:
    """C×H×W per-pixel categorical probabilities (post-softmax)."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 3:
            raise DimensionError(f"prob map must be C×H×W, got shape {data.shape}")
        if data.shape[0] < 1:
            raise DataError("prob map needs at least one class")
        if data.size:
            if data.min() < 0.0:
                raise DataError("probabilities must be non-negative")
            sums = data.sum(axis=0)
            if np.abs(sums - 1.0).max() > _PROB_SUM_TOL:
                raise DataError(
                    "per-pixel probabilities must sum to 1 within "
                    f"{_PROB_SUM_TOL:g} (worst deviation {np.abs(sums - 1.0).max():.3g})"
                )
        object.__setattr__(self, "data", _frozen(data))

    @property
    def num_classes(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class ImageGrid:
    """channels×H×W grid of real intensities in [0, 1]."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 3:
            raise DimensionError(f"image must be channels×H×W, got shape {data.shape}")
        if data.size and (data.min() < 0.0 or data.max() > 1.0):
            raise DataError(
                f"intensities must lie in [0, 1], got [{data.min():.4g}, {data.max():.4g}]"
            )
        object.__setattr__(self, "data", _frozen(data))

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class MixMask:
    """H×W binary mask; 1 selects the donor pixel, 0 the follower pixel."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 2:
            raise DimensionError(f"mask must be 2-D, got shape {data.shape}")
        data = data.astype(np.uint8, copy=True)
        if data.size and not np.isin(data, (0, 1)).all():
            raise DataError("mask values must be exactly 0 or 1")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def complement(self) -> "MixMask":
        return MixMask(1 - self.data)

    def coverage(self) -> float:
        """Fraction of pixels where the mask is 1."""
        return float(self.data.mean()) if self.data.size else 0.0


def argmax_labels(p: ProbMap) -> LabelMap:
    """Per-pixel most-probable class; ties resolve to the lowest index."""
    # np.argmax already returns the first (lowest) index on ties
    return LabelMap(np.argmax(p.data, axis=0), num_classes=p.num_classes)


def max_confidence(p: ProbMap) -> np.ndarray:
    """Per-pixel maximum class probability, an H×W array in [1/C, 1]."""
    return p.data.max(axis=0)


def _check_same_shape(a, b, what: str):
    if (a.height, a.width) != (b.height, b.width):
        raise DimensionError(
            f"{what} shapes differ: {(a.height, a.width)} vs {(b.height, b.width)}"
        )


def masked_blend(a, b, m: MixMask):
    """Compose a and b per pixel: a where m=1, b where m=0, bit-exactly.

    a and b must be the same kind (two ImageGrids with equal channel count,
    or two LabelMaps with equal num_classes) and share the mask's shape.
    """
    _check_same_shape(a, m, "grid/mask")
    _check_same_shape(b, m, "grid/mask")
    keep = m.data.astype(bool)
    if isinstance(a, ImageGrid) and isinstance(b, ImageGrid):
        if a.channels != b.channels:
            raise DimensionError(
                f"channel counts differ: {a.channels} vs {b.channels}"
            )
        return ImageGrid(np.where(keep[None, :, :], a.data, b.data))
    if isinstance(a, LabelMap) and isinstance(b, LabelMap):
        if a.num_classes != b.num_classes:
            raise DimensionError(
                f"class counts differ: {a.num_classes} vs {b.num_classes}"
            )
        return LabelMap(np.where(keep, a.data, b.data), num_classes=a.num_classes)
    raise DimensionError(
        f"cannot blend {type(a).__name__} with {type(b).__name__}"
    )


def softmax(logits: np.ndarray, axis: int = 0) -> np.ndarray:
    """Numerically stabilized softmax (max-subtraction) along `axis`."""
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max(axis=axis, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=axis, keepdims=True)


def one_hot(labels: LabelMap) -> ProbMap:
    """Degenerate ProbMap with probability 1 on each pixel's class."""
    eye = np.eye(labels.num_classes, dtype=np.float64)
    return ProbMap(eye[labels.data].transpose(2, 0, 1))
