"""Minimal differentiable pixel classifier and its teacher-EMA twin.

The model is a single linear map from engineered per-pixel features (RGB,
normalized coordinates, 3x3 local channel means) to class logits with a
softmax head.  Small enough that gradients are closed-form and every run
is deterministic, yet expressive enough for domain shift and class
imbalance to show up in its confidence scores.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.ndimage import uniform_filter
from scipy.special import logsumexp

from .errors import ConfigurationError, DimensionError
from .grids import ImageGrid, LabelMap, ProbMap, argmax_labels, softmax

__all__ = [
    "FEATURE_DIM",
    "pixel_features",
    "PixelClassifier",
    "LossAndGrad",
    "cross_entropy_loss_grad",
    "pseudo_label",
    "TeacherState",
]

# rgb (3) + normalized row/col (2) + 3x3 local mean per channel (3)
FEATURE_DIM = 8


def pixel_features(image: ImageGrid) -> np.ndarray:
    """Engineered per-pixel features, shape (FEATURE_DIM, H, W)."""
    if image.channels != 3:
        raise DimensionError(f"expected 3 channels, got {image.channels}")
    h, w = image.height, image.width
    rows = np.repeat(np.linspace(0.0, 1.0, h)[:, None], w, axis=1)
    cols = np.repeat(np.linspace(0.0, 1.0, w)[None, :], h, axis=0)
    local = uniform_filter(image.data, size=(1, 3, 3), mode="nearest")
    return np.concatenate([image.data, rows[None], cols[None], local], axis=0)


@dataclass(frozen=True)
class PixelClassifier:
    """Linear softmax classifier over per-pixel features."""

    weights: np.ndarray  # (C, F)
    bias: np.ndarray     # (C,)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        b = np.asarray(self.bias, dtype=np.float64)
        if w.ndim != 2:
            raise DimensionError(f"weights must be (C, F), got shape {w.shape}")
        if b.shape != (w.shape[0],):
            raise DimensionError(
                f"bias must have shape ({w.shape[0]},), got {b.shape}"
            )
        w = w.copy()
        b = b.copy()
        w.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)

    @property
    def num_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.weights.shape[1]

    @classmethod
    def zeros(cls, num_classes: int, feature_dim: int = FEATURE_DIM) -> "PixelClassifier":
        return cls(np.zeros((num_classes, feature_dim)), np.zeros(num_classes))

    def logits(self, features: np.ndarray) -> np.ndarray:
        if features.shape[0] != self.feature_dim:
            raise DimensionError(
                f"features have {features.shape[0]} dims, model expects {self.feature_dim}"
            )
        return np.einsum("cf,fhw->chw", self.weights, features) + self.bias[:, None, None]

    def predict_probs(self, image: ImageGrid) -> ProbMap:
        return ProbMap(softmax(self.logits(pixel_features(image)), axis=0))

    def step(self, grad_weights: np.ndarray, grad_bias: np.ndarray,
             learning_rate: float) -> "PixelClassifier":
        """One plain gradient-descent step; returns the updated model."""
        return PixelClassifier(
            self.weights - learning_rate * grad_weights,
            self.bias - learning_rate * grad_bias,
        )


class LossAndGrad(NamedTuple):
    loss: float
    grad_weights: np.ndarray
    grad_bias: np.ndarray
    probs: np.ndarray  # (C, H, W) softmax of the forward pass


def cross_entropy_loss_grad(model: PixelClassifier, features: np.ndarray,
                            labels: LabelMap) -> LossAndGrad:
    """Mean per-pixel cross-entropy against one-hot labels, with gradients.

    The gradient is the classic softmax-minus-one-hot form, averaged over
    pixels; it is exact, not approximated.
    """
    if features.shape[1:] != (labels.height, labels.width):
        raise DimensionError(
            f"feature grid {features.shape[1:]} vs labels "
            f"{(labels.height, labels.width)}"
        )
    if model.num_classes != labels.num_classes:
        raise DimensionError(
            f"model has {model.num_classes} classes, labels {labels.num_classes}"
        )
    logits = model.logits(features)
    logp = logits - logsumexp(logits, axis=0, keepdims=True)
    n = labels.height * labels.width
    rr, cc = np.indices(labels.data.shape, sparse=True)
    loss = float(-logp[labels.data, rr, cc].sum() / n)
    probs = np.exp(logp)
    delta = probs.copy()
    delta[labels.data, rr, cc] -= 1.0
    delta /= n
    grad_w = np.einsum("chw,fhw->cf", delta, features)
    grad_b = delta.sum(axis=(1, 2))
    return LossAndGrad(loss, grad_w, grad_b, probs)


def pseudo_label(teacher: PixelClassifier, image: ImageGrid) -> LabelMap:
    """Teacher argmax prediction; no gradient flows through this path."""
    return argmax_labels(teacher.predict_probs(image))


@dataclass(frozen=True)
class TeacherState:
    """EMA shadow of the student with momentum alpha."""

    model: PixelClassifier
    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigurationError(f"alpha must lie in [0, 1], got {self.alpha}")

    @classmethod
    def from_student(cls, student: PixelClassifier, alpha: float) -> "TeacherState":
        return cls(PixelClassifier(student.weights, student.bias), alpha)

    def update(self, student: PixelClassifier) -> "TeacherState":
        """teacher <- alpha * teacher + (1 - alpha) * student, weight-wise."""
        a = self.alpha
        merged = PixelClassifier(
            a * self.model.weights + (1.0 - a) * student.weights,
            a * self.model.bias + (1.0 - a) * student.bias,
        )
        return TeacherState(merged, a)
