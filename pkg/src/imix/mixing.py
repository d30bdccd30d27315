"""Class-region mixing across two domains.

Two samplers build the binary paste mask from a donor label map:

* class_sample — the ClassMix/DACS baseline: half of the classes present
  in the donor, chosen uniformly without replacement.
* informed_sample — ranks the donor's present classes by their tracked
  ECS and takes the top (well-performing) or bottom (under-performing)
  k = max(1, round(eta * C)) of them.

mix() picks the donor by the selection order (SSTF: source selects and
the target fills the complement; TSSF: the reverse), builds the mask,
and composes the mixed image and label pixel-for-pixel.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .ecs import EcsState
from .errors import ConfigurationError, DataError, DegenerateInputError
from .grids import ImageGrid, LabelMap, MixMask, masked_blend

__all__ = [
    "SelectionOrder",
    "ClassKind",
    "Sampler",
    "MixStrategy",
    "Sample",
    "MixedSample",
    "class_sample",
    "informed_sample",
    "mix",
]


class SelectionOrder(Enum):
    SSTF = "sstf"  # source selects, target follows
    TSSF = "tssf"  # target selects, source follows


class ClassKind(Enum):
    WELL = "well"    # highest-ECS classes
    UNDER = "under"  # lowest-ECS classes


class Sampler(Enum):
    CLASSMIX = "classmix"
    IMIX = "imix"


@dataclass(frozen=True)
class MixStrategy:
    order: SelectionOrder = SelectionOrder.SSTF
    class_kind: ClassKind = ClassKind.UNDER
    sampler: Sampler = Sampler.IMIX

    @classmethod
    def from_names(cls, order: str, class_kind: str, sampler: str) -> "MixStrategy":
        try:
            return cls(SelectionOrder(order.lower()), ClassKind(class_kind.lower()),
                       Sampler(sampler.lower()))
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from exc


class Sample(NamedTuple):
    """An image with the label map that travels with it."""

    image: ImageGrid
    labels: LabelMap


@dataclass(frozen=True)
class MixedSample:
    image: ImageGrid
    labels: LabelMap
    mask: MixMask
    selected_classes: tuple[int, ...]


def _present_or_raise(donor_labels: LabelMap) -> np.ndarray:
    present = donor_labels.present_classes()
    if present.size == 0:
        raise DegenerateInputError("donor label map has no pixels")
    return present


def class_sample(donor_labels: LabelMap,
                 rng: np.random.Generator) -> tuple[MixMask, tuple[int, ...]]:
    """Random half-of-present-classes mask (ClassMix baseline).

    Selects floor(P/2) distinct classes uniformly from the P classes
    present in the donor; the mask is 1 exactly on their pixels.
    """
    present = _present_or_raise(donor_labels)
    n = present.size // 2
    selected = np.sort(rng.choice(present, size=n, replace=False))
    mask = np.isin(donor_labels.data, selected).astype(np.uint8)
    return MixMask(mask), tuple(int(c) for c in selected)


def _rank_key(ecs: np.ndarray, kind: ClassKind) -> np.ndarray:
    # lexsort: class index breaks ties after the ECS key
    return -ecs if kind is ClassKind.WELL else ecs


def informed_sample(donor_labels: LabelMap, ecs: np.ndarray, eta: float,
                    kind: ClassKind,
                    ) -> tuple[MixMask, tuple[int, ...]]:
    """ECS-ranked class mask.

    k = max(1, round(eta * C)) classes are taken from those present in
    the donor, ordered by descending ECS for WELL and ascending for
    UNDER; ties fall to the lower class index.  Rank order only matters,
    so any strictly increasing transform of ecs gives the same selection.
    """
    ecs = np.asarray(ecs, dtype=np.float64)
    if ecs.shape != (donor_labels.num_classes,):
        raise ConfigurationError(
            f"ECS vector must have shape ({donor_labels.num_classes},), got {ecs.shape}"
        )
    if not 0.0 <= eta <= 1.0:
        raise DataError(f"eta must lie in [0, 1], got {eta}")
    present = _present_or_raise(donor_labels)
    k = max(1, int(np.floor(eta * donor_labels.num_classes + 0.5)))
    key = _rank_key(ecs[present], kind)
    # stable sort on the key; `present` is already ascending, so ties
    # resolve to the lower class index
    order = np.argsort(key, kind="stable")
    selected = np.sort(present[order[: min(k, present.size)]])
    mask = np.isin(donor_labels.data, selected).astype(np.uint8)
    return MixMask(mask), tuple(int(c) for c in selected)


def mix(source: Sample, target: Sample, strategy: MixStrategy,
        ecs_state: EcsState, eta: float,
        rng: np.random.Generator) -> MixedSample:
    """Compose one cross-domain sample per the configured strategy.

    The donor contributes the masked class regions (image and label); the
    follower fills the complement.  Under SSTF the source sample donates
    and its ECS vector ranks the classes; under TSSF the target does.
    """
    for sample in (source, target):
        if sample.labels.num_classes != ecs_state.num_classes:
            raise ConfigurationError(
                f"label map has {sample.labels.num_classes} classes, "
                f"ECS state has {ecs_state.num_classes}"
            )
    if strategy.order is SelectionOrder.SSTF:
        donor, follower, domain = source, target, "source"
    else:
        donor, follower, domain = target, source, "target"

    if strategy.sampler is Sampler.CLASSMIX:
        mask, selected = class_sample(donor.labels, rng)
    else:
        ecs = ecs_state.snapshot(domain)
        mask, selected = informed_sample(donor.labels, ecs, eta, strategy.class_kind)

    return MixedSample(
        image=masked_blend(donor.image, follower.image, mask),
        labels=masked_blend(donor.labels, follower.labels, mask),
        mask=mask,
        selected_classes=selected,
    )
