"""Per-class, per-domain expected confidence score (ECS) tracking.

The raw ECS of a class is the mean max-softmax confidence over the pixels
currently assigned to that class (ground truth on the source side, teacher
pseudo-labels on the target side).  Raw measurements are smoothed across
iterations with an exponential moving average controlled by the smoothness
weight tau; classes missing from a measurement keep their previous value.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ConfigurationError, DataError, DimensionError
from .grids import LabelMap, ProbMap, max_confidence

__all__ = [
    "Domain",
    "EcsState",
    "measure_ecs",
    "EcsHistory",
    "read_ecs_csv",
]

Domain = Literal["source", "target"]
_DOMAINS = ("source", "target")


def _check_domain(domain: str) -> None:
    if domain not in _DOMAINS:
        raise ConfigurationError(f"domain must be 'source' or 'target', got {domain!r}")


@dataclass(frozen=True)
class EcsState:
    """Smoothed ECS vectors for both domains.

    Entries start at the uninformative floor 1/C and are replaced by the
    first raw measurement of their class; subsequent measurements blend in
    with weight (1 - tau).  States are values: update() returns a new one.
    """

    num_classes: int
    tau: float
    source_ecs: np.ndarray
    target_ecs: np.ndarray
    seen_source: np.ndarray
    seen_target: np.ndarray

    def __post_init__(self):
        if not 0.0 <= self.tau < 1.0:
            raise ConfigurationError(f"tau must lie in [0, 1), got {self.tau}")
        for name in ("source_ecs", "target_ecs", "seen_source", "seen_target"):
            arr = np.asarray(getattr(self, name))
            if arr.shape != (self.num_classes,):
                raise DimensionError(
                    f"{name} must have shape ({self.num_classes},), got {arr.shape}"
                )
            arr = arr.astype(bool if name.startswith("seen") else np.float64, copy=True)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def initial(cls, num_classes: int, tau: float) -> "EcsState":
        if num_classes < 1:
            raise ConfigurationError(f"num_classes must be >= 1, got {num_classes}")
        init = np.full(num_classes, 1.0 / num_classes)
        unseen = np.zeros(num_classes, dtype=bool)
        return cls(num_classes, tau, init, init.copy(), unseen, unseen.copy())

    def snapshot(self, domain: Domain) -> np.ndarray:
        """Current smoothed vector for one domain (a writable copy)."""
        _check_domain(domain)
        vec = self.source_ecs if domain == "source" else self.target_ecs
        return vec.copy()

    def update(self, domain: Domain, raw: np.ndarray) -> "EcsState":
        """Fold one raw measurement into the smoothed vector.

        raw is a length-C vector with NaN marking classes absent from the
        measurement (the convention produced by measure_ecs).  Absent
        classes carry their old value; the first observation of a class
        replaces the 1/C initializer outright.
        """
        _check_domain(domain)
        raw = np.asarray(raw, dtype=np.float64)
        if raw.shape != (self.num_classes,):
            raise DimensionError(
                f"raw ECS must have shape ({self.num_classes},), got {raw.shape}"
            )
        present = ~np.isnan(raw)
        old = self.source_ecs if domain == "source" else self.target_ecs
        seen = self.seen_source if domain == "source" else self.seen_target
        blended = np.where(
            present & seen,
            self.tau * old + (1.0 - self.tau) * np.where(present, raw, 0.0),
            np.where(present, raw, old),  # first sight replaces, absent carries
        )
        new_seen = seen | present
        if domain == "source":
            return EcsState(
                self.num_classes, self.tau, blended, self.target_ecs,
                new_seen, self.seen_target,
            )
        return EcsState(
            self.num_classes, self.tau, self.source_ecs, blended,
            self.seen_source, new_seen,
        )


def measure_ecs(p: ProbMap, membership: LabelMap) -> np.ndarray:
    """Raw per-class ECS: mean max-confidence over each class's pixels.

    Returns a length-C vector; classes with no member pixels are NaN.
    """
    if (p.height, p.width) != (membership.height, membership.width):
        raise DimensionError(
            f"prob map {p.height}×{p.width} vs membership "
            f"{membership.height}×{membership.width}"
        )
    if p.num_classes != membership.num_classes:
        raise DimensionError(
            f"class counts differ: {p.num_classes} vs {membership.num_classes}"
        )
    conf = max_confidence(p).ravel()
    idx = membership.data.ravel()
    counts = np.bincount(idx, minlength=p.num_classes).astype(np.float64)
    sums = np.bincount(idx, weights=conf, minlength=p.num_classes)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = sums / counts
    out[counts == 0] = np.nan
    return out


class EcsHistory:
    """Accumulates per-iteration ECS rows and serializes them to CSV.

    Column layout: iteration, domain, class, raw, smoothed.  Rows for
    classes absent from a measurement carry an empty raw field and the
    carried-forward smoothed value.
    """

    COLUMNS = ("iteration", "domain", "class", "raw", "smoothed")

    def __init__(self):
        self.rows: list[tuple[int, str, int, float, float]] = []

    def append(self, iteration: int, domain: Domain, raw: np.ndarray,
               smoothed: np.ndarray) -> None:
        _check_domain(domain)
        for c, (r, s) in enumerate(zip(raw, smoothed)):
            self.rows.append((iteration, domain, c, float(r), float(s)))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.COLUMNS)
            for it, domain, c, raw, smoothed in self.rows:
                raw_field = "" if np.isnan(raw) else repr(raw)
                writer.writerow([it, domain, c, raw_field, repr(smoothed)])


def read_ecs_csv(path, num_classes: int | None = None) -> dict[str, np.ndarray]:
    """Load the latest smoothed ECS vectors per domain from a history CSV.

    Accepts the EcsHistory layout; the last row wins per (domain, class).
    Returns {'source': vector, 'target': vector}; domains never mentioned
    fall back to the uninformative 1/C initializer.
    """
    latest: dict[tuple[str, int], float] = {}
    max_class = -1
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not set(EcsHistory.COLUMNS) <= set(reader.fieldnames):
            raise DataError(
                f"{path}: expected columns {EcsHistory.COLUMNS}, got {reader.fieldnames}"
            )
        for row in reader:
            domain = row["domain"]
            _check_domain(domain)
            c = int(row["class"])
            latest[(domain, c)] = float(row["smoothed"])
            max_class = max(max_class, c)
    if max_class < 0:
        raise DataError(f"{path}: no ECS rows")
    if num_classes is None:
        num_classes = max_class + 1
    elif max_class >= num_classes:
        raise DataError(
            f"{path}: found class {max_class} but num_classes={num_classes}"
        )
    out = {}
    for domain in _DOMAINS:
        vec = np.full(num_classes, 1.0 / num_classes)
        for c in range(num_classes):
            if (domain, c) in latest:
                vec[c] = latest[(domain, c)]
        out[domain] = vec
    return out
