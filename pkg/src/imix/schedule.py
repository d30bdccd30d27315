"""Dynamic allocation-ratio schedules built on Kumaraswamy CDF curves.

The schedule drives the fraction of donor classes selected for mixing.
It has three phases over the training run: a high plateau at eta_max, a
smooth descent along a (reversed) Kumaraswamy CDF, and a low plateau at
eta_min.  Truncating to [eta_min, eta_max] keeps the ratio away from the
extreme values that produce highly imbalanced mixes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DataError

__all__ = ["kcdf", "rkcdf", "ScheduleConfig", "eta_at"]


def _check_shape_params(a: float, b: float) -> None:
    if not (a > 0.0 and b > 0.0):
        raise ConfigurationError(f"shape parameters must be positive, got a={a}, b={b}")


def kcdf(x, a: float, b: float):
    """Kumaraswamy CDF: 1 - (1 - x**a)**b on [0, 1].

    Accepts scalars or arrays; monotone non-decreasing with kcdf(0)=0 and
    kcdf(1)=1 for every a, b > 0.
    """
    _check_shape_params(a, b)
    x = np.asarray(x, dtype=np.float64)
    if x.size and (x.min() < 0.0 or x.max() > 1.0):
        raise DataError(f"x must lie in [0, 1], got range [{x.min()}, {x.max()}]")
    out = 1.0 - (1.0 - x**a) ** b
    return float(out) if out.ndim == 0 else out


def rkcdf(x, a: float, b: float):
    """Reversed Kumaraswamy CDF: (1 - x**a)**b, the complement of kcdf."""
    _check_shape_params(a, b)
    x = np.asarray(x, dtype=np.float64)
    if x.size and (x.min() < 0.0 or x.max() > 1.0):
        raise DataError(f"x must lie in [0, 1], got range [{x.min()}, {x.max()}]")
    out = (1.0 - x**a) ** b
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ScheduleConfig:
    """Truncated three-phase schedule for the donor selection ratio.

    Phase boundaries are fractions of total_iters.  Before phase1_end the
    ratio holds at eta_max; from phase3_start on it holds at eta_min; in
    between it follows the decreasing branch of the configured curve,
    renormalized so the full curve shape spans the middle phase.
    """

    a: float = 2.0
    b: float = 2.0
    reversed: bool = True
    eta_min: float = 0.3
    eta_max: float = 0.7
    total_iters: int = 1000
    phase1_end: float = 0.2
    phase3_start: float = 0.8

    def __post_init__(self):
        _check_shape_params(self.a, self.b)
        if not 0.0 <= self.eta_min <= self.eta_max <= 1.0:
            raise ConfigurationError(
                f"need 0 <= eta_min <= eta_max <= 1, got [{self.eta_min}, {self.eta_max}]"
            )
        if not 0.0 <= self.phase1_end <= self.phase3_start <= 1.0:
            raise ConfigurationError(
                "need 0 <= phase1_end <= phase3_start <= 1, got "
                f"[{self.phase1_end}, {self.phase3_start}]"
            )
        if self.total_iters < 1:
            raise ConfigurationError(f"total_iters must be >= 1, got {self.total_iters}")

    @classmethod
    def fixed(cls, eta: float, total_iters: int = 1000) -> "ScheduleConfig":
        """Degenerate schedule holding a single ratio for the whole run."""
        return cls(eta_min=eta, eta_max=eta, total_iters=total_iters)


def _descending_curve(u: float, cfg: ScheduleConfig) -> float:
    # both branches run 1 -> 0 as u goes 0 -> 1; `reversed` picks the
    # RKCDF shape, otherwise the KCDF is traversed backwards
    if cfg.reversed:
        return rkcdf(u, cfg.a, cfg.b)
    return kcdf(1.0 - u, cfg.a, cfg.b)


def eta_at(cfg: ScheduleConfig, iteration: int) -> float:
    """Donor selection ratio at an iteration in [0, total_iters]."""
    if iteration < 0 or iteration > cfg.total_iters:
        raise DataError(
            f"iteration {iteration} outside [0, {cfg.total_iters}]"
        )
    x = iteration / cfg.total_iters
    if x >= cfg.phase3_start:
        return cfg.eta_min
    if x < cfg.phase1_end:
        return cfg.eta_max
    u = (x - cfg.phase1_end) / (cfg.phase3_start - cfg.phase1_end)
    value = cfg.eta_min + (cfg.eta_max - cfg.eta_min) * _descending_curve(u, cfg)
    return float(np.clip(value, cfg.eta_min, cfg.eta_max))
