"""Smoothing families that approximate the indicator of zero.

Each family maps a scalar s to a value in [0, 1] that equals 1 at s = 0 and
dies off over a width controlled by sigma, so that summing it over a vector's
components gives a smooth stand-in for "m minus the number of nonzeros". The
solver ascends that sum; the step it uses is pre-scaled by sigma² so a single
step-size constant works across all smoothing widths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveSigma

KINDS = ("gaussian", "triangular", "truncated_hyperbolic", "rational")

# Aliases accepted on the command line and in sweep grids.
_ALIASES = {"hyperbolic": "truncated_hyperbolic"}

# Scale of the derivative bound: max_s |d/ds value(s, sigma)| = gamma / sigma.
# gaussian: extremum of |s| e^{-s^2/2s^2}/s^2 at s = sigma; rational: at s = sigma/sqrt(3).
_DERIVATIVE_BOUND = {
    "gaussian": math.exp(-0.5),
    "triangular": 1.0,
    "truncated_hyperbolic": 2.0,
    "rational": 9.0 / (8.0 * math.sqrt(3.0)),
}


def _check_sigma(sigma) -> None:
    if np.any(np.asarray(sigma) <= 0.0):
        raise NonPositiveSigma(f"sigma must be positive, got {sigma}")


@dataclass(frozen=True)
class PenaltyFamily:
    """One of the four smoothing families, selected by ``kind``.

    All methods broadcast: ``s`` may be a scalar, a vector, or an m×T block,
    and ``sigma`` a scalar or a per-column row of widths.
    """

    kind: str = "gaussian"

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", _ALIASES.get(self.kind, self.kind))
        if self.kind not in KINDS:
            raise ValueError(f"unknown family {self.kind!r}; choose from {KINDS}")

    @property
    def is_smooth(self) -> bool:
        """Whether the family is differentiable everywhere (no kinks)."""
        return self.kind in ("gaussian", "rational")

    @property
    def derivative_bound(self) -> float:
        """Constant gamma with |d/ds value(s, sigma)| < gamma / sigma for all s."""
        return _DERIVATIVE_BOUND[self.kind]

    def value(self, s, sigma):
        """Pointwise smoothing value in [0, 1]; equals 1 at s = 0."""
        _check_sigma(sigma)
        s = np.asarray(s, dtype=float)
        if self.kind == "gaussian":
            return np.exp(-(s * s) / (2.0 * np.square(sigma)))
        if self.kind == "triangular":
            return np.clip(1.0 - np.abs(s) / sigma, 0.0, 1.0)
        if self.kind == "truncated_hyperbolic":
            return np.clip(1.0 - np.square(s / sigma), 0.0, 1.0)
        sig2 = np.square(sigma)
        return sig2 / (s * s + sig2)

    def total(self, s, sigma, axis=None):
        """Sum of :meth:`value` over components (the smoothed inactive count)."""
        return np.sum(self.value(s, sigma), axis=axis)

    def ascent_direction(self, s, sigma):
        """Step -sigma²·∇ of :meth:`total`, componentwise.

        For the kinked families the derivative at |s| = sigma (and at 0 for
        the triangular one) is taken as 0, so the step vanishes there.
        """
        _check_sigma(sigma)
        s = np.asarray(s, dtype=float)
        if self.kind == "gaussian":
            return s * np.exp(-(s * s) / (2.0 * np.square(sigma)))
        if self.kind == "triangular":
            inside = np.abs(s / sigma) < 1.0
            return np.where(inside, np.sign(s) * sigma, 0.0)
        if self.kind == "truncated_hyperbolic":
            inside = np.abs(s / sigma) < 1.0
            return np.where(inside, 2.0 * s, 0.0)
        sig2 = np.square(sigma)
        return 2.0 * s * sig2 * sig2 / np.square(s * s + sig2)


def family_names() -> tuple[str, ...]:
    """Canonical kinds plus CLI aliases."""
    return KINDS + tuple(_ALIASES)
