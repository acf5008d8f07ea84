"""Detector models: a shifted matched-profile detector and an infinite-well
detector built from Klein-Gordon box modes in (t, x)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List

import numpy as np

from .core import MassSpectrum, SpaceTimePoint
from .profile import ProfileSpec

# |z - n pi| below this switches the sin-over-quadratic factors to their series
SERIES_WINDOW = 1e-6

PHASE_VARIANTS = ("literal", "center")


@dataclass(frozen=True)
class MatchedDetector:
    profile: ProfileSpec
    location: SpaceTimePoint = SpaceTimePoint(0.0, 0.0)


@dataclass(frozen=True)
class WellDetector:
    """Box of extent L0 (time) x L1 (space) with its near corner at ``corner``."""

    L0: float
    L1: float
    corner: SpaceTimePoint = SpaceTimePoint(0.0, 0.0)
    n0_max: int = 4
    n1_max: int = 4
    phase_variant: str = "literal"
    include_tachyonic: bool = False

    def __post_init__(self):
        if not (self.L0 > 0 and self.L1 > 0):
            raise ValueError("well extents L0, L1 must be positive")
        if self.n0_max < 1 or self.n1_max < 1:
            raise ValueError("mode cutoffs must be >= 1")
        if self.phase_variant not in PHASE_VARIANTS:
            raise ValueError(f"phase_variant must be one of {PHASE_VARIANTS}")

    @property
    def time_offset(self) -> float:
        # the printed phase carries L0 (s + 1); "center" reads it as L0 (s + 1/2)
        return 1.0 if self.phase_variant == "literal" else 0.5


@dataclass(frozen=True)
class WellMode:
    n0: int
    n1: int
    mD_sq: float

    @property
    def physical(self) -> bool:
        return self.mD_sq >= 0


def shift_phase(k0, k1, loc: SpaceTimePoint):
    """Phase exp(i (k0 s + k1 X)) picked up by moving the detector to (s, X)."""
    return np.exp(1j * (np.asarray(k0) * loc.s + np.asarray(k1) * loc.X))


def well_mode_mass(n0: int, n1: int, L0: float, L1: float) -> float:
    """Tuned mass squared pi^2 (n0^2/L0^2 - n1^2/L1^2); negative means tachyonic."""
    return math.pi ** 2 * (n0 * n0 / (L0 * L0) - n1 * n1 / (L1 * L1))


def _half_sin_over_eps(eps):
    """sin(eps/2)/eps, with the series 1/2 - eps^2/48 + eps^4/3840 near 0."""
    eps = np.asarray(eps, dtype=float)
    small = np.abs(eps) < SERIES_WINDOW
    safe = np.where(small, 1.0, eps)
    direct = np.sin(0.5 * safe) / safe
    e2 = eps * eps
    series = 0.5 - e2 / 48.0 + e2 * e2 / 3840.0
    return np.where(small, series, direct)


def sin_over_quadratic(z, n: int):
    """sin(z/2 - n pi/2) / (z^2 - (n pi)^2) with both removable points filled.

    Written around the nearer singularity: for z >= 0 as
    sin(e/2) / (e (z + n pi)) with e = z - n pi, for z < 0 as
    (-1)^n sin(e/2) / (e (z - n pi)) with e = z + n pi.
    """
    z = np.asarray(z, dtype=float)
    a = n * math.pi
    pos = z >= 0
    eps = np.where(pos, z - a, z + a)
    denom = np.where(pos, z + a, z - a)
    sign = np.where(pos, 1.0, (-1.0) ** n)
    out = sign * _half_sin_over_eps(eps) / denom
    return out if out.ndim else float(out)


def well_time_factor(u, n0: int, L0: float):
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise ValueError("energy u must be non-negative")
    return sin_over_quadratic(u * L0, n0)


def well_space_factor(k, n1: int, L1: float):
    return sin_over_quadratic(np.asarray(k, dtype=float) * L1, n1)


def enumerate_modes(d: WellDetector, spectrum: MassSpectrum = None) -> List[WellMode]:
    """All (n0, n1) up to the cutoffs, lexicographic, with their tuned mass."""
    return [WellMode(n0, n1, well_mode_mass(n0, n1, d.L0, d.L1))
            for n0 in range(1, d.n0_max + 1)
            for n1 in range(1, d.n1_max + 1)]
