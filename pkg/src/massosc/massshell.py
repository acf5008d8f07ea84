"""Mass-shell chart (k0, k1) <-> (m^2, k1) and the transmissible peaks."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from .core import MassSpectrum


@dataclass(frozen=True)
class PeakInterval:
    """Interval [(m - d)^2, (m + d)^2] in m^2 around one physical mass."""

    center_mass: float
    lo: float
    hi: float
    weight: float  # hi - lo = 4 m delta2, kept exact rather than by subtraction

    @property
    def center_sq(self) -> float:
        return self.center_mass ** 2

    @property
    def half_width(self) -> float:
        return 0.5 * self.weight

    @property
    def midpoint(self) -> float:
        """(lo + hi) / 2 = m^2 + delta2^2, formed without the cancellation in lo, hi."""
        d = self.weight / (4.0 * self.center_mass) if self.center_mass else 0.0
        return self.center_mass ** 2 + d * d


def k0_from(m_sq, k1):
    """Positive-frequency energy sqrt(m^2 + k1^2)."""
    m_sq = np.asarray(m_sq, dtype=float)
    if np.any(m_sq < 0):
        raise ValueError("m_sq must be non-negative (no tachyonic branch)")
    out = np.sqrt(m_sq + np.asarray(k1, dtype=float) ** 2)
    return out if out.ndim else float(out)


def jacobian_m2_to_k0(m_sq, k1):
    """dk0 = d(m^2) / (2 k0) at fixed k1."""
    k0 = np.asarray(k0_from(m_sq, k1))
    if np.any(k0 == 0):
        raise ValueError("jacobian undefined at m_sq = k1 = 0")
    out = 0.5 / k0
    return out if out.ndim else float(out)


def peak_intervals(spec: MassSpectrum) -> List[PeakInterval]:
    d = spec.delta2
    peaks = [PeakInterval(m, (m - d) ** 2, (m + d) ** 2, 4.0 * m * d) for m in sorted(spec.masses)]
    for a, b in zip(peaks, peaks[1:]):
        if a.hi >= b.lo:
            raise ValueError(f"peak intervals around {a.center_mass} and {b.center_mass} overlap")
    return peaks
