"""Truncated-cosine mass profile and plane-wave phases.

The profile is a cosine bump in m^2 of full support width ``delta`` times a
flat window of full width ``W`` in the spatial momentum k1. Functions accept
numpy arrays and broadcast.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ProfileSpec:
    m0_sq: float
    delta: float
    W: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"profile width delta must be positive, got {self.delta}")
        if not self.W > 0:
            raise ValueError(f"momentum window W must be positive, got {self.W}")

    @property
    def m_sq_support(self):
        return (self.m0_sq - self.delta / 2, self.m0_sq + self.delta / 2)

    @property
    def k_support(self):
        return (-self.W / 2, self.W / 2)


@dataclass(frozen=True)
class PlaneWavePhase:
    k0: float
    k1: float

    def __call__(self, t, x):
        """eta*_k(t, x) = exp(-i k0 t) exp(-i k1 x) / 2 pi."""
        return np.exp(-1j * (self.k0 * np.asarray(t) + self.k1 * np.asarray(x))) / (2 * np.pi)


def rect(width, x):
    """Unit box of full width ``width`` centred on 0, closed at the edges."""
    if np.any(np.asarray(width) <= 0):
        raise ValueError("rect width must be positive")
    out = (np.abs(x) <= np.asarray(width) / 2).astype(float)
    return out if out.ndim else float(out)


def profile_value(p: ProfileSpec, m_sq, k1):
    u = np.asarray(m_sq, dtype=float) - p.m0_sq
    out = np.cos(u * (np.pi / p.delta)) * rect(p.delta, u) * rect(p.W, k1)
    return out if np.ndim(out) else float(out)


def profile_value_momentum(p: ProfileSpec, k0, k1):
    k0 = np.asarray(k0, dtype=float)
    k1 = np.asarray(k1, dtype=float)
    return profile_value(p, k0 * k0 - k1 * k1, k1)
