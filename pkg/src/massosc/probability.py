"""Detection-probability kernels.

Every kernel returns the per-peak amplitudes A_j alongside
``raw = |sum_j A_j|^2`` (summed over modes for the well detector), so the
interference structure can be inspected directly. k-independent constants,
including the 1/2 of the mass-shell Jacobian, are left in the overall
normalisation and not applied here.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .core import MassSpectrum, SpaceTimePoint
from .detector import (MatchedDetector, WellDetector, enumerate_modes,
                       well_space_factor, well_time_factor)
from .massshell import PeakInterval, peak_intervals
from .profile import ProfileSpec, profile_value
from .quadrature import QuadResult, QuadratureSpec, integrate_1d, integrate_2d_peaks


class NotConvergedError(RuntimeError):
    pass


@dataclass(frozen=True)
class ProbRequest:
    spectrum: MassSpectrum
    emit: ProfileSpec
    detect: Union[MatchedDetector, WellDetector]
    point: Optional[SpaceTimePoint] = None
    quad: QuadratureSpec = QuadratureSpec()
    peaks_enabled: Tuple[bool, ...] = (True, True, True)
    narrow: bool = True  # well detector only: peak sum instead of m^2 integral

    @property
    def location(self) -> SpaceTimePoint:
        if self.point is not None:
            return self.point
        if isinstance(self.detect, MatchedDetector):
            return self.detect.location
        return self.detect.corner

    def at(self, s: float, X: float) -> "ProbRequest":
        return replace(self, point=SpaceTimePoint(float(s), float(X)))

    def k_window(self) -> Tuple[float, float]:
        half = self.emit.W / 2
        if isinstance(self.detect, MatchedDetector):
            half = min(half, self.detect.profile.W / 2)
        return -half, half

    def peaks(self):
        out = []
        for p, on in zip(peak_intervals(self.spectrum), self.peaks_enabled):
            out.append(p if on else PeakInterval(p.center_mass, p.lo, p.lo, 0.0))
        return out


@dataclass(frozen=True)
class ProbValue:
    raw: float
    quad: QuadResult
    per_peak_amplitudes: np.ndarray  # (3,) matched; (n_modes, 3) well
    mode_weights: Optional[np.ndarray] = None  # (n0 n1)^2 per retained mode
    truncation: float = 0.0  # well: share of raw carried by the outermost mode shell

    @property
    def amplitude(self):
        return self.per_peak_amplitudes.sum(axis=-1)

    def decomposed(self) -> float:
        """raw rebuilt as sum |A_j|^2 + 2 sum_{j<l} Re(A_j conj A_l)."""
        A = np.atleast_2d(self.per_peak_amplitudes)
        w = np.ones(A.shape[0]) if self.mode_weights is None else self.mode_weights
        diag = (np.abs(A) ** 2).sum(axis=1)
        cross = np.zeros(A.shape[0])
        for j in range(A.shape[1]):
            for l in range(j + 1, A.shape[1]):
                cross += 2 * np.real(A[:, j] * np.conj(A[:, l]))
        return float(w @ (diag + cross))

    def cross_terms(self) -> np.ndarray:
        """Matrix of 2 Re(A_j conj A_l) for the matched (single-mode) case."""
        A = np.atleast_2d(self.per_peak_amplitudes)[0]
        return 2 * np.real(A[:, None] * np.conj(A[None, :]))


def _check(res: QuadResult, strict: bool):
    if strict and not res.converged:
        raise NotConvergedError(f"quadrature did not converge (est_error={res.est_error:.3g}, "
                                f"panels={res.panels_used})")


def _matched_parts(req: ProbRequest):
    if not isinstance(req.detect, MatchedDetector):
        raise TypeError("matched kernel needs a MatchedDetector")
    loc = req.location
    emit, det = req.emit, req.detect.profile
    lo, hi = req.k_window()
    m_min = min(req.spectrum.masses)

    def rate(k):
        return abs(loc.s) * np.abs(k) / np.sqrt(m_min * m_min + k * k) + abs(loc.X)

    def integrand(m_sq, k):
        E = np.sqrt(m_sq + k * k)
        return (np.exp(1j * (E * loc.s + k * loc.X)) / E
                * profile_value(emit, m_sq, k) * profile_value(det, m_sq, k))

    return lo, hi, rate, integrand


def prob_matched_narrow(req: ProbRequest, strict: bool = False) -> ProbValue:
    """Matched detector with each peak collapsed to value-at-m_j^2 x 4 m_j delta2."""
    lo, hi, rate, integrand = _matched_parts(req)
    peaks = req.peaks()
    m_sq = np.array([p.center_sq for p in peaks])[:, None]
    w = np.array([p.weight for p in peaks])[:, None]

    res = integrate_1d(lambda k: w * integrand(m_sq, k[None, :]), lo, hi, rate, req.quad)
    _check(res, strict)
    A = np.asarray(res.value, dtype=complex)
    return ProbValue(float(abs(A.sum()) ** 2), res, A)


def prob_matched_exact(req: ProbRequest, strict: bool = False) -> ProbValue:
    """Matched detector with the full m^2 integral over every peak."""
    lo, hi, rate, integrand = _matched_parts(req)
    res = integrate_2d_peaks(integrand, req.peaks(), lo, hi, req.quad, rate, per_peak=True)
    _check(res, strict)
    A = np.asarray(res.value, dtype=complex)
    return ProbValue(float(abs(A.sum()) ** 2), res, A)


def prob_well(req: ProbRequest, strict: bool = False) -> ProbValue:
    """Infinite-well detector: sum over box modes of (n0 n1)^2 |B_mode|^2."""
    d = req.detect
    if not isinstance(d, WellDetector):
        raise TypeError("well kernel needs a WellDetector")
    loc = req.location
    modes = [m for m in enumerate_modes(d, req.spectrum) if d.include_tachyonic or m.physical]
    n0 = np.array([m.n0 for m in modes])[:, None, None]
    n1 = np.array([m.n1 for m in modes])[:, None, None]
    weights = (np.array([m.n0 * m.n1 for m in modes], dtype=float)) ** 2
    T = loc.s + d.time_offset
    Xs = loc.X + d.L1
    lo, hi = req.k_window()
    emit = req.emit
    m_min = min(req.spectrum.masses)

    def rate(k):
        v = np.abs(k) / np.sqrt(m_min * m_min + k * k)
        return d.L0 * (abs(T) + 0.5) * v + abs(Xs) + 0.5 * d.L1

    def mode_block(m_sq, k):
        # m_sq: (P, 1) or (P, M, 1); k broadcast on the last axis
        E = np.sqrt(m_sq + k * k)
        base = (profile_value(emit, m_sq, k) / E
                * np.exp(-1j * (E * d.L0 * T + k * Xs)))
        tf = np.stack([well_time_factor(E, int(a), d.L0) for a in n0.ravel()])
        sf = np.stack([np.broadcast_to(well_space_factor(k, int(b), d.L1), np.shape(E))
                       for b in n1.ravel()])
        return base[None] * tf * sf  # (modes, ...)

    if not modes:
        empty = QuadResult(0j, 0.0, 0, True)
        return ProbValue(0.0, empty, np.zeros((0, 3), dtype=complex), weights, 0.0)

    peaks = req.peaks()
    if req.narrow:
        m_sq = np.array([p.center_sq for p in peaks])[:, None]
        w = np.array([p.weight for p in peaks])[None, :, None]

        def f(k):
            return w * mode_block(m_sq, k[None, :])  # (modes, peaks, n)

        res = integrate_1d(f, lo, hi, rate, req.quad)
    else:
        def f2(m_sq, k):
            # m_sq (Q, 1), k (1, n) -> (modes, Q, n)
            return mode_block(m_sq, k)

        res = _well_exact(f2, peaks, lo, hi, rate, req.quad)
    _check(res, strict)
    B = np.asarray(res.value, dtype=complex).reshape(len(modes), len(peaks))
    per_mode = np.abs(B.sum(axis=1)) ** 2
    raw = float(weights @ per_mode)
    outer = np.array([m.n0 == d.n0_max or m.n1 == d.n1_max for m in modes])
    trunc = float(weights[outer] @ per_mode[outer] / raw) if raw > 0 else 0.0
    return ProbValue(raw, res, B, weights, trunc)


def _well_exact(f2, peaks, lo, hi, rate, spec):
    """m^2 x k integral for all modes at once; value shape (modes, peaks)."""
    from .quadrature import gauss_legendre

    def per_peak(k, order):
        x, w = gauss_legendre(order)
        blocks = []
        for p in peaks:
            if p.weight <= 0:
                blocks.append(None)
                continue
            half = p.half_width
            m_sq = (p.midpoint + half * x)[:, None]
            vals = f2(m_sq, k[None, :])  # (modes, Q, n)
            blocks.append(np.einsum("q,mqn->mn", half * w, vals))
        shape = next((b.shape for b in blocks if b is not None), None)
        if shape is None:
            return None
        return np.stack([b if b is not None else np.zeros(shape, complex) for b in blocks], axis=1)

    def f(k):
        out = per_peak(k, spec.nodes_per_panel)
        return np.zeros((0, k.size), complex) if out is None else out

    probe = per_peak(np.array([0.0]), 2)
    if probe is None:
        n_modes = f2(np.array([[1.0]]), np.array([[0.0]])).shape[0]
        return QuadResult(np.zeros((n_modes, len(peaks)), complex), 0.0, 0, True)
    return integrate_1d(f, lo, hi, rate, spec)
