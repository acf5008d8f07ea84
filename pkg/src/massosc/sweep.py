"""Kernel evaluation over (s, X) lattices and fixed-time slices."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .detector import MatchedDetector
from .probability import ProbRequest, ProbValue, prob_matched_exact, prob_matched_narrow, prob_well

KERNELS: Dict[str, Callable[..., ProbValue]] = {
    "narrow": prob_matched_narrow,
    "exact": prob_matched_exact,
    "well": prob_well,
}


class SweepError(RuntimeError):
    def __init__(self, s, X, cause):
        super().__init__(f"kernel failed at (s={s!r}, X={X!r}): {cause}")
        self.s, self.X, self.cause = s, X, cause


@dataclass(frozen=True)
class GridSpec:
    s_min: float = 0.0
    s_max: float = 40.0
    ns: int = 201
    x_min: float = 0.0
    x_max: float = 40.0
    nx: int = 201

    def __post_init__(self):
        if self.ns < 1 or self.nx < 1:
            raise ValueError("ns and nx must be >= 1")
        if self.s_min > self.s_max or self.x_min > self.x_max:
            raise ValueError("grid bounds must satisfy min <= max")

    @staticmethod
    def _axis(lo, hi, n):
        if n == 1:
            return np.array([float(lo)])
        i = np.arange(n)
        return lo + i * ((hi - lo) / (n - 1))

    @property
    def s_values(self) -> np.ndarray:
        return self._axis(self.s_min, self.s_max, self.ns)

    @property
    def x_values(self) -> np.ndarray:
        return self._axis(self.x_min, self.x_max, self.nx)

    @property
    def spacing(self):
        ds = (self.s_max - self.s_min) / (self.ns - 1) if self.ns > 1 else 0.0
        dx = (self.x_max - self.x_min) / (self.nx - 1) if self.nx > 1 else 0.0
        return ds, dx


def normalize(raw: np.ndarray) -> np.ndarray:
    raw = np.asarray(raw, dtype=float)
    top = raw.max() if raw.size else 0.0
    return raw / top if top > 0 else np.zeros_like(raw)


@dataclass(frozen=True)
class QuadSummary:
    points: int
    all_converged: bool
    max_est_error: float
    max_panels: int

    def to_dict(self):
        return {"points": self.points, "all_converged": self.all_converged,
                "max_est_error": self.max_est_error, "max_panels": self.max_panels}


@dataclass(frozen=True)
class ProbabilityGrid:
    grid: GridSpec
    raw: np.ndarray  # (ns, nx)
    norm: np.ndarray
    max_location: tuple
    quad: QuadSummary


def _evaluate_row(kernel, template, s, xs, strict):
    out = []
    for X in xs:
        try:
            out.append(kernel(template.at(s, X), strict=strict))
        except Exception as exc:  # attach the lattice point, keep the cause
            raise SweepError(float(s), float(X), exc) from exc
    return out


def _map_rows(fn, rows, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, rows))  # map keeps submission order
    return [fn(r) for r in rows]


def sweep_grid(template: ProbRequest, grid: GridSpec, kernel: str = "narrow",
               threads: int = 1, strict: bool = True) -> ProbabilityGrid:
    kern = KERNELS[kernel]
    s_vals, x_vals = grid.s_values, grid.x_values
    rows = _map_rows(lambda s: _evaluate_row(kern, template, s, x_vals, strict), s_vals, threads)
    raw = np.array([[v.raw for v in row] for row in rows], dtype=float).reshape(grid.ns, grid.nx)
    flat = [v.quad for row in rows for v in row]
    summary = QuadSummary(len(flat), all(q.converged for q in flat),
                          max((q.est_error for q in flat), default=0.0),
                          max((q.panels_used for q in flat), default=0))
    i, j = np.unravel_index(int(np.argmax(raw)), raw.shape)
    return ProbabilityGrid(grid, raw, normalize(raw), (float(s_vals[i]), float(x_vals[j])), summary)


def with_detected_mass(template: ProbRequest, mD_sq: float) -> ProbRequest:
    d = template.detect
    if not isinstance(d, MatchedDetector):
        raise TypeError("detected-mass choice only applies to matched detectors")
    return replace(template, detect=replace(d, profile=replace(d.profile, m0_sq=mD_sq)))


def sweep_slice(template: ProbRequest, s: float, x_values: Sequence[float],
                mD_choices: Sequence[int], kernel: str = "narrow", threads: int = 1,
                normalize_columns: bool = False, strict: bool = True) -> Dict[str, np.ndarray]:
    """Raw probability along X at fixed s, one column per detected mass.

    ``mD_choices`` are mass indices (1, 2, 3); column ``prob_mD<j>`` holds
    the curve for detected mass m_j.
    """
    kern = KERNELS[kernel]
    xs = np.asarray(list(x_values), dtype=float)
    table = {"X": xs}
    msq = template.spectrum.masses_sq
    reqs = [with_detected_mass(template, msq[int(j) - 1]) for j in mD_choices]
    cols = _map_rows(lambda r: _evaluate_row(kern, r, s, xs, strict), reqs, threads)
    for j, col in zip(mD_choices, cols):
        table[f"prob_mD{int(j)}"] = np.array([v.raw for v in col], dtype=float)
    if normalize_columns and len(cols):
        top = max((c.max() for k, c in table.items() if k != "X" and c.size), default=0.0)
        if top > 0:
            for k in list(table):
                if k != "X":
                    table[k] = table[k] / top
    return table
