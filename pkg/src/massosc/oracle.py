"""Finite-dimensional projection chain, used to cross-check the kernels.

States live on a grid of (m^2, k1) nodes with positive quadrature weights
that already include the mass-shell measure d^2k = d(m^2) dk1 / (2 k0).
Internally everything is mapped to orthonormal coordinates v = sqrt(w) u,
in which the weighted inner product becomes the plain Euclidean one.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import MassSpectrum, SpaceTimePoint
from .massshell import peak_intervals
from .profile import ProfileSpec, profile_value
from .quadrature import gauss_legendre

DIAGONAL = "diagonal_indicator"
RANK_ONE = "rank_one"
DENSE_LIMIT = 2000


class GridMismatch(ValueError):
    pass


class BlockedStateError(ZeroDivisionError):
    """An intermediate density matrix has zero trace."""


@dataclass(frozen=True)
class DiscreteGrid:
    m_sq: np.ndarray
    k1: np.ndarray
    weights: np.ndarray
    on_peak: np.ndarray  # boolean, True inside the transmissible peaks

    def __post_init__(self):
        if not np.all(self.weights > 0):
            raise ValueError("grid weights must be positive")

    @property
    def size(self) -> int:
        return self.weights.size

    def same_as(self, other: "DiscreteGrid") -> bool:
        return self is other or (self.size == other.size
                                 and np.array_equal(self.weights, other.weights)
                                 and np.array_equal(self.m_sq, other.m_sq)
                                 and np.array_equal(self.k1, other.k1))


@dataclass(frozen=True)
class DiscreteState:
    grid: DiscreteGrid
    amplitudes: np.ndarray

    def vec(self) -> np.ndarray:
        """Coordinates in the orthonormal basis."""
        return np.sqrt(self.grid.weights) * self.amplitudes

    def norm(self) -> float:
        return float(np.linalg.norm(self.vec()))

    def normalized(self) -> "DiscreteState":
        n = self.norm()
        if n == 0:
            raise BlockedStateError("cannot normalise a zero state")
        return DiscreteState(self.grid, self.amplitudes / n)


@dataclass(frozen=True)
class DiscreteProjector:
    kind: str
    mask: Optional[np.ndarray] = None
    state: Optional[DiscreteState] = None

    @staticmethod
    def indicator(mask) -> "DiscreteProjector":
        return DiscreteProjector(DIAGONAL, mask=np.asarray(mask, dtype=bool))

    @staticmethod
    def onto(phi: DiscreteState) -> "DiscreteProjector":
        return DiscreteProjector(RANK_ONE, state=phi.normalized())

    def apply(self, v: np.ndarray) -> np.ndarray:
        if self.kind == DIAGONAL:
            return np.where(self.mask, v, 0)
        u = self.state.vec()
        return u * np.vdot(u, v)

    def matrix(self) -> np.ndarray:
        if self.kind == DIAGONAL:
            return np.diag(self.mask.astype(complex))
        u = self.state.vec()
        return np.outer(u, np.conj(u))

    def size(self) -> int:
        return self.mask.size if self.kind == DIAGONAL else self.state.grid.size


# -- grids and states -------------------------------------------------------

def build_grid(spectrum: MassSpectrum, W: float, n_k: int = 201, m_nodes_per_peak: int = 1,
               gap_nodes: int = 0) -> DiscreteGrid:
    """Tensor grid: peaks (plus optional masked gap nodes) x GL nodes in k1.

    With one node per peak the m^2 node sits at m_j^2 with weight
    4 m_j delta2, i.e. the peak-sum rule.
    """
    peaks = peak_intervals(spectrum)
    ms, wm, on = [], [], []
    for p in peaks:
        if m_nodes_per_peak == 1:
            ms.append([p.center_sq]); wm.append([p.weight])
        else:
            x, w = gauss_legendre(m_nodes_per_peak)
            ms.append(p.midpoint + p.half_width * x); wm.append(p.half_width * w)
        on.append(np.ones(len(ms[-1]), bool))
    for a, b in zip(peaks, peaks[1:]):
        if gap_nodes:
            x, w = gauss_legendre(gap_nodes)
            half = 0.5 * (b.lo - a.hi)
            ms.append(0.5 * (a.hi + b.lo) + half * x); wm.append(half * w)
            on.append(np.zeros(gap_nodes, bool))
    m_sq = np.concatenate(ms)
    w_m = np.concatenate(wm)
    on_m = np.concatenate(on)

    xk, wk = gauss_legendre(n_k)
    k = 0.5 * W * xk
    w_k = 0.5 * W * wk

    M, K = np.meshgrid(m_sq, k, indexing="ij")
    weights = np.outer(w_m, w_k) / (2 * np.sqrt(M + K * K))
    ON = np.broadcast_to(on_m[:, None], M.shape)
    if np.any(weights <= 0):
        raise ValueError("grid has empty peaks (delta2 = 0?)")
    return DiscreteGrid(M.ravel(), K.ravel(), weights.ravel(), ON.ravel().copy())


def emitted_state(grid: DiscreteGrid, profile: ProfileSpec) -> DiscreteState:
    """psi: profile amplitudes a(m^2, k1) on the grid."""
    return DiscreteState(grid, profile_value(profile, grid.m_sq, grid.k1).astype(complex))


def detector_state(grid: DiscreteGrid, profile: ProfileSpec, loc: SpaceTimePoint) -> DiscreteState:
    """phi shifted to (s, X); its coefficient on eta*_k carries exp(-i(k0 s + k1 X)),
    so that <phi|psi> picks up exp(+i(k0 s + k1 X))."""
    k0 = np.sqrt(grid.m_sq + grid.k1 ** 2)
    amp = profile_value(profile, grid.m_sq, grid.k1) * np.exp(-1j * (k0 * loc.s + grid.k1 * loc.X))
    return DiscreteState(grid, amp)


def propagation_projector(grid: DiscreteGrid) -> DiscreteProjector:
    return DiscreteProjector.indicator(grid.on_peak)


# -- the chain --------------------------------------------------------------

def _check_compat(psi, e2, e3):
    n = psi.grid.size
    if e2.size() != n or e3.size() != n:
        raise GridMismatch("projector size differs from the state grid")
    for e in (e2, e3):
        if e.kind == RANK_ONE and not e.state.grid.same_as(psi.grid):
            raise GridMismatch("rank-one projector built on a different grid")


def trace_form(psi: DiscreteState, e2: DiscreteProjector, e3: DiscreteProjector) -> float:
    """Tr[E3 E2 rho1 E2 E3] with all operators materialised."""
    v = psi.vec()
    rho1 = np.outer(v, np.conj(v))
    E2, E3 = e2.matrix(), e3.matrix()
    return float(np.real(np.trace(E3 @ E2 @ rho1 @ E2 @ E3)))


def apply_chain(psi: DiscreteState, e2: DiscreteProjector, e3: DiscreteProjector,
                check: Optional[bool] = None) -> float:
    """Prob = Tr[E3 E2 rho1 E2 E3] with rho1 = |psi><psi|.

    For rank-one E3 = |phi><phi| this is |<phi|E2 psi>|^2. On grids up to
    ``DENSE_LIMIT`` nodes the trace is also formed with explicit matrices and
    the two are required to agree.
    """
    _check_compat(psi, e2, e3)
    w = e2.apply(psi.vec())
    if e3.kind == RANK_ONE:
        u = e3.state.vec()
        prob = float(abs(np.vdot(u, w)) ** 2)
    else:
        prob = float(np.vdot(e3.apply(w), e3.apply(w)).real)
    if check is None:
        check = psi.grid.size <= DENSE_LIMIT
    if check:
        t = trace_form(psi, e2, e3)
        scale = max(abs(prob), abs(t), 1e-300) if prob or t else 1.0
        if abs(t - prob) > 1e-10 * scale + 1e-300:
            raise AssertionError(f"rank-one shortcut {prob!r} != trace form {t!r}")
    return prob


@dataclass(frozen=True)
class ChainStages:
    rho2: np.ndarray
    rho3: np.ndarray
    trace_rho2: float
    trace_rho3: float
    norm2: float  # Tr[E2 rho1 E2], probability of surviving propagation
    conditional: float  # Tr[E3 rho2 E3], detection given propagation
    probability: float  # Tr[E3 E2 rho1 E2 E3] = norm2 * conditional


def chain_stagewise(psi: DiscreteState, e2: DiscreteProjector, e3: DiscreteProjector) -> ChainStages:
    _check_compat(psi, e2, e3)
    if psi.grid.size > DENSE_LIMIT:
        raise ValueError(f"stagewise chain materialises n^2 matrices; n={psi.grid.size} > {DENSE_LIMIT}")
    v = psi.vec()
    rho1 = np.outer(v, np.conj(v))
    E2, E3 = e2.matrix(), e3.matrix()
    s2 = E2 @ rho1 @ E2
    t2 = float(np.real(np.trace(s2)))
    if t2 <= 0:
        raise BlockedStateError("Tr[E2 rho1 E2] = 0: state fully blocked in propagation")
    rho2 = s2 / t2
    s3 = E3 @ rho2 @ E3
    t3 = float(np.real(np.trace(s3)))
    if t3 <= 0:
        raise BlockedStateError("Tr[E3 rho2 E3] = 0: nothing reaches the detector")
    rho3 = s3 / t3
    tr2 = float(np.real(np.trace(rho2)))
    tr3 = float(np.real(np.trace(rho3)))
    if abs(tr2 - 1) > 1e-10 or abs(tr3 - 1) > 1e-10:
        raise AssertionError(f"stage traces not normalised: {tr2}, {tr3}")
    return ChainStages(rho2, rho3, tr2, tr3, t2, t3, t2 * t3)


def oracle_probability(spectrum: MassSpectrum, emit: ProfileSpec, detect: ProfileSpec,
                       loc: SpaceTimePoint, n_k: int = 201, grid: Optional[DiscreteGrid] = None) -> float:
    """Chain probability for the matched-detector setup on a peak grid."""
    W = min(emit.W, detect.W)
    grid = grid or build_grid(spectrum, W, n_k)
    psi = emitted_state(grid, emit)
    phi = detector_state(grid, detect, loc)
    if phi.norm() == 0:
        return 0.0
    return apply_chain(psi, propagation_projector(grid), DiscreteProjector.onto(phi))
