"""Physical configuration, mass spectrum and validation.

All quantities are dimensionless model units (hbar = c = 1). Masses are
quoted in eV only for orientation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import List, Tuple

LITERAL = "literal"
QUADRATIC = "quadratic"
MASS_CONVENTIONS = (LITERAL, QUADRATIC)


class ConfigError(ValueError):
    """Raised for physically or structurally invalid configurations."""


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" or "warning"
    message: str


@dataclass(frozen=True)
class MassSpectrum:
    """Three masses and the common half-width of the transmissible peaks."""

    masses: Tuple[float, ...]
    delta2: float

    def __post_init__(self):
        object.__setattr__(self, "masses", tuple(float(m) for m in self.masses))
        problems = _spectrum_problems(self.masses, self.delta2)
        if problems:
            raise ConfigError("; ".join(problems))

    @property
    def masses_sq(self) -> Tuple[float, ...]:
        return tuple(m * m for m in self.masses)


def _spectrum_problems(masses, delta2) -> List[str]:
    out = []
    if len(masses) != 3:
        out.append(f"expected 3 masses, got {len(masses)}")
        return out
    if not delta2 >= 0:
        out.append("delta2 must be non-negative")
        return out
    if any(not m > 0 for m in masses):
        out.append("masses must be positive")
    if any(b <= a for a, b in zip(masses, masses[1:])):
        out.append("masses must be strictly increasing")
        return out
    if any(m <= delta2 for m in masses):
        out.append("peak intervals overlap or reach zero (need every mass > delta2)")
        return out
    # intervals in m^2 are [(m-d)^2, (m+d)^2]; disjoint iff m_{j+1} - m_j > 2 d
    for a, b in zip(masses, masses[1:]):
        if (a + delta2) ** 2 >= (b - delta2) ** 2:
            out.append(f"peak intervals overlap or reach zero ({a} and {b} with delta2={delta2})")
    return out


@dataclass(frozen=True)
class SpaceTimePoint:
    s: float
    X: float


@dataclass(frozen=True)
class PhysicalConfig:
    """Physical parameters. Defaults are the neutrino-inspired parameter block.

    ``W`` is not given for the density and slice figures; 2 is the window
    used for the profile illustration.
    """

    m1: float = 0.1
    dm2_12: float = 7.6e-5
    dm2_13: float = 2.5e-3
    mass_convention: str = LITERAL
    delta0: float = 1.1 * 2.5e-3
    deltaD: float = 1.1 * 2.5e-3
    delta2: float = 0.001 * 7.6e-5
    W: float = 2.0
    m0_index: int = 3
    mD_index: int = 1

    def replace(self, **changes) -> "PhysicalConfig":
        data = asdict(self)
        data.update(changes)
        return PhysicalConfig(**data)

    def to_dict(self) -> dict:
        return asdict(self)


def raw_masses(cfg: PhysicalConfig) -> Tuple[float, float, float]:
    if cfg.mass_convention == LITERAL:
        return (cfg.m1, cfg.m1 + cfg.dm2_12, cfg.m1 + cfg.dm2_13)
    if cfg.mass_convention == QUADRATIC:
        m1sq = cfg.m1 * cfg.m1
        return (cfg.m1, math.sqrt(m1sq + cfg.dm2_12), math.sqrt(m1sq + cfg.dm2_13))
    raise ConfigError(f"unknown mass_convention {cfg.mass_convention!r}")


def build_spectrum(cfg: PhysicalConfig) -> MassSpectrum:
    """Masses m1, m2, m3 from m1 and the two splittings.

    With the ``literal`` convention the splittings are added to m1 as
    printed (m2 = m1 + dm2_12); ``quadratic`` uses m2 = sqrt(m1^2 + dm2_12).
    """
    return MassSpectrum(raw_masses(cfg), cfg.delta2)


def validate(cfg: PhysicalConfig) -> List[Diagnostic]:
    diags: List[Diagnostic] = []

    def err(msg):
        diags.append(Diagnostic("error", msg))

    def warn(msg):
        diags.append(Diagnostic("warning", msg))

    if cfg.mass_convention not in MASS_CONVENTIONS:
        err(f"unknown mass_convention {cfg.mass_convention!r}")
        return diags
    for name in ("m1", "dm2_12", "dm2_13", "delta0", "deltaD", "W"):
        v = getattr(cfg, name)
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            err(f"{name} must be a positive finite number, got {v!r}")
    if not (isinstance(cfg.delta2, (int, float)) and cfg.delta2 >= 0):
        err(f"delta2 must be non-negative, got {cfg.delta2!r}")
    for name in ("m0_index", "mD_index"):
        if getattr(cfg, name) not in (1, 2, 3):
            err(f"{name} must be 1, 2 or 3")
    if diags:
        return diags
    if not cfg.dm2_12 < cfg.dm2_13:
        err("dm2_12 must be smaller than dm2_13")
    masses = raw_masses(cfg)
    for msg in _spectrum_problems(masses, cfg.delta2):
        err(msg)
    if any(d.severity == "error" for d in diags):
        return diags

    msq = [m * m for m in masses]
    for name, width, idx in (("delta0", cfg.delta0, cfg.m0_index),
                             ("deltaD", cfg.deltaD, cfg.mD_index)):
        centre = msq[idx - 1]
        covered = sum(abs(x - centre) < width / 2 for x in msq)
        if covered < 3:
            kind = "only one mass peak" if covered == 1 else f"only {covered} mass peaks"
            warn(f"profile {name}={width:g} covers {kind}; no oscillation between all masses")
    return diags
