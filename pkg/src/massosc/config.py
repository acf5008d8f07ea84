"""Run configuration: one JSON document, nested sections, strict keys."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from typing import List, Optional, Tuple

from .core import ConfigError, PhysicalConfig, build_spectrum, validate
from .detector import PHASE_VARIANTS, MatchedDetector, WellDetector
from .probability import ProbRequest
from .profile import ProfileSpec
from .quadrature import QuadratureSpec
from .sweep import GridSpec

# box size for which the (n0, n1) = (2, 1) mode is tuned to m = 0.1
DEFAULT_WELL_L = math.pi * math.sqrt(300.0)


@dataclass(frozen=True)
class WellConfig:
    L0: float = DEFAULT_WELL_L
    L1: float = DEFAULT_WELL_L
    n0_max: int = 16
    n1_max: int = 16
    phase_variant: str = "literal"
    include_tachyonic: bool = False
    narrow: bool = True


@dataclass(frozen=True)
class SliceConfig:
    s: float = 20.0
    x_min: float = 0.0
    x_max: float = 40.0
    nx: int = 401
    mD_list: Tuple[int, ...] = (1, 3)


@dataclass(frozen=True)
class ProfileLattice:
    m0_sq: float = 5.0
    delta: float = 2.0
    W: float = 2.0
    m2_min: float = 3.0
    m2_max: float = 7.0
    n_m2: int = 81
    k1_min: float = -1.5
    k1_max: float = 1.5
    n_k1: int = 61


@dataclass(frozen=True)
class OracleConfig:
    points: Tuple[Tuple[float, float], ...] = ((5.0, 5.0), (10.0, 10.0), (20.0, 20.0),
                                               (20.0, 15.0), (30.0, 30.0))
    n_k: int = 201
    tolerance: float = 1e-3


@dataclass(frozen=True)
class OutputConfig:
    path: Optional[str] = None
    format: str = "csv"
    precision: int = 12


@dataclass(frozen=True)
class RunConfig:
    physical: PhysicalConfig = PhysicalConfig()
    detector_type: str = "matched"
    kernel: str = "narrow"
    well: WellConfig = WellConfig()
    quadrature: QuadratureSpec = QuadratureSpec()
    grid: GridSpec = GridSpec()
    slice: SliceConfig = SliceConfig()
    profile: ProfileLattice = ProfileLattice()
    oracle: OracleConfig = OracleConfig()
    output: OutputConfig = OutputConfig()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["slice"]["mD_list"] = list(self.slice.mD_list)
        d["oracle"]["points"] = [list(p) for p in self.oracle.points]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def digest(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def check(self) -> None:
        problems = [d.message for d in validate(self.physical) if d.severity == "error"]
        if self.detector_type not in ("matched", "well"):
            problems.append(f"detector_type must be 'matched' or 'well', got {self.detector_type!r}")
        if self.kernel not in ("narrow", "exact"):
            problems.append(f"kernel must be 'narrow' or 'exact', got {self.kernel!r}")
        if self.well.phase_variant not in PHASE_VARIANTS:
            problems.append(f"well.phase_variant must be one of {PHASE_VARIANTS}")
        if self.output.format not in ("csv", "json"):
            problems.append("output.format must be csv or json")
        if not 6 <= self.output.precision <= 17:
            problems.append("output.precision must lie in [6, 17]")
        if any(j not in (1, 2, 3) for j in self.slice.mD_list):
            problems.append("slice.mD_list entries must be 1, 2 or 3")
        if problems:
            raise ConfigError("; ".join(problems))

    # -- derived objects --------------------------------------------------

    def request(self) -> ProbRequest:
        phys = self.physical
        spectrum = build_spectrum(phys)
        msq = spectrum.masses_sq
        emit = ProfileSpec(msq[phys.m0_index - 1], phys.delta0, phys.W)
        if self.detector_type == "well":
            w = self.well
            det = WellDetector(w.L0, w.L1, n0_max=w.n0_max, n1_max=w.n1_max,
                               phase_variant=w.phase_variant, include_tachyonic=w.include_tachyonic)
            return ProbRequest(spectrum, emit, det, quad=self.quadrature, narrow=w.narrow)
        det = MatchedDetector(ProfileSpec(msq[phys.mD_index - 1], phys.deltaD, phys.W))
        return ProbRequest(spectrum, emit, det, quad=self.quadrature)


_SECTIONS = {
    "physical": PhysicalConfig, "well": WellConfig, "quadrature": QuadratureSpec,
    "grid": GridSpec, "slice": SliceConfig, "profile": ProfileLattice,
    "oracle": OracleConfig, "output": OutputConfig,
}


def _build(cls, data: dict, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where} must be an object")
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")
    data = dict(data)
    if cls is SliceConfig and "mD_list" in data:
        data["mD_list"] = tuple(int(j) for j in data["mD_list"])
    if cls is OracleConfig and "points" in data:
        data["points"] = tuple((float(s), float(x)) for s, x in data["points"])
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid {where}: {exc}") from exc


def from_dict(data: dict, base: Optional[RunConfig] = None) -> RunConfig:
    """Merge ``data`` over ``base`` (defaults when omitted), section by section."""
    base = base or RunConfig()
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - {f.name for f in fields(RunConfig)}
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    changes = {}
    for key, value in data.items():
        if key in _SECTIONS:
            merged = asdict(getattr(base, key))
            merged.update(value if isinstance(value, dict) else {"": value})
            changes[key] = _build(_SECTIONS[key], merged, key)
        else:
            changes[key] = value
    return replace(base, **changes)


def load(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return from_dict(data)


def override(cfg: RunConfig, section: str, **values) -> RunConfig:
    values = {k: v for k, v in values.items() if v is not None}
    if not values:
        return cfg
    return from_dict({section: values}, cfg)
