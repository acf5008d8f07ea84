"""Mass-eigenstate oscillations with time as an observable: detection
probabilities for mass-broadened states and mass-selective detectors."""

from .core import (ConfigError, Diagnostic, MassSpectrum, PhysicalConfig, SpaceTimePoint,
                   build_spectrum, validate)
from .profile import ProfileSpec, profile_value, profile_value_momentum, rect
from .quadrature import QuadratureSpec, QuadResult, integrate_1d, integrate_2d_peaks
from .detector import MatchedDetector, WellDetector, WellMode
from .probability import (ProbRequest, ProbValue, prob_matched_exact, prob_matched_narrow,
                          prob_well)

__version__ = "0.1.0"
