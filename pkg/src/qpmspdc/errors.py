"""Exception hierarchy shared by all modules.

Two broad families matter to callers: configuration/validation problems
(bad field values, malformed config text) and numerical/physical guard
failures (dispersion window, paraxiality, sampling, phase matching).
The CLI maps the first family to exit code 2 and the second to exit 3.
"""
from __future__ import annotations


class SimulationError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(SimulationError, ValueError):
    """A constructor or operation received an out-of-range input."""


class ConfigError(ValidationError):
    """Scenario configuration text could not be parsed or validated."""


class GuardError(SimulationError):
    """Base class for numerical / physical guard failures."""


class WavelengthWindowError(GuardError):
    """Wavelength outside an index model's validity window."""

    def __init__(self, wavelength: float, window: tuple[float, float], model_id: str):
        self.wavelength = wavelength
        self.window = window
        self.model_id = model_id
        lo, hi = window
        super().__init__(
            f"wavelength {wavelength * 1e9:.3f} nm outside validity window "
            f"[{lo * 1e9:.1f}, {hi * 1e9:.1f}] nm of index model '{model_id}'"
        )


class PhaseMatchingError(GuardError):
    """No quasi-phase-matching solution exists for the requested process."""


class ParaxialityError(GuardError):
    """Transverse wavevector too large for the paraxial expansion."""

    def __init__(self, ratio: float, bound: float):
        self.ratio = ratio
        self.bound = bound
        super().__init__(
            f"paraxiality guard violated: |q|/k = {ratio:.4f} exceeds bound {bound:.4f}"
        )


class SamplingGuardError(GuardError):
    """Grid sampling insufficient for a requested transform or propagation."""

    def __init__(self, message: str, suggested_samples: int | None = None):
        self.suggested_samples = suggested_samples
        if suggested_samples is not None:
            message = f"{message} (retry with sample_count >= {suggested_samples})"
        super().__init__(message)


class GridSizeError(GuardError):
    """Spatial grid too small to hold the requested structure."""


class GridCompatibilityError(GuardError):
    """Joint amplitude grid incompatible with the pump spectrum grid."""

    def __init__(self, message: str, required_q_extent: float | None = None):
        self.required_q_extent = required_q_extent
        if required_q_extent is not None:
            message = (
                f"{message} (pump spectrum must cover q extent >= "
                f"{required_q_extent:.6g} rad/m)"
            )
        super().__init__(message)
