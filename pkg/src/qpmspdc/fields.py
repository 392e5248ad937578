"""Scalar 1D field synthesis and angular-spectrum propagation.

Transform conventions. A field E(x) and its angular spectrum S(q) form the
unitary pair

    S(q) = dx / sqrt(2 pi) * sum_x E(x) exp(-i q x)
    E(x) = dq / sqrt(2 pi) * sum_q S(q) exp(+i q x)

so power sum(|E|^2) dx equals sum(|S|^2) dq exactly (Parseval). Paraxial
propagation over a distance d in a medium of index n multiplies each spectral
component by exp(-i q^2 d / (2 k n)) with k = 2 pi / lambda_vac; the global
on-axis phase is dropped. With this propagator a converging thin lens is the
position-space factor exp(-i k x^2 / (2 f)) for f > 0 (the sign pair is what
makes lens + free flight of f focus a plane wave).

Sampling guard. The propagator is a pure phase, so it is exactly unitary;
what can go wrong is spectral content at the edge of the q grid (undersampled
source structure) wrapping around. ``propagate`` therefore measures the
spectral power near the grid edge and refuses to run when more than
``spectral_tail_tol`` of it sits there; the error suggests the sample count
that would contain the same tail.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import CrystalSpec, PumpSpec
from .dispersion import IndexModel
from .errors import GridSizeError, SamplingGuardError, ValidationError

_SQRT2PI = math.sqrt(2.0 * math.pi)


def _is_power_of_two(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


def _next_power_of_two(n: int) -> int:
    return 1 << max(1, int(n - 1).bit_length())


def _centered_grid(count: int, step: float) -> np.ndarray:
    return (np.arange(count) - count // 2) * step


@dataclass(frozen=True, eq=False)
class SampledField:
    """Complex scalar field on a uniform, centred transverse grid.

    values has a power-of-two length; extent is the full grid width in metres;
    wavelength is the vacuum wavelength; plane_z records the longitudinal
    coordinate of the sampling plane (bookkeeping only).
    """

    values: np.ndarray
    extent: float
    wavelength: float
    plane_z: float = 0.0

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 1 or not _is_power_of_two(values.size):
            raise ValidationError(
                f"field values must be a 1D array with power-of-two length, got shape {values.shape}")
        if not (math.isfinite(self.extent) and self.extent > 0):
            raise ValidationError(f"grid extent must be positive, got {self.extent!r}")
        if not (math.isfinite(self.wavelength) and self.wavelength > 0):
            raise ValidationError(f"wavelength must be positive, got {self.wavelength!r}")
        if not np.all(np.isfinite(values.view(float))):
            raise ValidationError("field values must be finite")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        if not self.power > 0:
            raise ValidationError("field must carry positive total power")

    @property
    def sample_count(self) -> int:
        return self.values.size

    @property
    def dx(self) -> float:
        return self.extent / self.values.size

    @property
    def x(self) -> np.ndarray:
        return _centered_grid(self.values.size, self.dx)

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    @property
    def power(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.dx)


@dataclass(frozen=True, eq=False)
class AngularSpectrum:
    """Complex amplitude over a uniform transverse-wavevector grid (rad/m)."""

    values: np.ndarray
    q_extent: float
    wavelength: float
    plane_z: float = 0.0

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 1 or not _is_power_of_two(values.size):
            raise ValidationError(
                f"spectrum values must be a 1D array with power-of-two length, got shape {values.shape}")
        if not (math.isfinite(self.q_extent) and self.q_extent > 0):
            raise ValidationError(f"q extent must be positive, got {self.q_extent!r}")
        if not (math.isfinite(self.wavelength) and self.wavelength > 0):
            raise ValidationError(f"wavelength must be positive, got {self.wavelength!r}")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def sample_count(self) -> int:
        return self.values.size

    @property
    def dq(self) -> float:
        return self.q_extent / self.values.size

    @property
    def q(self) -> np.ndarray:
        return _centered_grid(self.values.size, self.dq)

    @property
    def power(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.dq)


def gaussian_source(waist_radius: float, wavelength: float, *, grid_extent: float,
                    sample_count: int) -> SampledField:
    """Flat-phase Gaussian at its waist: amplitude exp(-x^2 / w0^2).

    Irradiance falls to e^-2 of its peak at x = w0. The grid must hold the
    beam: extent >= 8 * waist.
    """
    if not (math.isfinite(waist_radius) and waist_radius > 0):
        raise ValidationError(f"waist radius must be positive, got {waist_radius!r}")
    if grid_extent < 8.0 * waist_radius:
        raise GridSizeError(
            f"grid extent {grid_extent:.4g} m too small for waist {waist_radius:.4g} m "
            f"(need extent >= {8.0 * waist_radius:.4g} m)")
    if not _is_power_of_two(sample_count):
        raise ValidationError(f"sample count must be a power of two, got {sample_count!r}")
    x = _centered_grid(sample_count, grid_extent / sample_count)
    values = np.exp(-(x / waist_radius) ** 2).astype(complex)
    return SampledField(values=values, extent=grid_extent, wavelength=wavelength)


def to_angular_spectrum(field: SampledField) -> AngularSpectrum:
    """Unitary transform of a field to its angular spectrum."""
    shifted = np.fft.ifftshift(field.values)
    spec = np.fft.fftshift(np.fft.fft(shifted)) * (field.dx / _SQRT2PI)
    dq = 2.0 * math.pi / field.extent
    return AngularSpectrum(values=spec, q_extent=dq * field.sample_count,
                           wavelength=field.wavelength, plane_z=field.plane_z)


def to_sampled_field(spectrum: AngularSpectrum) -> SampledField:
    """Inverse of :func:`to_angular_spectrum`."""
    n = spectrum.sample_count
    shifted = np.fft.ifftshift(spectrum.values)
    values = np.fft.fftshift(np.fft.ifft(shifted)) * (n * spectrum.dq / _SQRT2PI)
    extent = 2.0 * math.pi / spectrum.dq
    return SampledField(values=values, extent=extent,
                        wavelength=spectrum.wavelength, plane_z=spectrum.plane_z)


def _spectral_tail_fraction(spectrum: AngularSpectrum, edge_band: float = 0.1) -> float:
    """Fraction of spectral power within edge_band of the q-grid edge."""
    q = spectrum.q
    q_max = float(np.max(np.abs(q)))
    band = np.abs(q) >= (1.0 - edge_band) * q_max
    total = float(np.sum(np.abs(spectrum.values) ** 2))
    if total == 0.0:
        return 0.0
    return float(np.sum(np.abs(spectrum.values[band]) ** 2)) / total


def propagate(field: SampledField, distance: float, medium_index: float = 1.0,
              *, spectral_tail_tol: float = 0.05) -> SampledField:
    """Angular-spectrum propagation by exp(-i q^2 d / (2 k n)) per component.

    Exactly power conserving. distance = 0 is the identity. A negative
    distance back-propagates (conjugate phase). Propagating a geometric
    distance d in a medium of index n equals free space of d/n, which is how
    the crystal interior is traversed.
    """
    if not math.isfinite(distance):
        raise ValidationError(f"propagation distance must be finite, got {distance!r}")
    if not (math.isfinite(medium_index) and medium_index > 0):
        raise ValidationError(f"medium index must be positive, got {medium_index!r}")
    if distance == 0.0:
        return field
    spectrum = to_angular_spectrum(field)
    tail = _spectral_tail_fraction(spectrum)
    if tail > spectral_tail_tol:
        suggested = _next_power_of_two(
            int(math.ceil(field.sample_count * tail / spectral_tail_tol)))
        raise SamplingGuardError(
            f"spectral power fraction {tail:.3g} at the q-grid edge exceeds "
            f"{spectral_tail_tol:.3g}; the source structure is undersampled",
            suggested_samples=suggested)
    k = 2.0 * math.pi / field.wavelength
    q = spectrum.q
    phase = np.exp(-1j * q**2 * distance / (2.0 * k * medium_index))
    out = AngularSpectrum(values=spectrum.values * phase, q_extent=spectrum.q_extent,
                          wavelength=spectrum.wavelength,
                          plane_z=spectrum.plane_z + distance)
    return to_sampled_field(out)


@dataclass(frozen=True)
class ThinLens:
    """Ideal thin lens; focal_length > 0 converges."""

    focal_length: float

    def __post_init__(self) -> None:
        if self.focal_length == 0 or not math.isfinite(self.focal_length):
            raise ValidationError(f"focal length must be finite and nonzero, got {self.focal_length!r}")


@dataclass(frozen=True)
class MultiSlitAperture:
    """slit_count identical slits of slit_width, centres center_separation apart."""

    slit_width: float
    center_separation: float = 0.0
    slit_count: int = 1

    def __post_init__(self) -> None:
        if not (math.isfinite(self.slit_width) and self.slit_width > 0):
            raise ValidationError(f"slit width must be positive, got {self.slit_width!r}")
        if not (math.isfinite(self.center_separation) and self.center_separation >= 0):
            raise ValidationError(f"slit separation must be >= 0, got {self.center_separation!r}")
        if not (isinstance(self.slit_count, int) and self.slit_count >= 1):
            raise ValidationError(f"slit count must be an integer >= 1, got {self.slit_count!r}")

    @property
    def span(self) -> float:
        return (self.slit_count - 1) * self.center_separation + self.slit_width

    def mask(self, x: np.ndarray) -> np.ndarray:
        centers = (np.arange(self.slit_count) - (self.slit_count - 1) / 2.0) * self.center_separation
        open_region = np.zeros_like(x, dtype=bool)
        for c in centers:
            open_region |= np.abs(x - c) <= 0.5 * self.slit_width
        return open_region.astype(float)


@dataclass(frozen=True)
class FreeSpace:
    """Homogeneous gap of geometric length distance and refractive index."""

    distance: float
    medium_index: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.distance) and self.distance >= 0):
            raise ValidationError(f"free-space distance must be >= 0, got {self.distance!r}")
        if not (math.isfinite(self.medium_index) and self.medium_index > 0):
            raise ValidationError(f"medium index must be positive, got {self.medium_index!r}")


OpticalElement = ThinLens | MultiSlitAperture | FreeSpace


def apply_element(field: SampledField, element: OpticalElement) -> SampledField:
    """Apply a thin optical element at the field's plane."""
    if isinstance(element, ThinLens):
        k = 2.0 * math.pi / field.wavelength
        factor = np.exp(-1j * k * field.x**2 / (2.0 * element.focal_length))
        return replace(field, values=field.values * factor)
    if isinstance(element, MultiSlitAperture):
        if element.span > field.extent:
            raise GridSizeError(
                f"aperture span {element.span:.4g} m exceeds grid extent {field.extent:.4g} m")
        return replace(field, values=field.values * element.mask(field.x))
    if isinstance(element, FreeSpace):
        return propagate(field, element.distance, element.medium_index)
    raise ValidationError(f"unknown optical element {element!r}")


def _march_to_crystal_exit(pump: PumpSpec, elements, crystal: CrystalSpec,
                           model: IndexModel, *, grid_extent: float,
                           sample_count: int) -> SampledField:
    """Source -> elements -> crystal entrance -> effective interior -> exit face.

    Element positions are longitudinal coordinates with the crystal entrance
    face at z = 0 (upstream negative); they must be sorted, at or before the
    crystal, and not upstream of the pump waist. The crystal interior counts
    as free space of optical length L/n0 for the pump.
    """
    placed = list(elements)
    last = pump.waist_position
    for z_e, element in placed:
        if z_e > 0:
            raise ValidationError(
                f"element position {z_e!r} m is past the crystal entrance; pump-side "
                "elements must sit at z <= 0")
        if z_e < last:
            raise ValidationError(
                "element positions must be monotone and downstream of the pump waist "
                f"(waist at {pump.waist_position!r} m)")
        last = z_e
    field = gaussian_source(pump.waist_radius, pump.center_wavelength,
                            grid_extent=grid_extent, sample_count=sample_count)
    field = replace(field, plane_z=pump.waist_position)
    z = pump.waist_position
    for z_e, element in placed:
        field = propagate(field, z_e - z)
        field = apply_element(field, element)
        z = z_e
    field = propagate(field, 0.0 - z)
    n0 = model.index(pump.center_wavelength, crystal.pump_axis, crystal.temperature_c)
    return propagate(field, crystal.length, medium_index=n0)


def pump_spectrum_at_crystal(pump: PumpSpec, elements, crystal: CrystalSpec,
                             model: IndexModel, *, grid_extent: float,
                             sample_count: int) -> AngularSpectrum:
    """Pump angular spectrum at the crystal exit face (biphoton source plane)."""
    field = _march_to_crystal_exit(pump, elements, crystal, model,
                                   grid_extent=grid_extent, sample_count=sample_count)
    return to_angular_spectrum(field)


def detection_plane_profile(pump: PumpSpec, elements, crystal: CrystalSpec,
                            model: IndexModel, detector_distance: float,
                            *, grid_extent: float, sample_count: int) -> SampledField:
    """Pump field at the detection plane, detector_distance past the crystal.

    This is what a power meter in the detection plane measures, and the W
    whose squared modulus the near-collinear coincidence profile follows.
    """
    if not (math.isfinite(detector_distance) and detector_distance > 0):
        raise ValidationError(f"detector distance must be positive, got {detector_distance!r}")
    field = _march_to_crystal_exit(pump, elements, crystal, model,
                                   grid_extent=grid_extent, sample_count=sample_count)
    return propagate(field, detector_distance)


def write_field_csv(field: SampledField, path) -> None:
    """CSV export: metadata header then x_m,re,im,intensity rows."""
    lines = [
        f"# wavelength_m = {field.wavelength!r}",
        f"# plane_z_m = {field.plane_z!r}",
        f"# grid_extent_m = {field.extent!r}",
        f"# sample_count = {field.sample_count}",
        "x_m,re,im,intensity",
    ]
    for x, v in zip(field.x, field.values):
        lines.append(f"{float(x)!r},{float(v.real)!r},{float(v.imag)!r},{float(abs(v) ** 2)!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
