"""Sampled complex optical fields and their basic metrics.

A :class:`FieldGrid` is an immutable N x N complex field with a physical
sample pitch and a wavelength. All other modules operate on these values
and never mutate them.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ZeroEnergy


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class FieldGrid:
    """Complex scalar field sampled on a uniform square grid.

    Parameters
    ----------
    samples : ndarray
        N x N complex amplitudes (arbitrary units).
    pitch_x, pitch_y : float
        Physical sample spacing in meters.
    wavelength : float
        Optical wavelength in meters.
    label : str
        Free-text identifier of the plane the field lives on.
    """

    samples: np.ndarray
    pitch_x: float
    pitch_y: float
    wavelength: float
    label: str = ""

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.ndim != 2 or samples.shape[0] != samples.shape[1]:
            raise ValueError("samples must be a square 2-D array")
        n = samples.shape[0]
        if n < 8 or not _is_power_of_two(n):
            raise ValueError(f"grid side must be a power of two >= 8, got {n}")
        for name in ("pitch_x", "pitch_y", "wavelength"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be positive and finite")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples contain NaN or Inf")
        samples = samples.copy()
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def n(self) -> int:
        """Samples per side."""
        return self.samples.shape[0]

    @property
    def extent_x(self) -> float:
        """Physical side length along x in meters."""
        return self.n * self.pitch_x

    @property
    def extent_y(self) -> float:
        """Physical side length along y in meters."""
        return self.n * self.pitch_y

    def coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        """Centered physical coordinate grids (X, Y) in meters."""
        ax_x = (np.arange(self.n) - self.n // 2) * self.pitch_x
        ax_y = (np.arange(self.n) - self.n // 2) * self.pitch_y
        return np.meshgrid(ax_x, ax_y)

    def frequencies(self) -> tuple[np.ndarray, np.ndarray]:
        """Spatial frequency grids (FX, FY) in cycles per meter, fft order."""
        fx = np.fft.fftfreq(self.n, self.pitch_x)
        fy = np.fft.fftfreq(self.n, self.pitch_y)
        return np.meshgrid(fx, fy)

    def with_samples(self, samples: np.ndarray, label: str | None = None) -> "FieldGrid":
        """Return a copy of this grid geometry carrying new samples."""
        return replace(
            self, samples=samples, label=self.label if label is None else label
        )


@dataclass(frozen=True)
class GridSpec:
    """Discretization request: samples per side and physical extent.

    ``guard_factor`` is the zero-padding ratio kept between the largest
    aperture and the grid edge to suppress FFT wrap-around.
    """

    n: int
    physical_extent: float
    guard_factor: float = 1.0

    def __post_init__(self) -> None:
        if self.n % 2 != 0:
            raise ValueError("n must be even")
        if self.physical_extent <= 0 or not np.isfinite(self.physical_extent):
            raise ValueError("physical_extent must be positive and finite")
        if self.guard_factor < 1.0:
            raise ValueError("guard_factor must be >= 1")

    @property
    def pitch(self) -> float:
        """Sample spacing in meters."""
        return self.physical_extent / self.n

    def validate_aperture(self, radius: float) -> None:
        """Check the extent leaves the guard band around an aperture."""
        needed = self.guard_factor * 2.0 * radius
        if self.physical_extent < needed:
            raise ValueError(
                f"extent {self.physical_extent} m too small for aperture "
                f"radius {radius} m with guard factor {self.guard_factor}"
            )

    def blank_field(self, wavelength: float, label: str = "") -> FieldGrid:
        """An all-zero field on this grid (bypasses the finiteness check cost)."""
        samples = np.zeros((self.n, self.n), dtype=np.complex128)
        return FieldGrid(samples, self.pitch, self.pitch, wavelength, label)


def total_energy(field_grid: FieldGrid) -> float:
    """Total energy: sum of |U|^2 times the sample area element."""
    power = np.sum(np.abs(field_grid.samples) ** 2)
    return float(power * field_grid.pitch_x * field_grid.pitch_y)


def beam_diameter(field_grid: FieldGrid) -> float:
    """Second-moment (D4-sigma) beam diameter in meters.

    Four times the intensity-weighted standard deviation of transverse
    position, evaluated per axis and averaged over x and y.

    Raises
    ------
    ZeroEnergy
        If the field carries no energy.
    """
    intensity = np.abs(field_grid.samples) ** 2
    weight = intensity.sum()
    if weight <= 0.0:
        raise ZeroEnergy("beam_diameter of a zero field")
    x_grid, y_grid = field_grid.coordinates()
    diameters = []
    for axis in (x_grid, y_grid):
        mean = np.sum(axis * intensity) / weight
        var = np.sum((axis - mean) ** 2 * intensity) / weight
        diameters.append(4.0 * np.sqrt(var))
    return float(0.5 * (diameters[0] + diameters[1]))
