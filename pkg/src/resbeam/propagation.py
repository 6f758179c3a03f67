"""Free-space scalar diffraction and pointwise optical elements.

The workhorse is the band-limited angular-spectrum transfer function; a
brute-force Rayleigh-Sommerfeld quadrature is kept alongside it as a
validation oracle for small grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ApertureUnresolved, GridTooLarge
from .field import FieldGrid

INFINITE = math.inf

_MIN_SAMPLES_ACROSS = 4


@dataclass(frozen=True)
class ApertureSpec:
    """Circular aperture, optionally focusing, optionally obstructed.

    ``focal_length = INFINITE`` encodes a plane mirror / pure stop.
    ``obstruction_depth`` is how far an opaque half-plane object has
    invaded the aperture along ``obstruction_axis_sign``.
    """

    radius: float
    focal_length: float = INFINITE
    obstruction_depth: float = 0.0
    obstruction_axis_sign: str = "+x"

    def __post_init__(self) -> None:
        if self.radius <= 0 or not np.isfinite(self.radius):
            raise ValueError("radius must be positive and finite")
        if self.focal_length == 0:
            raise ValueError("focal_length must be nonzero (INFINITE = flat)")
        if not 0.0 <= self.obstruction_depth <= 2.0 * self.radius:
            raise ValueError("obstruction_depth must lie in [0, 2*radius]")
        if self.obstruction_axis_sign not in ("+x", "-x", "+y", "-y"):
            raise ValueError("obstruction_axis_sign must be one of +x -x +y -y")

    @property
    def is_flat(self) -> bool:
        """True for a pure stop (no focusing phase)."""
        return math.isinf(self.focal_length)


def _transfer_function(
    field_grid: FieldGrid, distance: float, bandlimit: bool = True
) -> np.ndarray:
    fx, fy = field_grid.frequencies()
    lam = field_grid.wavelength
    k = 2.0 * np.pi / lam
    arg = 1.0 - (lam * fx) ** 2 - (lam * fy) ** 2
    propagating = arg > 0.0
    h = np.where(
        propagating,
        np.exp(1j * k * distance * np.sqrt(np.maximum(arg, 0.0))),
        0.0,
    )
    if bandlimit and distance != 0.0:
        # Frequency cap against transfer-function phase aliasing; the limit
        # shrinks with distance and grid-extent-derived frequency step.
        dfx = 1.0 / (field_grid.n * field_grid.pitch_x)
        dfy = 1.0 / (field_grid.n * field_grid.pitch_y)
        flim_x = 1.0 / (lam * np.sqrt((2.0 * dfx * abs(distance)) ** 2 + 1.0))
        flim_y = 1.0 / (lam * np.sqrt((2.0 * dfy * abs(distance)) ** 2 + 1.0))
        h = np.where((np.abs(fx) <= flim_x) & (np.abs(fy) <= flim_y), h, 0.0)
    return h


def angular_spectrum_propagate(field_grid: FieldGrid, distance: float) -> FieldGrid:
    """Propagate a field between parallel planes separated by ``distance``.

    Negative distances back-propagate. Evanescent spectral components are
    zeroed; the band-limiting cap suppresses wrap-around aliasing on long
    paths.
    """
    if not np.isfinite(distance):
        raise ValueError("distance must be finite")
    if distance == 0.0:
        return field_grid
    h = _transfer_function(field_grid, distance)
    spectrum = np.fft.fft2(field_grid.samples)
    out = np.fft.ifft2(spectrum * h)
    return field_grid.with_samples(out)


def rayleigh_sommerfeld_oracle(field_grid: FieldGrid, distance: float) -> FieldGrid:
    """Direct O(N^4) quadrature of the first Rayleigh-Sommerfeld kernel.

    Only sensible on small grids; used to validate the angular-spectrum
    engine.

    Raises
    ------
    GridTooLarge
        If the grid side exceeds 64 samples.
    """
    if field_grid.n > 64:
        raise GridTooLarge(f"oracle limited to N <= 64, got {field_grid.n}")
    if distance <= 0:
        raise ValueError("oracle requires a positive distance")
    n = field_grid.n
    xs = (np.arange(n) - n // 2) * field_grid.pitch_x
    ys = (np.arange(n) - n // 2) * field_grid.pitch_y
    k = 2.0 * np.pi / field_grid.wavelength
    raw = _kernels.rayleigh_sommerfeld_sum(
        field_grid.samples, xs, ys, distance, k
    )
    prefactor = distance / (1j * field_grid.wavelength)
    area = field_grid.pitch_x * field_grid.pitch_y
    return field_grid.with_samples(raw * prefactor * area)


def element_mask(field_grid: FieldGrid, element: ApertureSpec) -> np.ndarray:
    """Complex transmittance of an aperture/lens/obstruction on the grid."""
    samples_across = 2.0 * element.radius / max(field_grid.pitch_x, field_grid.pitch_y)
    if samples_across < _MIN_SAMPLES_ACROSS:
        raise ApertureUnresolved(
            f"aperture diameter spans {samples_across:.1f} samples, need >= "
            f"{_MIN_SAMPLES_ACROSS}"
        )
    x_grid, y_grid = field_grid.coordinates()
    rho2 = x_grid**2 + y_grid**2
    keep = rho2 <= element.radius**2
    if element.obstruction_depth > 0.0:
        sign = element.obstruction_axis_sign
        axis = x_grid if sign[1] == "x" else y_grid
        if sign[0] == "-":
            axis = -axis
        keep &= axis <= element.radius - element.obstruction_depth
    if element.is_flat:
        return keep.astype(np.complex128)
    lam = field_grid.wavelength
    phase = np.exp(-1j * np.pi * rho2 / (lam * element.focal_length))
    return np.where(keep, phase, 0.0)


def apply_element(field_grid: FieldGrid, element: ApertureSpec) -> FieldGrid:
    """Multiply a field by the pointwise transmittance of an element."""
    mask = element_mask(field_grid, element)
    return field_grid.with_samples(field_grid.samples * mask)
