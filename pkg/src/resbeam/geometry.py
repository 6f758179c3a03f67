"""Relay-path geometry and the reflecting-panel transform.

The transmitter-to-receiver dogleg via the reflecting panel is described
by the axial split of the transceiver distance and the panel height off
the axis; slant path lengths and arrival/departure angles derive from
those. The panel itself applies a uniform complex reflection coefficient
inside a square footprint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometry, PanelUnresolved
from .field import FieldGrid

_MIN_SAMPLES_ACROSS = 4


@dataclass(frozen=True)
class ChannelGeometry:
    """Dogleg geometry: axial distances, panel height, derived slants/angles."""

    z: float
    z_ti: float
    d_iz: float

    def __post_init__(self) -> None:
        if not 0.0 < self.z_ti < self.z:
            raise ValueError("need 0 < z_ti < z")
        if self.d_iz < 0.0:
            raise ValueError("d_iz must be >= 0")

    @property
    def z_ir(self) -> float:
        """Axial distance from panel to receiver."""
        return self.z - self.z_ti

    @property
    def l_ti(self) -> float:
        """Slant path length, transmitter to panel."""
        return math.hypot(self.z_ti, self.d_iz)

    @property
    def l_ir(self) -> float:
        """Slant path length, panel to receiver."""
        return math.hypot(self.z_ir, self.d_iz)

    @property
    def theta_a(self) -> float:
        """Angle of arrival at the panel, radians."""
        if self.d_iz == 0.0:
            raise DegenerateGeometry("arrival angle undefined at d_iz = 0")
        return math.atan(self.z_ti / self.d_iz)

    @property
    def theta_d(self) -> float:
        """Angle of departure from the panel, radians."""
        if self.d_iz == 0.0:
            raise DegenerateGeometry("departure angle undefined at d_iz = 0")
        return math.atan(self.z_ir / self.d_iz)

    def printed_form_l_ti(self) -> float:
        """Alternative slant length z_ti / sin(arctan(d_iz / z_ti)).

        Compatibility evaluation of a published variant that disagrees
        with the Euclidean hypotenuse; kept for comparison runs only.
        """
        if self.d_iz == 0.0:
            return self.z_ti
        return self.z_ti / math.sin(math.atan(self.d_iz / self.z_ti))


@dataclass(frozen=True)
class RisSpec:
    """Uniform reflecting panel: amplitude, phase, square footprint."""

    beta: float = 1.0
    theta: float = 0.0
    side_length: float = 5e-3

    def __post_init__(self) -> None:
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")
        if not 0.0 <= self.theta < 2.0 * math.pi:
            raise ValueError("theta must lie in [0, 2*pi)")
        if self.side_length <= 0.0:
            raise ValueError("side_length must be positive")


def derive_geometry(z: float, z_ti: float, d_iz: float) -> ChannelGeometry:
    """Build the dogleg geometry from the three primitive distances."""
    return ChannelGeometry(z=z, z_ti=z_ti, d_iz=d_iz)


def ris_phase_from_geometry(geometry: ChannelGeometry) -> float:
    """Panel phase that redirects the arrival angle into the departure angle.

    For the single uniform panel the steady mode is insensitive to this
    global constant; the value is the wrapped anomalous-reflection setting,
    zero in the specular (symmetric) case.
    """
    if geometry.d_iz == 0.0:
        return 0.0
    k = 2.0 * math.pi  # per unit wavelength; wrapped below
    delta = math.sin(geometry.theta_a) - math.sin(geometry.theta_d)
    return (k * abs(delta)) % (2.0 * math.pi)


def panel_mask(field_grid: FieldGrid, ris: RisSpec) -> np.ndarray:
    """Complex reflectance of the panel footprint on the grid."""
    samples_across = ris.side_length / max(field_grid.pitch_x, field_grid.pitch_y)
    if samples_across < _MIN_SAMPLES_ACROSS:
        raise PanelUnresolved(
            f"panel spans {samples_across:.1f} samples, need >= "
            f"{_MIN_SAMPLES_ACROSS}"
        )
    x_grid, y_grid = field_grid.coordinates()
    half = 0.5 * ris.side_length
    inside = (np.abs(x_grid) <= half) & (np.abs(y_grid) <= half)
    coeff = ris.beta * np.exp(1j * ris.theta)
    return np.where(inside, coeff, 0.0)


def apply_ris(field_grid: FieldGrid, ris: RisSpec) -> FieldGrid:
    """Apply the uniform panel transform: beta * exp(j*theta) inside, 0 outside."""
    mask = panel_mask(field_grid, ris)
    return field_grid.with_samples(field_grid.samples * mask)
