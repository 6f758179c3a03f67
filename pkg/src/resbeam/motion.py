"""Receiver movement: lateral translation and plane rotation.

Translation uses the Fourier shift theorem. Rotation remaps the angular
spectrum onto the tilted plane with a carrier offset (the rotated optical
axis maps to the zero frequency of the output) and compensates sampling
density with the Jacobian of the frequency map. Two backward transforms
are provided: the exact functional inverse of the forward remap, and the
forward remap evaluated at the negated angles (the transform the receiver
chain in the source system description applies on the return pass).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import map_coordinates

from . import _kernels
from .errors import PoseOutOfRange, ShiftOutOfBand
from .field import FieldGrid

_W_FLOOR_SCALE = 1e-12  # clamp on the axial frequency, in units of 1/wavelength


@dataclass(frozen=True)
class Pose:
    """Receiver displacement and orientation relative to the reference plane."""

    dx: float = 0.0
    dy: float = 0.0
    xi_x: float = 0.0
    xi_y: float = 0.0
    xi_z: float = 0.0
    rotation_order: tuple[str, ...] = ("x", "y", "z")

    def __post_init__(self) -> None:
        if abs(self.xi_x) >= math.pi / 2 or abs(self.xi_y) >= math.pi / 2:
            raise PoseOutOfRange("tilt angles must satisfy |xi| < pi/2")
        if len(set(self.rotation_order)) != len(self.rotation_order):
            raise PoseOutOfRange("rotation_order must not repeat axes")
        if any(axis not in ("x", "y", "z") for axis in self.rotation_order):
            raise PoseOutOfRange("rotation_order axes must be x, y or z")

    @property
    def is_identity(self) -> bool:
        return (
            self.dx == 0.0
            and self.dy == 0.0
            and self.xi_x == 0.0
            and self.xi_y == 0.0
            and self.xi_z == 0.0
        )

    @property
    def has_rotation(self) -> bool:
        return not (self.xi_x == 0.0 and self.xi_y == 0.0 and self.xi_z == 0.0)

    def negated(self) -> "Pose":
        """Pose with every displacement and angle negated."""
        return Pose(
            dx=-self.dx,
            dy=-self.dy,
            xi_x=-self.xi_x,
            xi_y=-self.xi_y,
            xi_z=-self.xi_z,
            rotation_order=tuple(reversed(self.rotation_order)),
        )


def _axis_matrix(axis: str, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    if axis == "x":
        return np.array([[1, 0, 0], [0, c, -s], [0, s, c]], dtype=float)
    if axis == "y":
        return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]], dtype=float)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]], dtype=float)


def rotation_matrix(pose: Pose) -> tuple[np.ndarray, np.ndarray]:
    """Rotation matrix M for the pose and its inverse (the transpose).

    M is the ordered product of the per-axis rotation matrices; it is
    orthogonal with determinant +1.
    """
    angles = {"x": pose.xi_x, "y": pose.xi_y, "z": pose.xi_z}
    m = np.eye(3)
    for axis in pose.rotation_order:
        m = _axis_matrix(axis, angles[axis]) @ m
    return m, m.T


def translate_field(field_grid: FieldGrid, dx: float, dy: float) -> FieldGrid:
    """Shift a field laterally via the Fourier shift theorem.

    Raises
    ------
    ShiftOutOfBand
        If either shift reaches a quarter of the grid extent (the shifted
        support would leave the guard band and wrap around).
    """
    if dx == 0.0 and dy == 0.0:
        return field_grid
    if abs(dx) >= field_grid.extent_x / 4 or abs(dy) >= field_grid.extent_y / 4:
        raise ShiftOutOfBand(
            f"shift ({dx}, {dy}) m exceeds a quarter of the grid extent "
            f"({field_grid.extent_x}, {field_grid.extent_y}) m"
        )
    fx, fy = field_grid.frequencies()
    phase = np.exp(2j * np.pi * (fx * dx + fy * dy))
    out = np.fft.ifft2(np.fft.fft2(field_grid.samples) * phase)
    return field_grid.with_samples(out)


def _remap_spectrum(
    field_grid: FieldGrid,
    matrix: np.ndarray,
    inverse: bool,
    pad: int,
    order: int,
) -> FieldGrid:
    lam = field_grid.wavelength
    n0 = field_grid.n
    pitch = field_grid.pitch_x
    n = n0 * pad
    start = (n - n0) // 2
    padded = np.zeros((n, n), dtype=np.complex128)
    padded[start : start + n0, start : start + n0] = field_grid.samples
    spectrum = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(padded)))
    freq = np.fft.fftshift(np.fft.fftfreq(n, pitch))
    fx_hat, fy_hat = np.meshgrid(freq, freq)
    carrier = matrix @ np.array([0.0, 0.0, 1.0 / lam])
    if not inverse:
        coeff = matrix.T
        u = fx_hat + carrier[0]
        v = fy_hat + carrier[1]
        off_x = off_y = 0.0
    else:
        coeff = matrix
        u = fx_hat
        v = fy_hat
        off_x, off_y = carrier[0], carrier[1]
    a1, a2, a3 = coeff[0]
    a4, a5, a6 = coeff[1]
    w_sq = 1.0 / lam**2 - u**2 - v**2
    propagating = w_sq > 0.0
    w = np.sqrt(np.maximum(w_sq, 0.0))
    w = np.maximum(w, _W_FLOOR_SCALE / lam)
    fx_src = a1 * u + a2 * v + a3 * w - off_x
    fy_src = a4 * u + a5 * v + a6 * w - off_y
    jac = np.abs(
        (a2 * a6 - a3 * a5) * u / w
        + (a3 * a4 - a1 * a6) * v / w
        + (a1 * a5 - a2 * a4)
    )
    src_propagating = (fx_src + off_x) ** 2 + (fy_src + off_y) ** 2 < 1.0 / lam**2
    df = freq[1] - freq[0]
    ix = (fx_src - freq[0]) / df
    iy = (fy_src - freq[0]) / df
    if order == 1:
        remapped = _kernels.bilinear_gather(
            spectrum.real, spectrum.imag, iy, ix
        )
    else:
        remapped = map_coordinates(
            spectrum.real, [iy, ix], order=order, cval=0.0
        ) + 1j * map_coordinates(spectrum.imag, [iy, ix], order=order, cval=0.0)
    remapped *= jac
    remapped[~(propagating & src_propagating)] = 0.0
    out = np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(remapped)))
    out = out[start : start + n0, start : start + n0]
    return field_grid.with_samples(out)


def rotate_field(
    field_grid: FieldGrid,
    pose: Pose,
    inverse: bool = False,
    pad: int = 2,
    order: int = 1,
) -> FieldGrid:
    """Resample a field onto (or back from) a rotated plane.

    Forward (``inverse=False``): the output is the field on the plane
    rotated by the pose, with the rotated optical axis mapped to normal
    incidence (carrier removed). ``inverse=True`` applies the exact
    functional inverse of the forward remap.

    ``pad`` zero-pads before the spectral remap to densify frequency
    sampling; ``order`` selects the interpolant (1 bilinear, 3 bicubic).
    """
    if not pose.has_rotation:
        return field_grid
    matrix, _ = rotation_matrix(pose)
    return _remap_spectrum(field_grid, matrix, inverse, pad, order)
