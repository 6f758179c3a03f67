"""Round-trip cavity operator and the power-iteration mode solver.

The resonator spans a transmitting cat's-eye reflector (mirror, lens,
gain medium), a free-space section (direct, or folded over a reflecting
panel, optionally crossed by an obstruction plane), and a receiving
cat's-eye reflector that may be translated or rotated. Iterating the
round-trip operator with per-trip renormalization converges to the
dominant transverse mode; the pre-normalization energy ratio of the
converged trip is the round-trip transfer efficiency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .errors import ModeCollapse, ZeroReference
from .field import FieldGrid, GridSpec, total_energy
from .geometry import ChannelGeometry, RisSpec, apply_ris
from .motion import Pose, rotate_field, rotation_matrix, translate_field
from .propagation import ApertureSpec, angular_spectrum_propagate, apply_element

# How a tilted receiver attenuates the beam. "projected" scales the field
# by the flux-projection (obliquity) factor of the tilted plane at each
# crossing; "lossless" keeps the pure resampling, useful for round-trip
# identity checks.
ROTATION_LOSS_PROJECTED = "projected"
ROTATION_LOSS_NONE = "lossless"


@dataclass(frozen=True)
class TransmitterSpec:
    """Input cat's-eye reflector plus the gain aperture."""

    mirror: ApertureSpec
    lens: ApertureSpec
    gain: ApertureSpec
    lens_to_mirror: float = 50e-3
    lens_to_gain: float = 50e-3

    def __post_init__(self) -> None:
        if self.lens_to_mirror <= 0 or self.lens_to_gain <= 0:
            raise ValueError("transmitter distances must be positive")


@dataclass(frozen=True)
class ReceiverSpec:
    """Output cat's-eye reflector and its pose relative to the axis."""

    lens: ApertureSpec
    mirror: ApertureSpec
    lens_to_mirror: float = 50e-3
    pose: Pose = dataclass_field(default_factory=Pose)
    rotation_loss: str = ROTATION_LOSS_PROJECTED

    def __post_init__(self) -> None:
        if self.lens_to_mirror <= 0:
            raise ValueError("receiver lens_to_mirror must be positive")
        if self.rotation_loss not in (ROTATION_LOSS_PROJECTED, ROTATION_LOSS_NONE):
            raise ValueError("rotation_loss must be 'projected' or 'lossless'")


@dataclass(frozen=True)
class FreeSpaceSpec:
    """The section between the two reflectors.

    ``mode`` is ``"los"`` (direct, optionally obstructed) or ``"nlos"``
    (folded over the reflecting panel with slant segment lengths from the
    geometry). The obstruction plane sits at ``obstruction_position`` as a
    fraction of the direct distance.
    """

    mode: str
    distance: float
    geometry: ChannelGeometry | None = None
    ris: RisSpec | None = None
    obstruction: ApertureSpec | None = None
    obstruction_position: float = 0.5

    def __post_init__(self) -> None:
        if self.mode not in ("los", "nlos"):
            raise ValueError("mode must be 'los' or 'nlos'")
        if self.distance <= 0:
            raise ValueError("distance must be positive")
        if self.mode == "nlos":
            if self.geometry is None or self.ris is None:
                raise ValueError("nlos mode requires geometry and ris")
            if self.obstruction is not None:
                raise ValueError("obstruction is only meaningful in los mode")
        if not 0.0 < self.obstruction_position < 1.0:
            raise ValueError("obstruction_position must lie in (0, 1)")


@dataclass(frozen=True)
class CavityLayout:
    """Complete resonator description plus its discretization."""

    transmitter: TransmitterSpec
    free_space: FreeSpaceSpec
    receiver: ReceiverSpec
    grid: GridSpec
    wavelength: float = 1064e-9

    def __post_init__(self) -> None:
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")
        radii = [
            self.transmitter.mirror.radius,
            self.transmitter.lens.radius,
            self.transmitter.gain.radius,
            self.receiver.lens.radius,
            self.receiver.mirror.radius,
        ]
        self.grid.validate_aperture(max(radii))


@dataclass(frozen=True)
class SteadyState:
    """Converged cavity mode and its transfer efficiencies."""

    mode_at_gain: FieldGrid
    mode_at_receiver: FieldGrid
    eta_tr: float
    eta_rt: float
    eta_lg: float
    eta_o: float
    iterations: int
    converged: bool
    eigenvalue_magnitude: float


class _Checkpoints:
    """Per-plane energies collected on one instrumented round trip."""

    def __init__(self) -> None:
        self.gain_out = 0.0
        self.receiver_in = 0.0
        self.receiver_out = 0.0
        self.gain_back = 0.0
        self.mirror_in = 0.0
        self.gain_final = 0.0
        self.mode_at_receiver: FieldGrid | None = None


def _free_space_forward(field_grid: FieldGrid, spec: FreeSpaceSpec) -> FieldGrid:
    if spec.mode == "nlos":
        geom = spec.geometry
        out = angular_spectrum_propagate(field_grid, geom.l_ti)
        out = apply_ris(out, spec.ris)
        return angular_spectrum_propagate(out, geom.l_ir)
    if spec.obstruction is not None:
        z_obs = spec.obstruction_position * spec.distance
        out = angular_spectrum_propagate(field_grid, z_obs)
        out = apply_element(out, spec.obstruction)
        return angular_spectrum_propagate(out, spec.distance - z_obs)
    return angular_spectrum_propagate(field_grid, spec.distance)


def _free_space_backward(field_grid: FieldGrid, spec: FreeSpaceSpec) -> FieldGrid:
    if spec.mode == "nlos":
        geom = spec.geometry
        out = angular_spectrum_propagate(field_grid, geom.l_ir)
        out = apply_ris(out, spec.ris)
        return angular_spectrum_propagate(out, geom.l_ti)
    if spec.obstruction is not None:
        z_obs = spec.obstruction_position * spec.distance
        out = angular_spectrum_propagate(field_grid, spec.distance - z_obs)
        out = apply_element(out, spec.obstruction)
        return angular_spectrum_propagate(out, z_obs)
    return angular_spectrum_propagate(field_grid, spec.distance)


def _obliquity_amplitude(receiver: ReceiverSpec) -> float:
    """Amplitude factor for one crossing of the tilted receiver plane.

    The scalar model tracks the field on planes; the power carried across
    a plane tilted by theta from the propagation axis is reduced by the
    flux projection cos(theta), i.e. sqrt(cos(theta)) in amplitude. The
    tilt cosine is the z-z entry of the pose rotation matrix.
    """
    if receiver.rotation_loss != ROTATION_LOSS_PROJECTED:
        return 1.0
    matrix, _ = rotation_matrix(receiver.pose)
    return math.sqrt(matrix[2, 2])


def _pose_forward(field_grid: FieldGrid, receiver: ReceiverSpec) -> FieldGrid:
    pose = receiver.pose
    out = field_grid
    if pose.dx != 0.0 or pose.dy != 0.0:
        out = translate_field(out, pose.dx, pose.dy)
    if pose.has_rotation:
        out = rotate_field(out, pose)
        scale = _obliquity_amplitude(receiver)
        if scale != 1.0:
            out = out.with_samples(out.samples * scale)
    return out


def _pose_backward(field_grid: FieldGrid, receiver: ReceiverSpec) -> FieldGrid:
    pose = receiver.pose
    out = field_grid
    if pose.has_rotation:
        out = rotate_field(out, pose, inverse=True)
        scale = _obliquity_amplitude(receiver)
        if scale != 1.0:
            out = out.with_samples(out.samples * scale)
    if pose.dx != 0.0 or pose.dy != 0.0:
        out = translate_field(out, -pose.dx, -pose.dy)
    return out


def round_trip(
    field_grid: FieldGrid,
    layout: CavityLayout,
    checkpoints: _Checkpoints | None = None,
) -> FieldGrid:
    """One full round trip starting and ending at the gain plane."""
    tx = layout.transmitter
    rx = layout.receiver

    out = apply_element(field_grid, tx.gain)
    if checkpoints is not None:
        checkpoints.gain_out = total_energy(out)

    out = _free_space_forward(out, layout.free_space)
    out = _pose_forward(out, rx)
    if checkpoints is not None:
        checkpoints.receiver_in = total_energy(out)
        checkpoints.mode_at_receiver = out

    out = apply_element(out, rx.lens)
    out = angular_spectrum_propagate(out, rx.lens_to_mirror)
    out = apply_element(out, rx.mirror)
    out = angular_spectrum_propagate(out, rx.lens_to_mirror)
    out = apply_element(out, rx.lens)

    out = _pose_backward(out, rx)
    if checkpoints is not None:
        checkpoints.receiver_out = total_energy(out)

    out = _free_space_backward(out, layout.free_space)
    out = apply_element(out, tx.gain)
    if checkpoints is not None:
        checkpoints.gain_back = total_energy(out)

    out = angular_spectrum_propagate(out, tx.lens_to_gain)
    out = apply_element(out, tx.lens)
    out = angular_spectrum_propagate(out, tx.lens_to_mirror)
    out = apply_element(out, tx.mirror)
    if checkpoints is not None:
        checkpoints.mirror_in = total_energy(out)

    out = angular_spectrum_propagate(out, tx.lens_to_mirror)
    out = apply_element(out, tx.lens)
    out = angular_spectrum_propagate(out, tx.lens_to_gain)
    out = apply_element(out, tx.gain)
    if checkpoints is not None:
        checkpoints.gain_final = total_energy(out)
    return out


def seed_field(layout: CavityLayout, seed: int) -> FieldGrid:
    """Reproducible random seed field: complex noise under a Gaussian envelope."""
    spec = layout.grid
    n = spec.n
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    blank = spec.blank_field(layout.wavelength, label="gain")
    x_grid, y_grid = blank.coordinates()
    waist = 0.6 * layout.transmitter.gain.radius
    envelope = np.exp(-(x_grid**2 + y_grid**2) / waist**2)
    samples = noise * envelope
    norm = np.sqrt(np.sum(np.abs(samples) ** 2) * spec.pitch**2)
    return blank.with_samples(samples / norm)


_ENERGY_FLOOR = 1e-30
_MIN_ITERATIONS = 30


def fox_li_solve(
    layout: CavityLayout,
    seed: int = 0,
    tolerance: float = 1e-4,
    max_iterations: int = 500,
) -> SteadyState:
    """Power-iterate the round trip to the self-reproducing mode.

    Convergence is declared when the L2 norm of the difference between
    successive unit-energy, phase-aligned fields drops below the
    tolerance. The returned state carries per-segment efficiencies
    measured on one extra instrumented trip of the converged mode.

    Raises
    ------
    ModeCollapse
        If the circulating energy underflows (fully blocked cavity).
    """
    if not 1e-10 < tolerance < 1e-2:
        raise ValueError("tolerance must lie in (1e-10, 1e-2)")
    if max_iterations < 50:
        raise ValueError("max_iterations must be >= 50")

    current = seed_field(layout, seed)
    previous = current
    converged = False
    iterations = 0
    for iteration in range(max_iterations):
        iterations = iteration + 1
        out = round_trip(current, layout)
        energy = total_energy(out)
        if energy < _ENERGY_FLOOR:
            raise ModeCollapse(
                f"round-trip energy underflow at iteration {iterations}"
            )
        current = out.with_samples(out.samples / np.sqrt(energy))
        phase = np.exp(
            -1j * np.angle(np.vdot(previous.samples, current.samples))
        )
        aligned = current.with_samples(current.samples * phase)
        diff = np.sqrt(
            total_energy(
                aligned.with_samples(aligned.samples - previous.samples)
            )
        )
        previous = current
        if diff < tolerance and iterations > _MIN_ITERATIONS:
            converged = True
            break

    checkpoints = _Checkpoints()
    final = round_trip(current, layout, checkpoints)
    eta_o = total_energy(final)  # input is unit energy
    if eta_o < _ENERGY_FLOOR:
        raise ModeCollapse("converged mode carries no round-trip energy")

    def _ratio(after: float, before: float) -> float:
        if before <= 0.0:
            return 0.0
        return min(1.0, after / before)

    return SteadyState(
        mode_at_gain=current.with_samples(current.samples, label="gain"),
        mode_at_receiver=checkpoints.mode_at_receiver,
        eta_tr=_ratio(checkpoints.receiver_in, checkpoints.gain_out),
        eta_rt=_ratio(checkpoints.gain_back, checkpoints.receiver_out),
        eta_lg=_ratio(checkpoints.gain_final, checkpoints.mirror_in),
        eta_o=min(1.0, eta_o),
        iterations=iterations,
        converged=converged,
        eigenvalue_magnitude=float(np.sqrt(eta_o)),
    )


def transfer_efficiency(field_after: FieldGrid, field_before: FieldGrid) -> float:
    """Energy ratio between two planes, clamped to [0, 1].

    Raises
    ------
    ZeroReference
        If the reference (before) field carries no energy.
    """
    before = total_energy(field_before)
    if before <= 0.0:
        raise ZeroReference("transfer efficiency against a zero-energy field")
    after = total_energy(field_after)
    return float(np.clip(after / before, 0.0, 1.0))
