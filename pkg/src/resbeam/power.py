"""Analytic power and communication chain.

Maps the cavity's steady-state transfer efficiencies to pump threshold,
intracavity intensity, output optical power, the power-split streams,
photovoltaic electrical output (single-diode implicit model) and the
avalanche-photodiode data link (signal current, SNR, spectral efficiency).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .cavity import SteadyState
from .errors import (
    BelowThreshold,
    DivergentThreshold,
    NoConvergence,
    ZeroEnergy,
)
from .field import FieldGrid, beam_diameter

ELECTRON_CHARGE = 1.602176634e-19  # coulombs
BOLTZMANN = 1.380649e-23  # joules per kelvin


@dataclass(frozen=True)
class GainMediumSpec:
    """Gain-medium constants; areas in cm^2, intensity in W/cm^2."""

    saturation_intensity: float = 1260.0
    excitation_efficiency: float = 0.72
    transit_efficiency: float = 0.99
    cross_section_area: float = math.pi * 0.25**2

    def __post_init__(self) -> None:
        if self.saturation_intensity <= 0 or self.cross_section_area <= 0:
            raise ValueError("intensity and area must be positive")
        for name in ("excitation_efficiency", "transit_efficiency"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1]")

    def small_signal_gain(self, p_in: float) -> float:
        """Single-pass small-signal gain-length product for a pump power."""
        return (
            self.excitation_efficiency
            * p_in
            / (self.cross_section_area * self.saturation_intensity)
        )


@dataclass(frozen=True)
class PvModel:
    """Single-diode photovoltaic circuit constants."""

    load_resistance: float = 100.0
    series_resistance: float = 0.93
    shunt_resistance: float = 52.6e3
    responsivity: float = 0.0161
    dark_current: float = 9.89e-9
    quality_factor: float = 1.105
    cell_count: int = 40

    def __post_init__(self) -> None:
        if min(self.load_resistance, self.series_resistance, self.shunt_resistance) <= 0:
            raise ValueError("resistances must be positive")
        if self.dark_current <= 0:
            raise ValueError("dark_current must be positive")
        if self.cell_count < 1:
            raise ValueError("cell_count must be >= 1")


@dataclass(frozen=True)
class ApdModel:
    """Avalanche-photodiode link constants."""

    responsivity: float = 0.6
    background_current: float = 5100e-6
    noise_bandwidth: float = 811.7e6
    load_resistance: float = 10e3

    def __post_init__(self) -> None:
        if self.noise_bandwidth <= 0 or self.load_resistance <= 0:
            raise ValueError("bandwidth and load resistance must be positive")


@dataclass(frozen=True)
class ReceiverElectronics:
    """Photovoltaic branch, data branch, and ambient constants."""

    pv: PvModel = PvModel()
    apd: ApdModel = ApdModel()
    electron_charge: float = ELECTRON_CHARGE
    boltzmann: float = BOLTZMANN
    temperature: float = 300.0

    def __post_init__(self) -> None:
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")


@dataclass(frozen=True)
class PowerBudget:
    """Results of the full power and communication chain."""

    p_in: float
    p_th: float
    p_out: float
    gamma: float
    p_ch: float
    p_com: float
    i_pv: float
    p_e: float
    i_data: float
    snr: float
    capacity: float
    beam_spot_area: float


def _round_trip_log_loss(r_in: float, r_out: float, eta_t: float, eta_g: float) -> float:
    arg = math.sqrt(r_in * r_out * eta_t) * eta_g
    if arg <= 0.0:
        raise DivergentThreshold("round-trip efficiency too close to zero")
    return abs(math.log(arg))


def threshold_power(
    gain: GainMediumSpec, r_in: float, r_out: float, eta_t: float
) -> float:
    """Pump power at which round-trip gain balances round-trip loss."""
    for name, value in (("r_in", r_in), ("r_out", r_out), ("eta_t", eta_t)):
        if not 0.0 < value <= 1.0:
            raise ValueError(f"{name} must lie in (0, 1]")
    loss = _round_trip_log_loss(r_in, r_out, eta_t, gain.transit_efficiency)
    return (
        gain.cross_section_area
        * gain.saturation_intensity
        / gain.excitation_efficiency
        * loss
    )


def steady_intensity(
    gain: GainMediumSpec, p_in: float, r_in: float, r_out: float, eta_t: float
) -> float:
    """Steady single-pass average intensity above threshold, W/cm^2.

    Raises
    ------
    BelowThreshold
        If the pump power does not reach the oscillation threshold.
    """
    p_th = threshold_power(gain, r_in, r_out, eta_t)
    if p_in < p_th:
        raise BelowThreshold(f"pump {p_in} W below threshold {p_th} W")
    loss = _round_trip_log_loss(r_in, r_out, eta_t, gain.transit_efficiency)
    g0l = gain.small_signal_gain(p_in)
    return 0.5 * gain.saturation_intensity * (g0l / loss - 1.0)


def output_power(
    gain: GainMediumSpec,
    steady: SteadyState,
    beam_area: float,
    p_in: float,
    r_out: float,
) -> float:
    """Output optical power of the resonator, clamped at zero below threshold."""
    if beam_area <= 0.0:
        raise ValueError("beam_area must be positive")
    eta_o = steady.eta_o
    eta_g = gain.transit_efficiency
    if eta_o <= 0.0:
        return 0.0
    gain_term = gain.small_signal_gain(p_in) - abs(
        math.log(math.sqrt(r_out * eta_g**2 * eta_o))
    )
    if gain_term <= 0.0:
        return 0.0
    denom = (
        1.0
        - r_out * steady.eta_tr * steady.eta_rt
        + math.sqrt(r_out * eta_o)
        * (1.0 / (steady.eta_lg * steady.eta_tr * eta_g) - eta_g)
    )
    numer = beam_area * gain.saturation_intensity * (1.0 - r_out) * steady.eta_tr
    return max(0.0, numer / denom * gain_term)


def split_power(p_out: float, gamma: float) -> tuple[float, float]:
    """Split the output beam into charging and communication streams.

    The streams sum to ``p_out`` exactly in floating point: the smaller
    fragment is rounded and the larger one is obtained by a subtraction
    that is exact whenever both operands are within a factor of two.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    if gamma >= 0.5:
        p_ch = gamma * p_out
        return p_ch, p_out - p_ch
    p_com = p_out - gamma * p_out
    return p_out - p_com, p_com


_PV_SOLVE_XTOL = 1e-15
# The diode exponent at the physical operating point is a few tens; capping
# its argument only flattens the residual far outside the root's basin while
# keeping the evaluation finite for the initial bracket endpoints.
_PV_EXP_CAP = 700.0


def pv_output(p_ch: float, electronics: ReceiverElectronics) -> tuple[float, float]:
    """Photovoltaic output current and electrical power for a charging beam.

    Solves the implicit single-diode circuit equation for the output
    current with a bracketing root finder; the residual is strictly
    decreasing in the current, so the root is unique.
    """
    if p_ch < 0.0:
        raise ValueError("p_ch must be >= 0")
    pv = electronics.pv
    thermal = (
        pv.cell_count
        * pv.quality_factor
        * electronics.boltzmann
        * electronics.temperature
        / electronics.electron_charge
    )
    photo = pv.responsivity * p_ch

    def residual(i: float) -> float:
        v_total = i * (pv.load_resistance + pv.series_resistance)
        exponent = min(v_total / thermal, _PV_EXP_CAP)
        return (
            photo
            - pv.dark_current * math.expm1(exponent)
            - v_total / pv.shunt_resistance
            - i
        )

    lo, hi = -photo - 1.0, photo + 1.0
    if residual(lo) < 0.0 or residual(hi) > 0.0:
        raise NoConvergence("photocurrent bracket does not straddle the root")
    try:
        current = float(brentq(residual, lo, hi, xtol=_PV_SOLVE_XTOL, maxiter=200))
    except RuntimeError as exc:
        raise NoConvergence("photovoltaic root finder exhausted its budget") from exc
    return current, current**2 * pv.load_resistance


def apd_link(
    p_com: float,
    electronics: ReceiverElectronics,
    log_base: float = math.e,
) -> tuple[float, float, float]:
    """Data current, SNR and spectral efficiency of the communication beam."""
    if p_com < 0.0:
        raise ValueError("p_com must be >= 0")
    apd = electronics.apd
    q = electronics.electron_charge
    i_data = apd.responsivity * p_com
    noise_sq = (
        2.0 * q * (apd.responsivity * p_com + apd.background_current)
        * apd.noise_bandwidth
        + 4.0
        * electronics.boltzmann
        * electronics.temperature
        * apd.noise_bandwidth
        / apd.load_resistance
    )
    snr = i_data**2 / (2.0 * math.e * math.pi * noise_sq)
    capacity = 0.5 * math.log1p(snr) / math.log(log_base)
    return i_data, snr, capacity


def beam_spot_area(mode_at_gain: FieldGrid) -> float:
    """Second-moment beam spot area on the gain medium, cm^2."""
    diameter_m = beam_diameter(mode_at_gain)
    if diameter_m <= 0.0:
        raise ZeroEnergy("degenerate beam spot")
    radius_cm = 0.5 * diameter_m * 100.0
    return math.pi * radius_cm**2
