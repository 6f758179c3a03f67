"""Wave-optics simulator for a resonant-beam power and data link.

The package models a laser cavity whose two ends are separated by meters of
free space, optionally folded by a reflecting panel or partially blocked by
an intruding object. A scalar-diffraction round-trip operator is iterated to
its dominant mode, and the resulting transfer efficiencies feed an analytic
chain producing output power, harvested electrical power, and channel
capacity.
"""

from .errors import (
    ApertureUnresolved,
    BelowThreshold,
    ConfigError,
    DegenerateGeometry,
    DivergentThreshold,
    GridTooLarge,
    ModeCollapse,
    NoConvergence,
    PanelUnresolved,
    PoseOutOfRange,
    ShiftOutOfBand,
    SimulationError,
    ZeroEnergy,
    ZeroReference,
)
from .field import FieldGrid, GridSpec, beam_diameter, total_energy
from .propagation import (
    INFINITE,
    ApertureSpec,
    angular_spectrum_propagate,
    apply_element,
    element_mask,
    rayleigh_sommerfeld_oracle,
)
from .geometry import (
    ChannelGeometry,
    RisSpec,
    apply_ris,
    derive_geometry,
    panel_mask,
    ris_phase_from_geometry,
)
from .motion import Pose, rotate_field, rotation_matrix, translate_field
from .cavity import (
    ROTATION_LOSS_NONE,
    ROTATION_LOSS_PROJECTED,
    CavityLayout,
    FreeSpaceSpec,
    ReceiverSpec,
    SteadyState,
    TransmitterSpec,
    fox_li_solve,
    round_trip,
    seed_field,
    transfer_efficiency,
)
from .power import (
    ApdModel,
    GainMediumSpec,
    PowerBudget,
    PvModel,
    ReceiverElectronics,
    apd_link,
    beam_spot_area,
    output_power,
    pv_output,
    split_power,
    steady_intensity,
    threshold_power,
)
from .harness import (
    ResultRow,
    Scenario,
    emit_results,
    load_scenario,
    parse_config_text,
    run_scenario,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "ApdModel",
    "ApertureSpec",
    "ApertureUnresolved",
    "ROTATION_LOSS_NONE",
    "ROTATION_LOSS_PROJECTED",
    "BelowThreshold",
    "CavityLayout",
    "ChannelGeometry",
    "ConfigError",
    "DegenerateGeometry",
    "DivergentThreshold",
    "FieldGrid",
    "FreeSpaceSpec",
    "GainMediumSpec",
    "GridSpec",
    "GridTooLarge",
    "INFINITE",
    "ModeCollapse",
    "NoConvergence",
    "PanelUnresolved",
    "Pose",
    "PoseOutOfRange",
    "PowerBudget",
    "PvModel",
    "ReceiverElectronics",
    "ReceiverSpec",
    "ResultRow",
    "RisSpec",
    "Scenario",
    "ShiftOutOfBand",
    "SimulationError",
    "SteadyState",
    "TransmitterSpec",
    "ZeroEnergy",
    "ZeroReference",
    "angular_spectrum_propagate",
    "apd_link",
    "apply_element",
    "apply_ris",
    "beam_diameter",
    "beam_spot_area",
    "derive_geometry",
    "element_mask",
    "emit_results",
    "fox_li_solve",
    "load_scenario",
    "output_power",
    "panel_mask",
    "parse_config_text",
    "pv_output",
    "rayleigh_sommerfeld_oracle",
    "ris_phase_from_geometry",
    "rotate_field",
    "rotation_matrix",
    "round_trip",
    "run_scenario",
    "run_sweep",
    "seed_field",
    "split_power",
    "steady_intensity",
    "threshold_power",
    "total_energy",
    "transfer_efficiency",
    "translate_field",
]
