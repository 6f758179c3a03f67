"""Exception taxonomy shared across the simulator."""


class SimulationError(Exception):
    """Base class for all simulator errors."""


class ZeroEnergy(SimulationError):
    """An operation that needs a nonzero field received an all-zero one."""


class GridTooLarge(SimulationError):
    """Grid exceeds the size limit of a brute-force operation."""


class ApertureUnresolved(SimulationError):
    """Fewer than the minimum number of samples span an aperture."""


class PanelUnresolved(SimulationError):
    """Fewer than the minimum number of samples span a reflecting panel."""


class ShiftOutOfBand(SimulationError):
    """Requested lateral shift leaves the grid guard band."""


class PoseOutOfRange(SimulationError):
    """Receiver pose violates the validity range of the tilt transform."""


class DegenerateGeometry(SimulationError):
    """Channel geometry does not define the requested angular quantity."""


class ZeroReference(SimulationError):
    """Transfer efficiency requested against a zero-energy reference."""


class ModeCollapse(SimulationError):
    """Cavity energy underflowed; the resonator is fully blocked."""


class BelowThreshold(SimulationError):
    """Pump power is at or below the oscillation threshold."""


class DivergentThreshold(SimulationError):
    """Threshold power diverges (round-trip efficiency too close to zero)."""


class NoConvergence(SimulationError):
    """An iterative root finder exhausted its iteration budget."""


class ConfigError(SimulationError):
    """Scenario configuration is malformed or inconsistent."""
