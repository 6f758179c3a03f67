"""Scenario configuration, sweeps, and result serialization.

Scenarios are described by flat key-value files with dotted paths (for
example ``layout.free_space.z = 2.0``). Every value is SI (meters, watts,
radians) except the gain-medium intensity (W/cm^2) and areas (cm^2).
A sweep names one scalar key and a list of values; each sweep point is an
independent solve.
"""

from __future__ import annotations

import concurrent.futures
import json
import math
import os
from dataclasses import dataclass, fields, replace

from .cavity import (
    CavityLayout,
    FreeSpaceSpec,
    ReceiverSpec,
    SteadyState,
    TransmitterSpec,
    fox_li_solve,
)
from .errors import ConfigError, ModeCollapse, SimulationError
from .field import GridSpec, beam_diameter
from .geometry import RisSpec, derive_geometry
from .motion import Pose
from .power import (
    GainMediumSpec,
    ApdModel,
    PvModel,
    ReceiverElectronics,
    apd_link,
    output_power,
    pv_output,
    split_power,
    threshold_power,
)
from .propagation import ApertureSpec

SPOT_AREA_GAIN_APERTURE = "gain_aperture"
SPOT_AREA_MODE = "mode"

_DEFAULTS: dict[str, object] = {
    "grid.n": 1024,
    "grid.extent": 8e-3,
    "grid.guard_factor": 1.0,
    "layout.wavelength": 1064e-9,
    "layout.transmitter.radius": 2.5e-3,
    "layout.transmitter.focal_length": 50e-3,
    "layout.transmitter.lens_to_mirror": 50e-3,
    "layout.transmitter.lens_to_gain": 50e-3,
    "layout.receiver.radius": 2.5e-3,
    "layout.receiver.focal_length": 50e-3,
    "layout.receiver.lens_to_mirror": 50e-3,
    "layout.receiver.rotation_loss": "projected",
    "layout.receiver.pose.dx": 0.0,
    "layout.receiver.pose.dy": 0.0,
    "layout.receiver.pose.xi_x": 0.0,
    "layout.receiver.pose.xi_y": 0.0,
    "layout.receiver.pose.xi_z": 0.0,
    "layout.free_space.mode": "nlos",
    "layout.free_space.z": 1.0,
    "layout.free_space.z_ti_fraction": 0.5,
    "layout.free_space.d_iz": 0.5,
    "layout.free_space.ris.beta": 1.0,
    "layout.free_space.ris.theta": 0.0,
    "layout.free_space.ris.side_length": 5e-3,
    "layout.free_space.obstruction.depth": 0.0,
    "layout.free_space.obstruction.position": 0.5,
    "layout.free_space.obstruction.axis_sign": "+x",
    "gain.saturation_intensity": 1260.0,
    "gain.excitation_efficiency": 0.72,
    "gain.transit_efficiency": 0.99,
    "gain.cross_section_area": 0.0,  # 0 = derive from transmitter radius
    "power.p_in": 200.0,
    "power.gamma": 0.3,
    "power.r_in": 1.0,
    "power.r_out": 0.95,
    "power.spot_area": SPOT_AREA_GAIN_APERTURE,
    "power.capacity_log_base": "e",
    "electronics.pv.load_resistance": 100.0,
    "electronics.pv.series_resistance": 0.93,
    "electronics.pv.shunt_resistance": 52.6e3,
    "electronics.pv.responsivity": 0.0161,
    "electronics.pv.dark_current": 9.89e-9,
    "electronics.pv.quality_factor": 1.105,
    "electronics.pv.cell_count": 40,
    "electronics.apd.responsivity": 0.6,
    "electronics.apd.background_current": 5100e-6,
    "electronics.apd.noise_bandwidth": 811.7e6,
    "electronics.apd.load_resistance": 10e3,
    "electronics.temperature": 300.0,
    "solver.seed": 0,
    "solver.tolerance": 1e-4,
    "solver.max_iterations": 500,
    "sweep.parameter": "",
    "sweep.values": (),
}

_INT_KEYS = {"grid.n", "electronics.pv.cell_count", "solver.seed",
             "solver.max_iterations"}
_STRING_KEYS = {
    "layout.receiver.rotation_loss",
    "layout.free_space.mode",
    "layout.free_space.obstruction.axis_sign",
    "power.spot_area",
    "power.capacity_log_base",
    "sweep.parameter",
}


@dataclass(frozen=True)
class Scenario:
    """One fully-specified simulation: layout, powers, electronics, solver."""

    settings: tuple[tuple[str, object], ...]

    @classmethod
    def from_mapping(cls, mapping: dict[str, object]) -> "Scenario":
        merged = dict(_DEFAULTS)
        for key, value in mapping.items():
            if key not in _DEFAULTS:
                raise ConfigError(f"unknown configuration key: {key}")
            merged[key] = value
        scenario = cls(settings=tuple(sorted(merged.items())))
        scenario.validate()
        return scenario

    def get(self, key: str) -> object:
        return dict(self.settings)[key]

    def override(self, key: str, value: object) -> "Scenario":
        if key not in _DEFAULTS:
            raise ConfigError(f"unknown configuration key: {key}")
        merged = dict(self.settings)
        merged[key] = value
        return Scenario(settings=tuple(sorted(merged.items())))

    def validate(self) -> None:
        sweep_parameter = str(self.get("sweep.parameter"))
        values = self.get("sweep.values")
        if sweep_parameter:
            if sweep_parameter not in _DEFAULTS:
                raise ConfigError(
                    f"sweep parameter is not a known key: {sweep_parameter}"
                )
            if sweep_parameter.startswith("sweep.") or sweep_parameter in _STRING_KEYS:
                raise ConfigError(
                    f"sweep parameter must name a scalar field: {sweep_parameter}"
                )
            if not values:
                raise ConfigError("sweep.values must be a nonempty list")
            if not all(math.isfinite(float(v)) for v in values):
                raise ConfigError("sweep.values must all be finite")
        self.layout()  # constructors run the remaining invariants

    def grid_spec(self) -> GridSpec:
        return GridSpec(
            n=int(self.get("grid.n")),
            physical_extent=float(self.get("grid.extent")),
            guard_factor=float(self.get("grid.guard_factor")),
        )

    def layout(self) -> CavityLayout:
        g = self.get
        tx_stop = ApertureSpec(radius=float(g("layout.transmitter.radius")))
        tx_lens = ApertureSpec(
            radius=float(g("layout.transmitter.radius")),
            focal_length=float(g("layout.transmitter.focal_length")),
        )
        transmitter = TransmitterSpec(
            mirror=tx_stop,
            lens=tx_lens,
            gain=tx_stop,
            lens_to_mirror=float(g("layout.transmitter.lens_to_mirror")),
            lens_to_gain=float(g("layout.transmitter.lens_to_gain")),
        )
        pose = Pose(
            dx=float(g("layout.receiver.pose.dx")),
            dy=float(g("layout.receiver.pose.dy")),
            xi_x=float(g("layout.receiver.pose.xi_x")),
            xi_y=float(g("layout.receiver.pose.xi_y")),
            xi_z=float(g("layout.receiver.pose.xi_z")),
        )
        rx_stop = ApertureSpec(radius=float(g("layout.receiver.radius")))
        rx_lens = ApertureSpec(
            radius=float(g("layout.receiver.radius")),
            focal_length=float(g("layout.receiver.focal_length")),
        )
        receiver = ReceiverSpec(
            lens=rx_lens,
            mirror=rx_stop,
            lens_to_mirror=float(g("layout.receiver.lens_to_mirror")),
            pose=pose,
            rotation_loss=str(g("layout.receiver.rotation_loss")),
        )
        mode = str(g("layout.free_space.mode"))
        z = float(g("layout.free_space.z"))
        if mode == "nlos":
            geometry = derive_geometry(
                z,
                float(g("layout.free_space.z_ti_fraction")) * z,
                float(g("layout.free_space.d_iz")),
            )
            ris = RisSpec(
                beta=float(g("layout.free_space.ris.beta")),
                theta=float(g("layout.free_space.ris.theta")),
                side_length=float(g("layout.free_space.ris.side_length")),
            )
            free_space = FreeSpaceSpec(
                mode="nlos", distance=z, geometry=geometry, ris=ris
            )
        else:
            depth = float(g("layout.free_space.obstruction.depth"))
            obstruction = None
            if depth > 0.0:
                obstruction = ApertureSpec(
                    radius=float(g("layout.receiver.radius")),
                    obstruction_depth=depth,
                    obstruction_axis_sign=str(
                        g("layout.free_space.obstruction.axis_sign")
                    ),
                )
            free_space = FreeSpaceSpec(
                mode="los",
                distance=z,
                obstruction=obstruction,
                obstruction_position=float(
                    g("layout.free_space.obstruction.position")
                ),
            )
        return CavityLayout(
            transmitter=transmitter,
            free_space=free_space,
            receiver=receiver,
            grid=self.grid_spec(),
            wavelength=float(g("layout.wavelength")),
        )

    def gain_medium(self) -> GainMediumSpec:
        area = float(self.get("gain.cross_section_area"))
        if area <= 0.0:
            radius_cm = float(self.get("layout.transmitter.radius")) * 100.0
            area = math.pi * radius_cm**2
        return GainMediumSpec(
            saturation_intensity=float(self.get("gain.saturation_intensity")),
            excitation_efficiency=float(self.get("gain.excitation_efficiency")),
            transit_efficiency=float(self.get("gain.transit_efficiency")),
            cross_section_area=area,
        )

    def electronics(self) -> ReceiverElectronics:
        g = self.get
        pv = PvModel(
            load_resistance=float(g("electronics.pv.load_resistance")),
            series_resistance=float(g("electronics.pv.series_resistance")),
            shunt_resistance=float(g("electronics.pv.shunt_resistance")),
            responsivity=float(g("electronics.pv.responsivity")),
            dark_current=float(g("electronics.pv.dark_current")),
            quality_factor=float(g("electronics.pv.quality_factor")),
            cell_count=int(g("electronics.pv.cell_count")),
        )
        apd = ApdModel(
            responsivity=float(g("electronics.apd.responsivity")),
            background_current=float(g("electronics.apd.background_current")),
            noise_bandwidth=float(g("electronics.apd.noise_bandwidth")),
            load_resistance=float(g("electronics.apd.load_resistance")),
        )
        return ReceiverElectronics(
            pv=pv, apd=apd, temperature=float(g("electronics.temperature"))
        )

    def capacity_log_base(self) -> float:
        raw = self.get("power.capacity_log_base")
        if isinstance(raw, str) and raw.strip().lower() == "e":
            return math.e
        return float(raw)


@dataclass(frozen=True)
class ResultRow:
    """One solved scenario (or sweep point) flattened for serialization."""

    sweep_parameter: str
    sweep_value: float
    eta_o: float
    eta_tr: float
    eta_rt: float
    p_out: float
    p_ch: float
    p_com: float
    p_e: float
    snr_db: float
    capacity: float
    beam_diameter: float
    iterations: int
    converged: bool
    error: str = ""


def parse_value(key: str, raw: str) -> object:
    raw = raw.strip()
    if key == "sweep.values":
        try:
            return tuple(float(part) for part in raw.split(",") if part.strip())
        except ValueError as exc:
            raise ConfigError(f"bad sweep values: {raw}") from exc
    if key in _STRING_KEYS:
        return raw
    try:
        if key in _INT_KEYS:
            return int(raw)
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw}") from exc


def parse_config_text(text: str) -> Scenario:
    """Parse a flat ``key = value`` configuration document."""
    mapping: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in _DEFAULTS:
            raise ConfigError(f"line {lineno}: unknown key {key}")
        mapping[key] = parse_value(key, raw)
    return Scenario.from_mapping(mapping)


def load_scenario(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config_text(handle.read())


def _power_chain(scenario: Scenario, steady: SteadyState) -> ResultRow:
    gain = scenario.gain_medium()
    electronics = scenario.electronics()
    p_in = float(scenario.get("power.p_in"))
    gamma = float(scenario.get("power.gamma"))
    r_out = float(scenario.get("power.r_out"))

    diameter = beam_diameter(steady.mode_at_gain)
    if str(scenario.get("power.spot_area")) == SPOT_AREA_MODE:
        radius_cm = 0.5 * diameter * 100.0
        beam_area = math.pi * radius_cm**2
    else:
        beam_area = gain.cross_section_area
    p_out = output_power(gain, steady, beam_area, p_in, r_out)
    p_ch, p_com = split_power(p_out, gamma)
    _, p_e = pv_output(p_ch, electronics)
    _, snr, capacity = apd_link(
        p_com, electronics, log_base=scenario.capacity_log_base()
    )
    snr_db = 10.0 * math.log10(snr) if snr > 0.0 else -math.inf
    return ResultRow(
        sweep_parameter=str(scenario.get("sweep.parameter")),
        sweep_value=math.nan,
        eta_o=steady.eta_o,
        eta_tr=steady.eta_tr,
        eta_rt=steady.eta_rt,
        p_out=p_out,
        p_ch=p_ch,
        p_com=p_com,
        p_e=p_e,
        snr_db=snr_db,
        capacity=capacity,
        beam_diameter=diameter,
        iterations=steady.iterations,
        converged=steady.converged,
    )


def run_scenario(scenario: Scenario, seed: int | None = None) -> ResultRow:
    """Solve one scenario end to end and evaluate the power chain.

    A fully blocked cavity (mode collapse) is reported as a zero-power,
    non-converged row rather than raised.
    """
    solver_seed = int(scenario.get("solver.seed")) if seed is None else seed
    layout = scenario.layout()
    try:
        steady = fox_li_solve(
            layout,
            seed=solver_seed,
            tolerance=float(scenario.get("solver.tolerance")),
            max_iterations=int(scenario.get("solver.max_iterations")),
        )
    except ModeCollapse:
        return ResultRow(
            sweep_parameter=str(scenario.get("sweep.parameter")),
            sweep_value=math.nan,
            eta_o=0.0,
            eta_tr=0.0,
            eta_rt=0.0,
            p_out=0.0,
            p_ch=0.0,
            p_com=0.0,
            p_e=0.0,
            snr_db=-math.inf,
            capacity=0.0,
            beam_diameter=0.0,
            iterations=0,
            converged=False,
            error="ModeCollapse",
        )
    return _power_chain(scenario, steady)


def _sweep_worker(args: tuple[Scenario, str, float, int]) -> ResultRow:
    scenario, parameter, value, seed = args
    point = scenario.override(parameter, value)
    try:
        row = run_scenario(point, seed=seed)
    except SimulationError as exc:
        return ResultRow(
            sweep_parameter=parameter,
            sweep_value=value,
            eta_o=0.0,
            eta_tr=0.0,
            eta_rt=0.0,
            p_out=0.0,
            p_ch=0.0,
            p_com=0.0,
            p_e=0.0,
            snr_db=-math.inf,
            capacity=0.0,
            beam_diameter=0.0,
            iterations=0,
            converged=False,
            error=f"{type(exc).__name__}: {exc}",
        )
    return replace(row, sweep_value=value)


def run_sweep(scenario: Scenario, seed: int | None = None) -> list[ResultRow]:
    """Solve every sweep point; rows come back in sweep order."""
    parameter = str(scenario.get("sweep.parameter"))
    if not parameter:
        raise ConfigError("scenario has no sweep section")
    values = [float(v) for v in scenario.get("sweep.values")]
    solver_seed = int(scenario.get("solver.seed")) if seed is None else seed
    jobs = [(scenario, parameter, value, solver_seed) for value in values]
    workers = _worker_count()
    if workers <= 1 or len(jobs) <= 1:
        return [_sweep_worker(job) for job in jobs]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_worker, jobs))


def _worker_count() -> int:
    raw = os.environ.get("RESBEAM_THREADS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return 1


def _formatted(value: object) -> object:
    if isinstance(value, bool) or not isinstance(value, float):
        return value
    if math.isnan(value) or math.isinf(value):
        return value
    return float(f"{value:.9g}")


def rows_to_json(rows: list[ResultRow]) -> str:
    payload = [
        {f.name: _formatted(getattr(row, f.name)) for f in fields(ResultRow)}
        for row in rows
    ]
    return json.dumps(payload, indent=2)


def rows_to_csv(rows: list[ResultRow]) -> str:
    names = [f.name for f in fields(ResultRow)]
    lines = [",".join(names)]
    for row in rows:
        cells = []
        for name in names:
            value = getattr(row, name)
            if isinstance(value, bool):
                cells.append("true" if value else "false")
            elif isinstance(value, float):
                cells.append(f"{value:.9g}")
            else:
                cells.append(str(value))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def emit_results(rows: list[ResultRow], fmt: str, destination: str) -> None:
    """Serialize rows to CSV or JSON at the destination path."""
    if fmt == "csv":
        text = rows_to_csv(rows)
    elif fmt == "json":
        text = rows_to_json(rows) + "\n"
    else:
        raise ConfigError(f"unknown output format: {fmt}")
    with open(destination, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
