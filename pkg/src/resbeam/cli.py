"""Command-line entry point.

Subcommands
-----------
solve <config>
    Run a single scenario and print the result row as JSON on stdout.
sweep <config> --out <path> --format csv|json
    Run the configured parameter sweep and write all rows to a file.
validate
    Run fast physics self-checks against independent oracles.
presets list
    List the bundled scenario configuration files.

Exit status is 0 on success, 1 on a configuration or scenario error, and 2
when a validation check fails. The ``RESBEAM_THREADS`` environment variable
sets how many sweep points run concurrently, and ``RESBEAM_DISABLE_NUMBA``
forces the pure-numpy compute kernels.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import fields
from importlib import resources

import numpy as np

from . import harness
from .errors import SimulationError
from .field import FieldGrid, beam_diameter, total_energy
from .harness import ResultRow
from .motion import Pose, rotate_field, translate_field
from .power import ReceiverElectronics, pv_output
from .propagation import angular_spectrum_propagate, rayleigh_sommerfeld_oracle


def _resolve_config(name: str) -> str:
    """Accept either a filesystem path or the name of a bundled preset."""
    import os

    if os.path.exists(name):
        with open(name, "r", encoding="utf-8") as handle:
            return handle.read()
    stem = name[:-4] if name.endswith(".cfg") else name
    preset = resources.files("resbeam").joinpath("presets", f"{stem}.cfg")
    if preset.is_file():
        return preset.read_text(encoding="utf-8")
    raise FileNotFoundError(f"no such config file or preset: {name}")


def _cmd_solve(args: argparse.Namespace) -> int:
    scenario = harness.parse_config_text(_resolve_config(args.config))
    row = harness.run_scenario(scenario, seed=args.seed)
    payload = {
        f.name: harness._formatted(getattr(row, f.name)) for f in fields(ResultRow)
    }
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    scenario = harness.parse_config_text(_resolve_config(args.config))
    rows = harness.run_sweep(scenario, seed=args.seed)
    harness.emit_results(rows, args.format, args.out)
    failures = sum(1 for row in rows if row.error)
    print(f"wrote {len(rows)} rows to {args.out} ({failures} flagged)", file=sys.stderr)
    return 0


def _cmd_presets(args: argparse.Namespace) -> int:
    if args.action != "list":
        print(f"unknown presets action: {args.action}", file=sys.stderr)
        return 1
    root = resources.files("resbeam").joinpath("presets")
    names = sorted(
        entry.name[:-4] for entry in root.iterdir() if entry.name.endswith(".cfg")
    )
    for name in names:
        print(name)
    return 0


def _gaussian(n: int, pitch: float, waist: float, wavelength: float) -> FieldGrid:
    coords = (np.arange(n) - n // 2) * pitch
    xx, yy = np.meshgrid(coords, coords)
    samples = np.exp(-(xx**2 + yy**2) / waist**2).astype(np.complex128)
    return FieldGrid(samples, pitch, pitch, wavelength)


def _check(name: str, ok: bool, detail: str) -> bool:
    print(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})")
    return ok


def _cmd_validate(_args: argparse.Namespace) -> int:
    ok = True
    wavelength = 1064e-9

    # 1. Spectral propagator against a direct diffraction-sum oracle. The
    # comparison window is the central half of the grid, where the direct
    # sum's kernel is well sampled and the FFT wrap-around is negligible.
    field = _gaussian(64, 25e-6, 0.3e-3, wavelength)
    distance = 0.25
    fast = angular_spectrum_propagate(field, distance)
    slow = rayleigh_sommerfeld_oracle(field, distance)
    window = slice(16, 48)
    err = float(
        np.linalg.norm(fast.samples[window, window] - slow.samples[window, window])
        / np.linalg.norm(slow.samples[window, window])
    )
    ok &= _check("spectral propagator vs diffraction sum", err < 1e-3,
                 f"rel err {err:.2e}")

    # 2. Free-space Gaussian width follows the analytic divergence law.
    waist = 0.5e-3
    field = _gaussian(512, 30e-6, waist, wavelength)
    z = 1.0
    rayleigh = math.pi * waist**2 / wavelength
    expected = 2.0 * waist * math.sqrt(1.0 + (z / rayleigh) ** 2)
    measured = beam_diameter(angular_spectrum_propagate(field, z))
    err = abs(measured - expected) / expected
    ok &= _check("Gaussian divergence law", err < 1e-2, f"rel err {err:.2e}")

    # 3. Lateral shift inverts exactly and conserves energy.
    field = _gaussian(256, 40e-6, 1e-3, wavelength)
    shift = 0.7e-3
    back = translate_field(translate_field(field, shift, -shift), -shift, shift)
    err = float(
        np.linalg.norm(back.samples - field.samples) / np.linalg.norm(field.samples)
    )
    ok &= _check("translation round trip", err < 1e-9, f"rel err {err:.2e}")
    energy_drift = abs(
        total_energy(translate_field(field, shift, 0.0)) - total_energy(field)
    ) / total_energy(field)
    ok &= _check("translation energy conservation", energy_drift < 1e-12,
                 f"drift {energy_drift:.2e}")

    # 4. Tilted-plane rotation followed by its exact inverse is the identity.
    field = _gaussian(256, 40e-6, 1.2e-3, wavelength)
    pose = Pose(xi_y=math.radians(20.0))
    rotated = rotate_field(field, pose, pad=2, order=3)
    back = rotate_field(rotated, pose, inverse=True, pad=2, order=3)
    err = float(
        np.linalg.norm(back.samples - field.samples) / np.linalg.norm(field.samples)
    )
    ok &= _check("rotation round trip (20 deg)", err < 2e-2, f"rel err {err:.2e}")

    # 5. Photovoltaic root finder satisfies the circuit equation.
    electronics = ReceiverElectronics()
    pv = electronics.pv
    current, _ = pv_output(18.0, electronics)
    v_total = current * (pv.load_resistance + pv.series_resistance)
    thermal = (
        pv.cell_count * pv.quality_factor * electronics.boltzmann
        * electronics.temperature / electronics.electron_charge
    )
    residual = abs(
        pv.responsivity * 18.0
        - pv.dark_current * math.expm1(v_total / thermal)
        - v_total / pv.shunt_resistance
        - current
    )
    ok &= _check("photovoltaic circuit residual", residual < 1e-8,
                 f"residual {residual:.2e}")

    if not ok:
        print("validation FAILED", file=sys.stderr)
        return 2
    print("all validation checks passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resbeam",
        description="Resonant-beam power and data link simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run one scenario, print JSON")
    p_solve.add_argument("config", help="config file path or preset name")
    p_solve.add_argument("--seed", type=int, default=None,
                         help="override the solver seed")
    p_solve.set_defaults(func=_cmd_solve)

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep to a file")
    p_sweep.add_argument("config", help="config file path or preset name")
    p_sweep.add_argument("--out", required=True, help="output file path")
    p_sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sweep.add_argument("--seed", type=int, default=None,
                         help="override the solver seed")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_validate = sub.add_parser("validate", help="run physics self-checks")
    p_validate.set_defaults(func=_cmd_validate)

    p_presets = sub.add_parser("presets", help="inspect bundled scenarios")
    p_presets.add_argument("action", choices=("list",))
    p_presets.set_defaults(func=_cmd_presets)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SimulationError, FileNotFoundError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
