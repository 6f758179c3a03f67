import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resbeam.errors import ZeroEnergy
from resbeam.field import FieldGrid, GridSpec, beam_diameter, total_energy

from conftest import WAVELENGTH, disc_field, gaussian_field


class TestFieldGrid:
    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            FieldGrid(np.zeros((16, 32), dtype=complex), 1e-5, 1e-5, WAVELENGTH)

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            FieldGrid(np.zeros((24, 24), dtype=complex), 1e-5, 1e-5, WAVELENGTH)

    def test_rejects_tiny_grid(self):
        with pytest.raises(ValueError):
            FieldGrid(np.zeros((4, 4), dtype=complex), 1e-5, 1e-5, WAVELENGTH)

    def test_rejects_nonfinite_samples(self):
        samples = np.zeros((16, 16), dtype=complex)
        samples[3, 3] = np.nan
        with pytest.raises(ValueError):
            FieldGrid(samples, 1e-5, 1e-5, WAVELENGTH)

    def test_rejects_bad_pitch(self):
        with pytest.raises(ValueError):
            FieldGrid(np.zeros((16, 16), dtype=complex), 0.0, 1e-5, WAVELENGTH)

    def test_samples_are_read_only(self):
        field = gaussian_field(16, 1e-5, 5e-5)
        with pytest.raises((ValueError, RuntimeError)):
            field.samples[0, 0] = 1.0

    def test_coordinates_centered(self):
        field = gaussian_field(16, 1e-5, 5e-5)
        xx, yy = field.coordinates()
        assert xx[0, 8] == 0.0
        assert yy[8, 0] == 0.0
        assert xx[0, 0] == -8e-5

    def test_extent(self):
        field = gaussian_field(32, 1e-5, 5e-5)
        assert field.extent_x == pytest.approx(32e-5)


class TestGridSpec:
    def test_pitch(self):
        spec = GridSpec(n=256, physical_extent=8e-3)
        assert spec.pitch == pytest.approx(8e-3 / 256)

    def test_guard_band_enforced(self):
        spec = GridSpec(n=256, physical_extent=8e-3, guard_factor=2.0)
        with pytest.raises(ValueError):
            spec.validate_aperture(2.5e-3)
        spec.validate_aperture(2e-3)

    def test_guard_factor_below_one_rejected(self):
        with pytest.raises(ValueError):
            GridSpec(n=256, physical_extent=8e-3, guard_factor=0.5)


class TestTotalEnergy:
    def test_unit_impulse(self):
        samples = np.zeros((16, 16), dtype=complex)
        samples[8, 8] = 2.0
        field = FieldGrid(samples, 1e-5, 1e-5, WAVELENGTH)
        assert total_energy(field) == pytest.approx(4.0 * 1e-10)

    @given(scale=st.floats(min_value=0.1, max_value=10.0))
    @settings(max_examples=20, deadline=None)
    def test_quadratic_in_amplitude(self, scale):
        field = gaussian_field(32, 1e-5, 1e-4)
        scaled = field.with_samples(field.samples * scale)
        assert total_energy(scaled) == pytest.approx(
            scale**2 * total_energy(field), rel=1e-12
        )


class TestBeamDiameter:
    def test_uniform_disc(self):
        # Second moment of a uniform disc of radius r is r^2/4 per axis,
        # so the four-sigma diameter equals 2r.
        radius = 1e-3
        field = disc_field(512, 8e-6, radius)
        assert beam_diameter(field) == pytest.approx(2.0 * radius, rel=2e-2)

    def test_gaussian(self):
        # Amplitude exp(-rho^2/w^2) has intensity variance w^2/4 per axis.
        waist = 2e-4
        field = gaussian_field(512, 4e-6, waist)
        assert beam_diameter(field) == pytest.approx(2.0 * waist, rel=1e-3)

    def test_zero_field_raises(self):
        field = FieldGrid(np.zeros((16, 16), dtype=complex), 1e-5, 1e-5, WAVELENGTH)
        with pytest.raises(ZeroEnergy):
            beam_diameter(field)

    def test_shift_invariant_width(self):
        field = gaussian_field(256, 4e-6, 1e-4)
        rolled = field.with_samples(np.roll(field.samples, 30, axis=1))
        assert beam_diameter(rolled) == pytest.approx(
            beam_diameter(field), rel=1e-6
        )
