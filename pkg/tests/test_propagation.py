import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resbeam.errors import ApertureUnresolved, GridTooLarge
from resbeam.field import FieldGrid, beam_diameter, total_energy
from resbeam.propagation import (
    INFINITE,
    ApertureSpec,
    angular_spectrum_propagate,
    apply_element,
    element_mask,
    rayleigh_sommerfeld_oracle,
)

from conftest import WAVELENGTH, gaussian_field


class TestAngularSpectrum:
    def test_zero_distance_is_identity(self):
        field = gaussian_field(64, 1e-5, 1e-4)
        out = angular_spectrum_propagate(field, 0.0)
        np.testing.assert_allclose(out.samples, field.samples)

    def test_energy_conservation(self):
        # A beam far from the grid edge keeps its energy to 1e-6 relative.
        field = gaussian_field(256, 1e-5, 2e-4)
        out = angular_spectrum_propagate(field, 0.05)
        assert total_energy(out) == pytest.approx(
            total_energy(field), rel=1e-6
        )

    def test_forward_backward_identity(self):
        field = gaussian_field(256, 1e-5, 2e-4)
        out = angular_spectrum_propagate(
            angular_spectrum_propagate(field, 0.05), -0.05
        )
        err = np.linalg.norm(out.samples - field.samples) / np.linalg.norm(
            field.samples
        )
        assert err < 1e-8

    def test_gaussian_divergence_law(self):
        # Width after distance z follows w(z) = w0 sqrt(1 + (z/zR)^2).
        waist = 0.5e-3
        field = gaussian_field(512, 30e-6, waist)
        z = 1.0
        rayleigh = math.pi * waist**2 / WAVELENGTH
        expected = 2.0 * waist * math.sqrt(1.0 + (z / rayleigh) ** 2)
        measured = beam_diameter(angular_spectrum_propagate(field, z))
        assert measured == pytest.approx(expected, rel=5e-3)

    def test_matches_diffraction_sum_oracle(self):
        # Frozen geometry where the direct Rayleigh-Sommerfeld sum is well
        # sampled; comparison over the central half avoids FFT wrap-around.
        field = gaussian_field(32, 25e-6, 0.12e-3)
        fast = angular_spectrum_propagate(field, 0.06)
        slow = rayleigh_sommerfeld_oracle(field, 0.06)
        win = slice(8, 24)
        err = np.linalg.norm(
            fast.samples[win, win] - slow.samples[win, win]
        ) / np.linalg.norm(slow.samples[win, win])
        assert err < 1e-3

    @given(z=st.floats(min_value=1e-3, max_value=0.02))
    @settings(max_examples=10, deadline=None)
    def test_composition(self, z):
        # Propagating z then z again equals propagating 2z directly. The
        # distance range keeps the anti-aliasing band limit clear of the
        # beam's spectral support, where composition holds exactly.
        field = gaussian_field(128, 1e-5, 1.5e-4)
        two_step = angular_spectrum_propagate(
            angular_spectrum_propagate(field, z), z
        )
        one_step = angular_spectrum_propagate(field, 2 * z)
        err = np.linalg.norm(
            two_step.samples - one_step.samples
        ) / np.linalg.norm(one_step.samples)
        assert err < 1e-7


class TestOracle:
    def test_rejects_large_grids(self):
        field = gaussian_field(128, 25e-6, 0.12e-3)
        with pytest.raises(GridTooLarge):
            rayleigh_sommerfeld_oracle(field, 0.06)

    def test_rejects_nonpositive_distance(self):
        field = gaussian_field(32, 25e-6, 0.12e-3)
        with pytest.raises(ValueError):
            rayleigh_sommerfeld_oracle(field, 0.0)


class TestElements:
    def test_flat_stop_is_binary(self):
        field = gaussian_field(256, 4e-5, 2e-3)
        mask = element_mask(field, ApertureSpec(radius=2.5e-3))
        assert set(np.unique(np.abs(mask))) <= {0.0, 1.0}

    def test_stop_clips_outside_radius(self):
        field = gaussian_field(256, 4e-5, 4e-3)
        out = apply_element(field, ApertureSpec(radius=2.5e-3))
        xx, yy = field.coordinates()
        outside = xx**2 + yy**2 > (2.5e-3) ** 2
        assert np.all(out.samples[outside] == 0.0)
        inside = xx**2 + yy**2 <= (2.4e-3) ** 2
        np.testing.assert_allclose(out.samples[inside], field.samples[inside])

    def test_lens_phase_only_inside(self):
        field = gaussian_field(256, 4e-5, 4e-3)
        lens = ApertureSpec(radius=2.5e-3, focal_length=50e-3)
        out = apply_element(field, lens)
        xx, yy = field.coordinates()
        inside = xx**2 + yy**2 <= (2.4e-3) ** 2
        np.testing.assert_allclose(
            np.abs(out.samples[inside]), np.abs(field.samples[inside])
        )

    def test_lens_focuses_collimated_beam(self):
        # A collimated beam through an ideal lens contracts near the focus.
        n, pitch = 1024, 8e-6
        field = gaussian_field(n, pitch, 1.5e-3)
        lens = ApertureSpec(radius=2.5e-3, focal_length=50e-3)
        focused = angular_spectrum_propagate(apply_element(field, lens), 50e-3)
        assert beam_diameter(focused) < 0.1 * beam_diameter(field)

    def test_obstruction_removes_half_plane_strip(self):
        field = gaussian_field(256, 4e-5, 4e-3)
        element = ApertureSpec(radius=2.5e-3, obstruction_depth=1e-3)
        out = apply_element(field, element)
        xx, yy = field.coordinates()
        blocked = (xx > 2.5e-3 - 1e-3) & (xx**2 + yy**2 <= (2.5e-3) ** 2)
        assert np.all(out.samples[blocked] == 0.0)
        kept = (xx < 2.5e-3 - 1.1e-3) & (xx**2 + yy**2 <= (2.4e-3) ** 2)
        np.testing.assert_allclose(out.samples[kept], field.samples[kept])

    def test_obstruction_axis_sign_flips_side(self):
        field = gaussian_field(256, 4e-5, 4e-3)
        minus = element_mask(
            field,
            ApertureSpec(
                radius=2.5e-3, obstruction_depth=1e-3, obstruction_axis_sign="-x"
            ),
        )
        xx, yy = field.coordinates()
        blocked = (xx < -(2.5e-3 - 1e-3)) & (xx**2 + yy**2 <= (2.5e-3) ** 2)
        kept = (xx > -(2.5e-3 - 1.1e-3)) & (xx**2 + yy**2 <= (2.4e-3) ** 2)
        assert np.all(minus[blocked] == 0.0)
        assert np.all(minus[kept] == 1.0)

    def test_unresolved_aperture_raises(self):
        field = gaussian_field(16, 1e-3, 4e-3)
        with pytest.raises(ApertureUnresolved):
            element_mask(field, ApertureSpec(radius=1e-3))

    def test_energy_never_increases(self):
        field = gaussian_field(256, 4e-5, 4e-3)
        for element in (
            ApertureSpec(radius=2.5e-3),
            ApertureSpec(radius=2.5e-3, focal_length=50e-3),
            ApertureSpec(radius=2.5e-3, obstruction_depth=2e-3),
        ):
            out = apply_element(field, element)
            assert total_energy(out) <= total_energy(field) * (1 + 1e-12)
