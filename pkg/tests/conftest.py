import numpy as np
import pytest

from resbeam.field import FieldGrid

WAVELENGTH = 1064e-9


def gaussian_field(n: int, pitch: float, waist: float,
                   wavelength: float = WAVELENGTH) -> FieldGrid:
    coords = (np.arange(n) - n // 2) * pitch
    xx, yy = np.meshgrid(coords, coords)
    samples = np.exp(-(xx**2 + yy**2) / waist**2).astype(np.complex128)
    return FieldGrid(samples, pitch, pitch, wavelength)


def disc_field(n: int, pitch: float, radius: float,
               wavelength: float = WAVELENGTH) -> FieldGrid:
    coords = (np.arange(n) - n // 2) * pitch
    xx, yy = np.meshgrid(coords, coords)
    samples = (xx**2 + yy**2 <= radius**2).astype(np.complex128)
    return FieldGrid(samples, pitch, pitch, wavelength)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
