import numpy as np
import pytest

from kdvrad.grid import GridSpec, forward_transform


@pytest.fixture(scope="session")
def default_grid():
    return GridSpec(1024, 40.0)


@pytest.fixture(scope="session")
def small_grid():
    return GridSpec(256, 40.0)


def random_band_field(grid, rng, max_mode=None, amplitude=1.0):
    """Random real field supported on low modes with a localized envelope."""
    n = grid.num_points
    max_mode = max_mode or n // 8
    coeffs = np.zeros(n, dtype=complex)
    mags = amplitude * rng.standard_normal(max_mode)
    phases = rng.uniform(0, 2 * np.pi, max_mode)
    for m in range(1, max_mode + 1):
        c = mags[m - 1] * np.exp(1j * phases[m - 1])
        coeffs[m] = c
        coeffs[-m] = np.conj(c)
    vals = np.real(np.fft.ifft(coeffs))
    window = np.exp(-((grid.x) / (grid.half_length / 3)) ** 2)
    return forward_transform(vals * window, grid)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
