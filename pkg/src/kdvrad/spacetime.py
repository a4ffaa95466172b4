"""Space-time sampling of fields and the tapered 2D Fourier transform.

A SpacetimeField holds real samples u(t_j, x_k) on a uniform window; before
any modulation analysis the samples are multiplied by a smooth temporal
taper equal to 1 on the inner half of the window and vanishing at its ends,
then zero-padded in time (default factor 4) so that the transform samples
the same compactly supported signal on a finer tau grid.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .bumps import chi
from .errors import KdvradError
from .grid import GridSpec, SpectralField


def temporal_taper(t, t_a: float, t_b: float) -> np.ndarray:
    """Smooth window: 1 on the inner half of [t_a, t_b], 0 at the ends."""
    s = 4.0 * (np.asarray(t, dtype=float) - t_a) / (t_b - t_a) - 2.0
    return chi(s)


@dataclass
class SpacetimeField:
    """Real field sampled on [t_a, t_b] x grid."""

    grid: GridSpec
    t_a: float
    t_b: float
    values: np.ndarray = dc_field(repr=False)
    pretapered: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[1] != self.grid.num_points:
            raise ValueError("values must be (num_time_samples, num_points)")
        if self.num_time_samples < 2 or self.t_b <= self.t_a:
            raise ValueError("need at least two samples on a positive time window")

    @property
    def num_time_samples(self) -> int:
        return self.values.shape[0]

    @property
    def dt(self) -> float:
        return (self.t_b - self.t_a) / (self.num_time_samples - 1)

    @property
    def times(self) -> np.ndarray:
        return self.t_a + self.dt * np.arange(self.num_time_samples)

    def tapered_values(self) -> np.ndarray:
        if self.pretapered:
            return self.values
        return self.values * temporal_taper(self.times, self.t_a, self.t_b)[:, None]

    def l2_norm(self) -> float:
        """Space-time L2 norm of the tapered samples (dt dx weights)."""
        w = self.tapered_values()
        return float(np.sqrt(np.sum(w * w) * self.dt * self.grid.dx))


@dataclass
class SpacetimeSpectrum:
    """2D transform values indexed (tau_j, xi_k), both in FFT order."""

    values: np.ndarray = dc_field(repr=False)
    tau: np.ndarray = dc_field(repr=False)
    xi: np.ndarray = dc_field(repr=False)
    dtau: float
    dxi: float
    field: "SpacetimeField" = dc_field(repr=False)

    @property
    def weight(self) -> float:
        """Cell weight in Parseval sums: dtau*dxi/(2 pi)^2."""
        return self.dtau * self.dxi / (2.0 * np.pi) ** 2

    def modulation(self) -> np.ndarray:
        """lambda = tau - xi^3 on the (tau, xi) grid."""
        return self.tau[:, None] - self.xi[None, :] ** 3

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.weight))


def spacetime_transform(field: SpacetimeField, pad: int = 4) -> SpacetimeSpectrum:
    """Continuous-normalized 2D transform of the tapered, zero-padded samples.

    The tau spacing is 2 pi / (pad * (t_b - t_a) * nt/(nt-1)); padding only
    refines the sampling of the transform of the compactly supported signal.
    """
    if field.num_time_samples < 8:
        raise KdvradError("need at least 8 time samples for modulation analysis")
    if pad < 1:
        raise ValueError("pad must be >= 1")
    g = field.grid
    w = field.tapered_values()
    nt = field.num_time_samples
    nt_pad = pad * nt
    padded = np.zeros((nt_pad, g.num_points))
    padded[:nt] = w
    dt = field.dt
    tau = 2.0 * np.pi * np.fft.fftfreq(nt_pad, d=dt)
    xi = g.xi
    raw = np.fft.fft2(padded)
    phase_t = np.exp(-1j * tau * field.t_a)[:, None]
    phase_x = g._phase()[None, :]
    values = dt * g.dx * phase_t * phase_x * raw
    return SpacetimeSpectrum(
        values=values,
        tau=tau,
        xi=xi,
        dtau=float(tau[1] - tau[0]),
        dxi=g.dxi,
        field=field,
    )


def inverse_spacetime_transform(spec: SpacetimeSpectrum) -> SpacetimeField:
    """Invert the 2D transform and crop back to the original window."""
    f = spec.field
    g = f.grid
    nt_pad = spec.values.shape[0]
    dt = f.dt
    phase_t = np.exp(1j * spec.tau * f.t_a)[:, None]
    phase_x = g._phase()[None, :]
    raw = spec.values * phase_t * phase_x / (dt * g.dx)
    vals = np.fft.ifft2(raw)[:f.num_time_samples]
    return SpacetimeField(g, f.t_a, f.t_b, np.real(vals), pretapered=True)


def airy_spacetime(f: SpectralField, t_a: float, t_b: float,
                   num_time_samples: int = 160) -> SpacetimeField:
    """Sample the free (Airy) evolution of f on a uniform time window."""
    g = f.grid
    times = np.linspace(t_a, t_b, num_time_samples)
    theta = np.mod(times[:, None] * g.xi[None, :] ** 3, 2.0 * np.pi)
    coeffs = f.coeffs[None, :] * np.exp(1j * theta)
    vals = np.real(np.fft.ifft(coeffs * g._phase()[None, :], axis=1) / g.dx)
    return SpacetimeField(g, t_a, t_b, vals)


def sample_flow(snapshots, times, grid: GridSpec) -> SpacetimeField:
    """Assemble a SpacetimeField from uniformly spaced SpectralField snapshots."""
    times = np.asarray(times, dtype=float)
    if len(times) != len(snapshots):
        raise ValueError("times and snapshots differ in length")
    steps = np.diff(times)
    if steps.size and not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise ValueError("snapshots are not uniformly spaced in time")
    vals = np.stack([s.values() for s in snapshots])
    return SpacetimeField(grid, float(times[0]), float(times[-1]), vals)
