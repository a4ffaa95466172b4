"""Gevrey norms, exponential smoothing and Fourier-side analyticity tracing.

The weighted norm

    ||f||_{sigma,s} = ( sum_k exp(2 sigma |xi_k|) (1 + xi_k^2)^s |f_hat(xi_k)|^2 w )^(1/2)

reduces to the L2 norm at sigma = s = 0 and to the Sobolev H^s norm at
sigma = 0.  A strictly positive sigma certifies a holomorphic extension to
the strip of half-width sigma, which is what ``estimate_radius`` traces from
the exponential decay rate of the coefficient magnitudes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientSpectralRangeError, SpectralOverflowError
from .grid import GridSpec, SpectralField

#: log-magnitude ceiling; exp of anything above this is treated as overflow
_LOG_LIMIT = 690.0


@dataclass(frozen=True)
class GevreyParams:
    """Strip half-width sigma >= 0 and Sobolev index s."""

    sigma: float
    s: float = 0.0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")


def _log_weighted_magnitudes(field: SpectralField, sigma: float, s: float) -> np.ndarray:
    xi = field.grid.xi
    mag = np.abs(field.coeffs)
    with np.errstate(divide="ignore"):
        logmag = np.where(mag > 0, np.log(np.where(mag > 0, mag, 1.0)), -np.inf)
    return sigma * np.abs(xi) + 0.5 * s * np.log1p(xi * xi) + logmag


def _certifiable_sigma(field: SpectralField, s: float, budget: float = 0.5 * _LOG_LIMIT) -> float:
    xi = np.abs(field.grid.xi)
    rest = _log_weighted_magnitudes(field, 0.0, s)
    ok = (xi > 0) & np.isfinite(rest)
    if not np.any(ok):
        return np.inf
    caps = (budget - rest[ok]) / xi[ok]
    return float(max(0.0, np.min(caps)))


def gevrey_norm(field: SpectralField, params: GevreyParams) -> float:
    """Weighted l2 norm of the coefficients with continuous normalization.

    Raises SpectralOverflowError (carrying the largest admissible sigma for
    this field) when the exponential weight would overflow.
    """
    e = _log_weighted_magnitudes(field, params.sigma, params.s)
    finite = np.isfinite(e)
    if np.any(2.0 * e[finite] > _LOG_LIMIT):
        raise SpectralOverflowError(
            f"exp({params.sigma}*|xi|) weight overflows for this field; "
            f"certifiable sigma = {_certifiable_sigma(field, params.s):.6g}",
            certifiable_sigma=_certifiable_sigma(field, params.s),
        )
    total = np.sum(np.exp(2.0 * e[finite]))
    return float(np.sqrt(total * field.grid.spectral_weight))


def hs_norm(field: SpectralField, s: float = 0.0) -> float:
    return gevrey_norm(field, GevreyParams(0.0, s))


def smooth(field: SpectralField, sigma: float) -> SpectralField:
    """Apply the multiplier exp(sigma*|xi|) (sigma may be negative).

    Computed per bin in log space so that zero coefficients stay exactly
    zero and overflow is detected instead of producing inf.
    """
    if sigma == 0.0:
        return field.copy()
    xi = np.abs(field.grid.xi)
    mag = np.abs(field.coeffs)
    if sigma > 0:
        with np.errstate(divide="ignore"):
            e = np.where(mag > 0, sigma * xi + np.log(np.where(mag > 0, mag, 1.0)), -np.inf)
        if np.any(e > _LOG_LIMIT):
            cert = _certifiable_sigma(field, 0.0, budget=_LOG_LIMIT)
            raise SpectralOverflowError(
                f"exp({sigma}*|xi|) overflows on this field; certifiable sigma = {cert:.6g}",
                certifiable_sigma=cert,
            )
    return SpectralField(field.grid, field.coeffs * np.exp(sigma * xi))


@dataclass(frozen=True)
class FitPolicy:
    """Window-selection policy for the radius estimator.

    Bins with |coeff| in [floor_rel, ceil_rel] * max|coeff| are usable; the
    fit uses the upper ``upper_fraction`` of that band in |xi|, needs at
    least ``min_bins`` bins, and flags superexponential decay when the local
    slope steepens by more than ``steepening_threshold`` across the window.
    """

    floor_rel: float = 1e-13
    ceil_rel: float = 1e-2
    upper_fraction: float = 0.6
    min_bins: int = 8
    steepening_threshold: float = 0.25


@dataclass(frozen=True)
class RadiusEstimate:
    sigma_hat: float
    fit_window: tuple
    residual: float
    floor_hit: bool
    superexponential: bool
    num_bins: int


DEFAULT_FIT_POLICY = FitPolicy()


def estimate_radius(field: SpectralField, policy: FitPolicy = DEFAULT_FIT_POLICY) -> RadiusEstimate:
    """Least-squares decay rate of log|coeff| against |xi|.

    sigma_hat = -slope over the policy window, after averaging the +-k
    coefficient pairs.  Entire-function (faster than exponential) decay is
    flagged instead of reported as a single rate.
    """
    n = field.grid.num_points
    c = field.coeffs
    peak = float(np.max(np.abs(c)))
    if peak == 0.0:
        raise InsufficientSpectralRangeError("field is identically zero")
    # average +k and -k magnitudes; drop the 0 and Nyquist bins
    mag = 0.5 * (np.abs(c[1:n // 2]) + np.abs(c[-1:-(n // 2):-1]))
    xi = np.abs(field.grid.xi[1:n // 2])
    floor = policy.floor_rel * peak
    usable = (mag >= floor) & (mag <= policy.ceil_rel * peak)
    floor_hit = bool(np.any(mag < floor))
    if np.count_nonzero(usable) < policy.min_bins:
        raise InsufficientSpectralRangeError(
            f"insufficient spectral range: {np.count_nonzero(usable)} usable bins "
            f"< {policy.min_bins}"
        )
    idx = np.flatnonzero(usable)
    xi_lo, xi_hi = xi[idx[0]], xi[idx[-1]]
    cut = xi_hi - policy.upper_fraction * (xi_hi - xi_lo)
    sel = usable & (xi >= cut)
    if np.count_nonzero(sel) < policy.min_bins:
        sel = usable
    xs = xi[sel]
    ys = np.log(mag[sel])
    a = np.vstack([xs, np.ones_like(xs)]).T
    (slope, intercept), res, *_ = np.linalg.lstsq(a, ys, rcond=None)
    fitted = a @ np.array([slope, intercept])
    rms = float(np.sqrt(np.mean((ys - fitted) ** 2)))

    # superexponential detector: smoothed local slopes steepening monotonically
    local = np.diff(ys) / np.diff(xs)
    if local.size >= 3:
        kernel = np.ones(min(3, local.size)) / min(3, local.size)
        sm = np.convolve(local, kernel, mode="valid")
    else:
        sm = local
    steepening = False
    if sm.size >= 2 and sm[0] < 0:
        span = np.max(np.abs(sm))
        monotone = bool(np.all(np.diff(sm) <= 0.02 * span))
        steepening = monotone and sm[-1] < (1.0 + policy.steepening_threshold) * sm[0]
    sigma_hat = float(-sm[-1]) if steepening else float(-slope)
    return RadiusEstimate(
        sigma_hat=sigma_hat,
        fit_window=(float(xs[0]), float(xs[-1])),
        residual=rms,
        floor_hit=floor_hit,
        superexponential=steepening,
        num_bins=int(xs.size),
    )


def rescale(field: SpectralField, lam: float, max_half_length: float = 1e4) -> SpectralField:
    """KdV-scaling map on initial data: f(x) -> lam^2 f(lam x).

    The scaled field lives on a grid with half_length / lam; the sample and
    coefficient relations are exact (coeffs scale by lam on the new grid).
    """
    if not 0.0 < lam <= 1.0:
        raise ValueError("lam must lie in (0, 1]")
    new_half = field.grid.half_length / lam
    if new_half > max_half_length:
        raise ValueError(
            f"rescaled half_length {new_half:.3g} exceeds the configured maximum "
            f"{max_half_length:.3g}"
        )
    if lam == 1.0:
        return field.copy()
    new_grid = GridSpec(field.grid.num_points, new_half)
    return SpectralField(new_grid, lam * field.coeffs)
