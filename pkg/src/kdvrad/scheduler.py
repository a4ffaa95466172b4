"""Iteration of the local theory and the certified strip-width schedule.

One local-existence step lasts t0 = c * Gamma^(-6/(3+2s)) where Gamma is the
data norm.  Repeating the step with the almost-conservation increment keeps
the squared norm within doubling provided

    (2 T / t0) * 2^(3/2) * C * sigma^(3/4) * Gamma <= 1,

and solving that with equality gives the schedule sigma(T) = c0 * T^(-4/3),
clamped at the initial strip width sigma0 for short horizons (the radius
stays constant for short times).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .gevrey import (DEFAULT_FIT_POLICY, FitPolicy, GevreyParams,
                     estimate_radius, gevrey_norm)
from .grid import SpectralField
from .solver import SolverConfig, Trajectory, evolve


@dataclass(frozen=True)
class ScheduleParams:
    sigma0: float          # initial strip half-width
    gamma0: float          # data norm at sigma0
    c_lwp: float = 0.01    # local-existence time constant
    c_acl: float = 1.0     # almost-conservation constant
    s: float = 0.0

    def __post_init__(self):
        if min(self.sigma0, self.gamma0, self.c_lwp, self.c_acl) <= 0:
            raise ValueError("all schedule constants must be strictly positive")


def local_existence_time(gamma: float, s: float = 0.0, c: float = 0.01) -> float:
    """t0 = c * gamma^(-6/(3+2s)); requires 3 + 2s > 0."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if 3.0 + 2.0 * s <= 0:
        raise ValueError("local time formula requires 3 + 2s > 0")
    return c * gamma ** (-6.0 / (3.0 + 2.0 * s))


def sigma_for_horizon(params: ScheduleParams, horizon: float) -> float:
    """Largest certified strip width for reaching time ``horizon``.

    Returns min(sigma0, c0 * horizon^(-4/3)) with
    c0 = [t0 / (2^(5/2) C Gamma)]^(4/3); at the returned value the doubling
    condition holds with equality whenever the clamp is not binding.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    t0 = local_existence_time(params.gamma0, params.s, params.c_lwp)
    c0 = (t0 / (2.0 ** 2.5 * params.c_acl * params.gamma0)) ** (4.0 / 3.0)
    return min(params.sigma0, c0 * horizon ** (-4.0 / 3.0))


def doubling_condition_value(params: ScheduleParams, horizon: float,
                             sigma: float) -> float:
    """(2T/t0) 2^(3/2) C sigma^(3/4) Gamma; equals 1 at the unclamped schedule."""
    t0 = local_existence_time(params.gamma0, params.s, params.c_lwp)
    return (2.0 * horizon / t0) * 2.0 ** 1.5 * params.c_acl \
        * sigma ** 0.75 * params.gamma0


@dataclass(frozen=True)
class ScheduleState:
    step: int
    time: float
    gamma_sq_bound: float
    within_doubling: bool


def _induction_state(params: ScheduleParams, sigma: float, t0: float,
                     k: int) -> ScheduleState:
    increment = 2.0 ** 1.5 * params.c_acl * sigma ** 0.75 * params.gamma0 ** 3
    base = params.gamma0 ** 2
    bound = base + k * increment
    return ScheduleState(
        step=k,
        time=k * t0,
        gamma_sq_bound=bound,
        within_doubling=bool(bound <= 2.0 * base * (1 + 1e-12)),
    )


def build_schedule(params: ScheduleParams, horizon: float, max_states: int = 4096):
    """Iterate the squared-norm bound over the local steps up to the horizon.

    Returns (sigma, states) for steps k = 0 .. n+1 with n = floor(T/t0); the
    increment per step is 2^(3/2) C sigma^(3/4) gamma0^3, affine in k, so for
    very long horizons the ladder is subsampled (first and last steps always
    included) rather than materialized step by step.
    """
    sigma = sigma_for_horizon(params, horizon)
    t0 = local_existence_time(params.gamma0, params.s, params.c_lwp)
    n = int(np.floor(horizon / t0))
    if n + 2 <= max_states:
        ks = range(n + 2)
    else:
        ks = sorted(set(np.linspace(0, n + 1, max_states).astype(int)))
    return sigma, [_induction_state(params, sigma, t0, k) for k in ks]


def final_induction_state(params: ScheduleParams, horizon: float) -> ScheduleState:
    """State at the last step k = n + 1 without building the ladder."""
    sigma = sigma_for_horizon(params, horizon)
    t0 = local_existence_time(params.gamma0, params.s, params.c_lwp)
    n = int(np.floor(horizon / t0))
    return _induction_state(params, sigma, t0, n + 1)


@dataclass
class ScheduleComparison:
    """Measured radius along a run against the certified schedule."""

    times: np.ndarray
    sigma_certified: np.ndarray
    sigma_hat: np.ndarray
    gamma_measured: np.ndarray
    gamma_sq_bound: np.ndarray
    within_doubling: np.ndarray
    violations: list

    @property
    def contract_holds(self) -> bool:
        return not self.violations

    def to_csv(self, path):
        header = ["t", "sigma_certified", "sigma_hat", "gamma_measured",
                  "gamma_sq_bound", "within_doubling"]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for i in range(len(self.times)):
                writer.writerow([
                    repr(float(self.times[i])),
                    repr(float(self.sigma_certified[i])),
                    repr(float(self.sigma_hat[i])),
                    repr(float(self.gamma_measured[i])),
                    repr(float(self.gamma_sq_bound[i])),
                    str(bool(self.within_doubling[i])),
                ])
        return header


def empirical_schedule(f: SpectralField, params: ScheduleParams, horizon: float,
                       config: SolverConfig = SolverConfig(),
                       radius_policy: FitPolicy = DEFAULT_FIT_POLICY,
                       trajectory: Trajectory = None) -> ScheduleComparison:
    """Run the flow to the horizon and compare measured vs certified radius.

    The certified curve is a lower bound, so sigma_hat >= sigma_certified is
    the contract at every recorded time; any violation is recorded with full
    metadata in ``violations`` rather than silently dropped.
    """
    traj = trajectory if trajectory is not None else evolve(f, horizon, config)
    t0 = local_existence_time(params.gamma0, params.s, params.c_lwp)
    times = traj.times
    cert = np.empty(len(times))
    hat = np.empty(len(times))
    gam = np.empty(len(times))
    bound = np.empty(len(times))
    doubling = np.empty(len(times), dtype=bool)
    violations = []
    for i, t in enumerate(times):
        cert[i] = params.sigma0 if t < t0 else sigma_for_horizon(params, float(t))
        est = estimate_radius(traj.snapshots[i], radius_policy)
        hat[i] = est.sigma_hat
        gam[i] = gevrey_norm(traj.snapshots[i], GevreyParams(cert[i], params.s))
        final = final_induction_state(params, max(float(t), t0))
        bound[i] = final.gamma_sq_bound
        doubling[i] = final.within_doubling
        if hat[i] < cert[i]:
            violations.append({
                "time": float(t),
                "sigma_hat": float(hat[i]),
                "sigma_certified": float(cert[i]),
                "gamma_measured": float(gam[i]),
                "params": params,
            })
    return ScheduleComparison(
        times=times,
        sigma_certified=cert,
        sigma_hat=hat,
        gamma_measured=gam,
        gamma_sq_bound=bound,
        within_doubling=doubling,
        violations=violations,
    )
