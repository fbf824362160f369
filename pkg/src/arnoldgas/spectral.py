"""Fourier components of the phase-space density and their growth.

For N particles in the unit square the density mode at wavevector
k = 2*pi*(m1, m2) is

    n_k(t) = sum_i exp(-i k . X_i(t)),      ntilde_k = n_k / N.

A one-particle perturbation of size eps shifts the modes by Delta ntilde_k.
Two instruments are provided: the exact difference of a twin (perturbed)
simulation against the reference, and the tangent-linear estimate

    Delta ntilde_k(t) ~= (-i/N) sum_i exp(-i k . X_i(t)) (k . dX_i(t)).

The per-collision growth exponent of |Delta ntilde_k| is estimated either by
a least-squares fit of ln|Delta ntilde_k(t)| or by the two-term closed-form
estimator whose state-independent part equals ln sqrt|kp*km| ~= 0.190424 for
the default collision matrix (often quoted rounded as ln 1.2 ~= 0.18).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .gas import Trajectory
from .maps import CollisionModel, PhasePoint

TWO_PI = 2.0 * math.pi


class ModeIndex(NamedTuple):
    """Integer mode (m1, m2); the wavevector is 2*pi*(m1, m2) on the unit torus."""

    m1: int
    m2: int

    @property
    def is_zero(self) -> bool:
        return self.m1 == 0 and self.m2 == 0


def enumerate_modes(max_order: int) -> list[ModeIndex]:
    """All nonzero modes with max(|m1|, |m2|) <= max_order."""
    return [
        ModeIndex(m1, m2)
        for m1 in range(-max_order, max_order + 1)
        for m2 in range(-max_order, max_order + 1)
        if (m1, m2) != (0, 0)
    ]


def _as_points_array(points) -> np.ndarray:
    if isinstance(points, np.ndarray):
        return points
    return np.array([[q.x, q.p] for q in points]) if points and isinstance(points[0], PhasePoint) else np.asarray(points, dtype=float)


def fourier_component(points, mode: ModeIndex) -> complex:
    """n_k = sum_i exp(-2*pi*i (m1 x_i + m2 p_i)); divide by N for ntilde_k."""
    pts = _as_points_array(points)
    if pts.size == 0:
        raise ValueError("need at least one particle")
    phase = TWO_PI * (pts @ np.array([mode.m1, mode.m2], dtype=float))
    return complex(np.exp(-1j * phase).sum())


@dataclass
class SpectrumSeries:
    """Time series of one mode's normalized component and its perturbations."""

    mode: ModeIndex
    values: np.ndarray  # (steps+1,) complex ntilde_k(t) of the reference
    deltas_linear: np.ndarray  # (steps+1,) complex tangent-linear estimate
    deltas_twin: np.ndarray | None = None  # exact twin difference when available


def delta_series(reference: Trajectory, mode: ModeIndex,
                 perturbed: Trajectory | None = None) -> SpectrumSeries:
    """Per-step mode perturbation, tangent-linear and (when possible) exact.

    The exact route uses `perturbed` if given, else the twin embedded in the
    reference run.  A separate perturbed trajectory must share particle
    count, step count, and pairing schedule.
    """
    if reference.points_history is None:
        raise ValueError("trajectory was run without record_points")
    if mode.is_zero:
        raise ValueError("the zero mode is the conserved normalization; pick a nonzero mode")

    twin_pts = None
    if perturbed is not None:
        if (perturbed.n_particles != reference.n_particles
                or perturbed.steps != reference.steps):
            raise ValueError("reference and perturbed trajectories do not match")
        if perturbed.pairs_history and reference.pairs_history:
            for pa, pb in zip(reference.pairs_history, perturbed.pairs_history):
                if not np.array_equal(pa, pb):
                    raise ValueError("trajectories used different pairing schedules")
        if perturbed.points_history is None:
            raise ValueError("perturbed trajectory was run without record_points")
        twin_pts = perturbed.points_history
    elif reference.twin_points_history is not None:
        twin_pts = reference.twin_points_history

    kvec = TWO_PI * np.array([mode.m1, mode.m2], dtype=float)
    n = reference.n_particles
    phases = reference.points_history @ kvec  # (steps+1, N)
    waves = np.exp(-1j * phases)
    values = waves.sum(axis=1) / n
    k_dot_d = reference.tangents_history @ kvec
    deltas_linear = (-1j / n) * (waves * k_dot_d).sum(axis=1)

    deltas_twin = None
    if twin_pts is not None:
        twin_values = np.exp(-1j * (twin_pts @ kvec)).sum(axis=1) / n
        deltas_twin = twin_values - values

    return SpectrumSeries(mode=mode, values=values,
                          deltas_linear=deltas_linear, deltas_twin=deltas_twin)


@dataclass(frozen=True)
class ExponentEstimate:
    """Two-term growth exponent: lam = term1 + term2.

    term1 is the state-dependent phase-sum term at time t; term2 is the
    state-independent ln sqrt|kp*km|.  `degenerate` flags an exactly zero
    phase sum (the log is singular there).
    """

    lam: float
    term1: float
    term2: float
    degenerate: bool = False


def exponent_term2(model: CollisionModel) -> float:
    """ln sqrt|kp*km|, which is 0.190424... for the default matrix."""
    return 0.5 * math.log(model.dilation_product)


def exponent_estimate(trajectory: Trajectory, mode: ModeIndex,
                      model: CollisionModel, t: int) -> ExponentEstimate:
    """Evaluate the two-term exponent at step t.

    term1 = (1/t) ln| sum_{i affected} exp(-i k.X_i(t)) (k.xi_plus) / N |;
    the sum runs over affected particles only, since unaffected ones carry
    zero displacement and cannot contribute to the response.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if mode.is_zero:
        raise ValueError("mode must be nonzero")
    if trajectory.points_history is None or trajectory.affected_history is None:
        raise ValueError("trajectory was run without record_points")

    kvec = TWO_PI * np.array([mode.m1, mode.m2], dtype=float)
    mask = trajectory.affected_history[t]
    pts = trajectory.points_history[t][mask]
    k_dot_xi = float(kvec @ model.xi_plus)
    phase_sum = np.exp(-1j * (pts @ kvec)).sum() * k_dot_xi / trajectory.n_particles
    term2 = exponent_term2(model)
    if phase_sum == 0:
        return ExponentEstimate(lam=math.nan, term1=math.nan, term2=term2, degenerate=True)
    term1 = math.log(abs(phase_sum)) / t
    return ExponentEstimate(lam=term1 + term2, term1=term1, term2=term2)


class GrowthFit(NamedTuple):
    slope: float
    intercept: float
    r2: float


def fit_growth(deltas: Sequence[complex] | np.ndarray,
               window: tuple[int, int]) -> GrowthFit:
    """Least-squares line through (t, ln|delta_t|) for t in [t_a, t_b].

    Refuses windows shorter than 3 steps or containing zeros of |delta|.
    """
    t_a, t_b = window
    if t_b - t_a < 3:
        raise ValueError("fit window must span at least 3 steps")
    mags = np.abs(np.asarray(deltas)[t_a : t_b + 1])
    if np.any(mags == 0):
        raise ValueError("fit window contains zeros of |delta|; shrink the window")
    ts = np.arange(t_a, t_b + 1, dtype=float)
    ys = np.log(mags)
    slope, intercept = np.polyfit(ts, ys, 1)
    resid = ys - (slope * ts + intercept)
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return GrowthFit(slope=float(slope), intercept=float(intercept), r2=r2)


def default_fit_window(trajectory: Trajectory) -> tuple[int, int]:
    """[2, min(saturation step, log2 N)]: the pre-saturation exponential regime."""
    log2n = int(math.floor(math.log2(trajectory.n_particles)))
    t_sat = trajectory.saturation_step
    upper = min(trajectory.steps, log2n)
    if not math.isinf(t_sat):
        upper = min(upper, int(t_sat))
    upper = max(upper, min(5, trajectory.steps))
    return (2, upper)
