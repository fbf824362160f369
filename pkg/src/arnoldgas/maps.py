"""Collision arithmetic for a gas whose pair interactions are cat maps.

A two-body collision conserves the pair's sum (center of mass, mod 1 on the
unit 2-torus) and applies a hyperbolic toral automorphism M to the relative
coordinate:

    x0' + x1' = x0 + x1,      x0' - x1' = M (x0 - x1)

Equivalently each outgoing state is a linear combination of both incoming
states through the direct matrix K+ = (I + M)/2 and the switch matrix
K- = (I - M)/2.  The default M is [[1, 1], [1, 2]].

Displacements (tangent vectors) obey the same linear relations without any
additive constants and without mod-1 reduction: the tangent space is linear,
so tangent propagation is exact for this piecewise-linear dynamics.

All functions here are pure and never mutate their array arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

Role = Literal["direct", "switch"]

DEFAULT_CAT_MATRIX = ((1, 1), (1, 2))


def _wrap_unit(values: np.ndarray) -> np.ndarray:
    """Reduce componentwise into [0, 1).

    numpy's ``%`` can return exactly 1.0 for tiny negative inputs, which
    would violate the half-open interval; clamp those back to 0.
    """
    out = np.asarray(values, dtype=float) % 1.0
    return np.where(out >= 1.0, out - 1.0, out)


@dataclass(frozen=True)
class PhasePoint:
    """A particle's (position, momentum) on the unit 2-torus."""

    x: float
    p: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.p)):
            raise ValueError("phase point components must be finite")
        if not (0.0 <= self.x < 1.0 and 0.0 <= self.p < 1.0):
            raise ValueError(f"phase point ({self.x}, {self.p}) outside [0, 1)^2")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.p])

    @staticmethod
    def from_array(values: np.ndarray) -> "PhasePoint":
        wrapped = _wrap_unit(values)
        return PhasePoint(float(wrapped[0]), float(wrapped[1]))


@dataclass(frozen=True)
class TangentVector:
    """Unbounded displacement (dx, dp) in phase space; never wrapped."""

    dx: float
    dp: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.dx) and math.isfinite(self.dp)):
            raise ValueError("tangent components must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.dx, self.dp])

    @property
    def norm(self) -> float:
        return math.hypot(self.dx, self.dp)


@dataclass(frozen=True)
class CollisionModel:
    """A hyperbolic unimodular collision matrix with its spectral data.

    Fields:
      m             2x2 integer matrix, det = 1, trace > 2
      k_plus        (I + M)/2, the direct matrix
      k_minus       (I - M)/2, the switch matrix
      lambda_plus   larger eigenvalue of M
      lambda_minus  smaller eigenvalue of M (= 1/lambda_plus)
      xi_plus       unit eigenvector for lambda_plus, first component > 0
      xi_minus      unit eigenvector for lambda_minus, first component > 0
      kp            eigenvalue of K+ on xi_plus, (1 + lambda_plus)/2
      km            eigenvalue of K- on xi_plus, (1 - lambda_plus)/2
    """

    m: np.ndarray
    k_plus: np.ndarray
    k_minus: np.ndarray
    lambda_plus: float
    lambda_minus: float
    xi_plus: np.ndarray
    xi_minus: np.ndarray
    kp: float
    km: float

    @property
    def dilation_product(self) -> float:
        """|kp * km|, the squared per-two-collision mean dilation."""
        return abs(self.kp * self.km)

    @property
    def gas_growth_rate(self) -> float:
        """Per-stage whole-gas dilation factor sqrt(kp^2 + km^2)."""
        return math.sqrt(self.kp**2 + self.km**2)


def _unit_eigenvector(m: np.ndarray, eigenvalue: float) -> np.ndarray:
    # (M - lam I) v = 0; pick the nonzero row construction.
    if m[0, 1] != 0:
        v = np.array([m[0, 1], eigenvalue - m[0, 0]])
    else:
        v = np.array([eigenvalue - m[1, 1], m[1, 0]])
    v = v / np.linalg.norm(v)
    if v[0] < 0 or (v[0] == 0 and v[1] < 0):
        v = -v
    return v


def spectral_decompose(m) -> CollisionModel:
    """Build a CollisionModel from a 2x2 integer matrix.

    Eigenvalues come from the closed-form quadratic in the trace (det = 1
    forces lambda^2 - tr*lambda + 1 = 0), not an iterative solver, so the
    default matrix reproduces (3 +- sqrt(5))/2 to full precision.

    Raises ValueError naming the violated condition for non-integer,
    non-unimodular, or non-hyperbolic input.
    """
    m = np.asarray(m)
    if m.shape != (2, 2):
        raise ValueError(f"collision matrix must be 2x2, got shape {m.shape}")
    if not np.all(m == np.round(m)):
        raise ValueError("collision matrix must have integer entries")
    m = m.astype(np.int64)
    det = int(m[0, 0]) * int(m[1, 1]) - int(m[0, 1]) * int(m[1, 0])
    if det != 1:
        raise ValueError(f"collision matrix must be unimodular: det = {det}, expected 1")
    trace = int(m[0, 0]) + int(m[1, 1])
    if trace <= 2:
        raise ValueError(f"collision matrix must be hyperbolic: trace = {trace}, need trace > 2")

    root = math.sqrt(trace * trace - 4)
    lambda_plus = (trace + root) / 2.0
    lambda_minus = (trace - root) / 2.0

    mf = m.astype(float)
    identity = np.eye(2)
    k_plus = (identity + mf) / 2.0
    k_minus = (identity - mf) / 2.0

    xi_plus = _unit_eigenvector(mf, lambda_plus)
    xi_minus = _unit_eigenvector(mf, lambda_minus)

    kp = (1.0 + lambda_plus) / 2.0
    km = (1.0 - lambda_plus) / 2.0

    for arr in (m, k_plus, k_minus, xi_plus, xi_minus):
        arr.setflags(write=False)

    return CollisionModel(
        m=m,
        k_plus=k_plus,
        k_minus=k_minus,
        lambda_plus=lambda_plus,
        lambda_minus=lambda_minus,
        xi_plus=xi_plus,
        xi_minus=xi_minus,
        kp=kp,
        km=km,
    )


_DEFAULT_MODEL: CollisionModel | None = None


def default_model() -> CollisionModel:
    """The model for the standard cat matrix [[1, 1], [1, 2]]."""
    global _DEFAULT_MODEL
    if _DEFAULT_MODEL is None:
        _DEFAULT_MODEL = spectral_decompose(DEFAULT_CAT_MATRIX)
    return _DEFAULT_MODEL


def cat_apply(model: CollisionModel, point: PhasePoint) -> PhasePoint:
    """One iteration of the toral automorphism: (M x) mod 1."""
    return PhasePoint.from_array(model.m.astype(float) @ point.as_array())


def collide(model: CollisionModel, x0: PhasePoint, x1: PhasePoint) -> tuple[PhasePoint, PhasePoint]:
    """Pair collision: x0' = K+ x0 + K- x1, x1' = K- x0 + K+ x1, mod 1."""
    a, b = x0.as_array(), x1.as_array()
    out0 = model.k_plus @ a + model.k_minus @ b
    out1 = model.k_minus @ a + model.k_plus @ b
    return PhasePoint.from_array(out0), PhasePoint.from_array(out1)


def collide_arrays(
    model: CollisionModel, x0: np.ndarray, x1: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized collide over (n, 2) arrays of phase points."""
    out0 = x0 @ model.k_plus.T + x1 @ model.k_minus.T
    out1 = x0 @ model.k_minus.T + x1 @ model.k_plus.T
    return _wrap_unit(out0), _wrap_unit(out1)


def _role_matrix(model: CollisionModel, role: Role) -> np.ndarray:
    if role == "direct":
        return model.k_plus
    if role == "switch":
        return model.k_minus
    raise ValueError(f"role must be 'direct' or 'switch', got {role!r}")


def propagate_tangent(model: CollisionModel, d_in: TangentVector, role: Role) -> TangentVector:
    """Apply the direct (K+) or switch (K-) factor to a displacement.

    No mod reduction: tangent space is linear.
    """
    out = _role_matrix(model, role) @ d_in.as_array()
    return TangentVector(float(out[0]), float(out[1]))


def propagate_tangent_arrays(model: CollisionModel, d_in: np.ndarray, role: Role) -> np.ndarray:
    """Vectorized propagate_tangent over (n, 2) arrays."""
    return d_in @ _role_matrix(model, role).T


def torus_diff(a: PhasePoint, b: PhasePoint) -> TangentVector:
    """Minimal-image difference a - b, componentwise in [-1/2, 1/2)."""
    d = torus_diff_arrays(a.as_array(), b.as_array())
    return TangentVector(float(d[0]), float(d[1]))


def torus_diff_arrays(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorized minimal-image difference on arrays of torus coordinates."""
    d = (np.asarray(a, dtype=float) - np.asarray(b, dtype=float) + 0.5) % 1.0 - 0.5
    return np.where(d >= 0.5, d - 1.0, d)
