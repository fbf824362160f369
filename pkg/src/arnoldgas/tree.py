"""Staged collision-tree idealization of influence spreading.

A single perturbed particle collides with a fresh partner at every stage, and
so does every particle already carrying part of the perturbation, so the
influenced subsystem doubles each stage: 2^n particles after n stages.  Along
the path from the root to a leaf each collision is either "direct" (the
influence stays with the incumbent particle, factor K+) or "switch" (it jumps
to the fresh partner, factor K-).  A leaf with n1 direct and n2 switch
collisions therefore carries displacement (K+)^{n1} (K-)^{n2} d0, and the n1
counts over the 2^n leaves follow the binomial distribution C(n, n1).

For an initial displacement along the expanding eigenvector xi_plus the leaf
displacement magnitudes are |kp|^{n1} |km|^{n2} eps with closed-form
aggregates:

  geometric mean dilation  |kp*km|^{n/2}      (~ 1.2097627^n for the default)
  arithmetic mean dilation ((|kp|+|km|)/2)^n
  whole-gas dilation       (kp^2 + km^2)^{n/2} >= 2^{n/2}
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .maps import CollisionModel, propagate_tangent_arrays

DEFAULT_MAX_STAGES = 24


class MemoryBudgetError(RuntimeError):
    """Raised when explicit leaf storage would exceed the configured budget."""


@dataclass(frozen=True)
class PathLabel:
    """Counts of direct (n1) and switch (n2) collisions along one leaf path."""

    n1: int
    n2: int

    @property
    def stage(self) -> int:
        return self.n1 + self.n2


@dataclass
class TreeRun:
    """All 2^n leaves of an n-stage collision tree with exact tangents."""

    stages: int
    epsilon: float
    direction: np.ndarray
    n1: np.ndarray = field(repr=False)  # (2^n,) direct-collision counts
    displacements: np.ndarray = field(repr=False)  # (2^n, 2) tangent vectors
    reservoir_size: int | None = None

    @property
    def n_leaves(self) -> int:
        return self.displacements.shape[0]

    @property
    def n2(self) -> np.ndarray:
        return self.stages - self.n1

    def labels(self) -> list[PathLabel]:
        return [PathLabel(int(k), self.stages - int(k)) for k in self.n1]


def run_tree(
    model: CollisionModel,
    stages: int,
    epsilon: float,
    direction: np.ndarray | None = None,
    max_stages: int = DEFAULT_MAX_STAGES,
    reservoir_size: int | None = None,
) -> TreeRun:
    """Expand the collision tree to `stages` stages with explicit leaves.

    Each stage maps every leaf displacement d to the pair (K+ d, K- d): the
    direct factor goes to the incumbent particle, the switch factor to the
    fresh partner.  Refuses stage counts whose 2^n leaf storage exceeds
    `max_stages`.
    """
    if stages < 0:
        raise ValueError("stages must be >= 0")
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    if stages > max_stages:
        raise MemoryBudgetError(
            f"{stages} stages needs 2^{stages} explicit leaves, over the "
            f"budget of {max_stages} stages; use closed-form aggregates instead"
        )
    if direction is None:
        direction = model.xi_plus
    direction = np.asarray(direction, dtype=float)
    if not np.any(direction):
        raise ValueError("direction must be nonzero")

    displacements = (epsilon * direction).reshape(1, 2)
    n1 = np.zeros(1, dtype=np.int64)
    for _ in range(stages):
        direct = propagate_tangent_arrays(model, displacements, "direct")
        switch = propagate_tangent_arrays(model, displacements, "switch")
        displacements = np.concatenate([direct, switch])
        n1 = np.concatenate([n1 + 1, n1])

    return TreeRun(
        stages=stages,
        epsilon=epsilon,
        direction=direction,
        n1=n1,
        displacements=displacements,
        reservoir_size=reservoir_size,
    )


def path_dilation(model: CollisionModel, label: PathLabel) -> float:
    """|kp|^{n1} |km|^{n2}, the dilation along one path from the root."""
    return abs(model.kp) ** label.n1 * abs(model.km) ** label.n2


def mean_dilations(run: TreeRun, model: CollisionModel) -> tuple[float, float]:
    """(geometric mean, arithmetic mean) of leaf dilations, by enumeration.

    For direction xi_plus the geometric mean equals |kp*km|^{n/2} (binomial
    symmetry puts the mean n1 at n/2) and the arithmetic mean equals
    ((|kp|+|km|)/2)^n.
    """
    mags = np.linalg.norm(run.displacements, axis=1) / run.epsilon
    geometric = float(np.exp(np.mean(np.log(mags))))
    arithmetic = float(np.mean(mags))
    return geometric, arithmetic


def mean_dilations_closed(model: CollisionModel, stages: int) -> tuple[float, float]:
    """Closed-form (geometric, arithmetic) mean dilations for direction xi_plus."""
    geometric = model.dilation_product ** (stages / 2.0)
    arithmetic = ((abs(model.kp) + abs(model.km)) / 2.0) ** stages
    return geometric, arithmetic


def gas_dilation(run: TreeRun) -> float:
    """Whole-gas dilation sqrt(sum of squared leaf displacements) / eps."""
    return float(np.sqrt(np.sum(run.displacements**2)) / run.epsilon)


def gas_dilation_closed(model: CollisionModel, stages: int) -> float:
    """(kp^2 + km^2)^{n/2}; always >= 2^{n/2} since kp^2 + km^2 >= 2|kp*km| >= 2."""
    return (model.kp**2 + model.km**2) ** (stages / 2.0)


class SignificanceStages(NamedTuple):
    """Stage counts at which the perturbation becomes gas-wide significant."""

    saturation: int  # smallest n with 2^n >= N (ideal-tree saturation)
    dilation_bound: int  # smallest n with gas_dilation(n) >= sqrt(N)


def significance_stage(reservoir: int, model: CollisionModel) -> SignificanceStages:
    """Ideal-tree significance stages for a reservoir of N particles.

    `saturation` is ceil(log2 N); `dilation_bound` is the first stage at
    which the whole-gas dilation reaches sqrt(N).
    """
    if reservoir < 1:
        raise ValueError("reservoir size must be >= 1")
    saturation = max(0, (reservoir - 1).bit_length())
    if reservoir == 1:
        dilation_bound = 0
    else:
        rate = math.log(gas_dilation_closed(model, 2)) / 2.0
        dilation_bound = math.ceil(0.5 * math.log(reservoir) / rate)
        # guard against float edge cases around exact powers
        while gas_dilation_closed(model, dilation_bound) < math.sqrt(reservoir):
            dilation_bound += 1
        while dilation_bound > 0 and gas_dilation_closed(model, dilation_bound - 1) >= math.sqrt(reservoir):
            dilation_bound -= 1
    return SignificanceStages(saturation=saturation, dilation_bound=dilation_bound)


def leaf_records(run: TreeRun) -> list[tuple[int, int, int, float, float, float]]:
    """Per-leaf rows (stage, n1, n2, dx, dp, |d|) for CSV output."""
    norms = np.linalg.norm(run.displacements, axis=1)
    return [
        (
            run.stages,
            int(run.n1[i]),
            int(run.stages - run.n1[i]),
            float(run.displacements[i, 0]),
            float(run.displacements[i, 1]),
            float(norms[i]),
        )
        for i in range(run.n_leaves)
    ]
