"""Full N-particle gas with one pairwise collision per particle per step.

One step is one mean collision time: the particles are split into pairs,
every pair collides, and the per-particle tangent vectors propagate through
the same linearization (K+ for a particle's own prior displacement, K- for
its partner's).  Two pairing schedules are provided:

  random  -- a uniformly random perfect matching each step
  tree    -- "tree-faithful": every affected particle meets a fresh
             unaffected partner while supplies last, so the affected set
             doubles exactly each step until it saturates at N

A twin mode evolves a second, fully nonlinear copy of the gas whose particle
0 starts displaced by eps*direction, through identical pairings, so the
exactness of the tangent instrument can be checked against minimal-image
trajectory differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .maps import CollisionModel, default_model, torus_diff_arrays, _wrap_unit

RNG_NAME = "numpy.random.PCG64"

TWIN_PARTICLE_CAP = 2**16


@dataclass(frozen=True)
class RunConfig:
    """Parameters of one gas run; a fixed config gives a bit-identical run."""

    n_particles: int
    steps: int
    epsilon: float = 1e-9
    direction: tuple[float, float] | None = None  # None -> xi_plus of the model
    seed: int = 0
    pairing: str = "random"  # "random" | "tree"
    twin: bool = False
    record_points: bool = True

    def __post_init__(self) -> None:
        if self.n_particles < 2:
            raise ValueError("need at least 2 particles")
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.pairing not in ("random", "tree"):
            raise ValueError(f"pairing must be 'random' or 'tree', got {self.pairing!r}")


@dataclass
class GasState:
    """Parallel per-particle arrays at one time step."""

    points: np.ndarray  # (N, 2) in [0, 1)^2
    tangents: np.ndarray  # (N, 2), unbounded
    affected: np.ndarray  # (N,) bool, monotone in t
    n1: np.ndarray  # (N,) direct-collision counts while affected
    n2: np.ndarray  # (N,) switch-collision counts
    t: int
    twin_points: np.ndarray | None = None

    @property
    def n_particles(self) -> int:
        return self.points.shape[0]

    def displacement_norms(self) -> np.ndarray:
        return np.linalg.norm(self.tangents, axis=1)


@dataclass
class Trajectory:
    """Per-step diagnostics (and optional state history) of one run."""

    config: RunConfig
    model_matrix: list[list[int]]
    affected_count: np.ndarray  # (steps+1,)
    norm: np.ndarray  # (steps+1,) sqrt(sum |dX_i|^2)
    max_disp: np.ndarray
    median_disp: np.ndarray
    twin_dist: np.ndarray  # nan when twin mode is off
    points_history: np.ndarray | None = None  # (steps+1, N, 2)
    tangents_history: np.ndarray | None = None
    affected_history: np.ndarray | None = None
    twin_points_history: np.ndarray | None = None
    pairs_history: list[np.ndarray] = field(default_factory=list)
    rng_name: str = RNG_NAME

    @property
    def n_particles(self) -> int:
        return self.config.n_particles

    @property
    def steps(self) -> int:
        return self.config.steps

    @property
    def saturation_step(self) -> int | float:
        """First step with every particle affected, or inf."""
        hits = np.nonzero(self.affected_count >= self.n_particles)[0]
        return int(hits[0]) if hits.size else math.inf


def resolve_direction(config: RunConfig, model: CollisionModel) -> np.ndarray:
    if config.direction is None:
        return model.xi_plus.copy()
    direction = np.asarray(config.direction, dtype=float)
    if not np.any(direction):
        raise ValueError("direction must be nonzero")
    return direction


def init_gas(config: RunConfig, model: CollisionModel | None = None,
             rng: np.random.Generator | None = None) -> GasState:
    """i.i.d. uniform points; particle 0 carries the whole perturbation."""
    model = model or default_model()
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    n = config.n_particles
    points = rng.random((n, 2))
    tangents = np.zeros((n, 2))
    tangents[0] = config.epsilon * resolve_direction(config, model)
    affected = np.zeros(n, dtype=bool)
    affected[0] = True
    twin_points = None
    if config.twin:
        if n > TWIN_PARTICLE_CAP:
            raise MemoryError(
                f"twin mode is limited to {TWIN_PARTICLE_CAP} particles, got {n}"
            )
        twin_points = _wrap_unit(points + tangents)
    return GasState(
        points=points,
        tangents=tangents,
        affected=affected,
        n1=np.zeros(n, dtype=np.int64),
        n2=np.zeros(n, dtype=np.int64),
        t=0,
        twin_points=twin_points,
    )


def _random_matching(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform perfect matching as a (k, 2) index array; odd leftover idles."""
    perm = rng.permutation(n)
    return perm[: 2 * (n // 2)].reshape(-1, 2)


def _tree_matching(affected: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Pair every affected particle with a fresh unaffected one if possible.

    Leftovers on either side are paired among themselves; one particle idles
    when the leftover count is odd.
    """
    idx_aff = np.nonzero(affected)[0]
    idx_un = np.nonzero(~affected)[0]
    rng.shuffle(idx_aff)
    rng.shuffle(idx_un)
    k = min(idx_aff.size, idx_un.size)
    mixed = np.stack([idx_aff[:k], idx_un[:k]], axis=1)
    rest = np.concatenate([idx_aff[k:], idx_un[k:]])
    rest = rest[: 2 * (rest.size // 2)].reshape(-1, 2)
    return np.concatenate([mixed, rest]) if rest.size else mixed


def step(state: GasState, model: CollisionModel, rng: np.random.Generator,
         pairing: str = "random") -> tuple[GasState, np.ndarray]:
    """Advance one mean collision time; returns (new state, pair indices).

    Every listed pair collides; positions wrap mod 1, tangents propagate
    linearly, affected flags spread, and (n1, n2) path counters advance per
    the direct/switch role of each particle.
    """
    if pairing == "random":
        pairs = _random_matching(state.n_particles, rng)
    elif pairing == "tree":
        pairs = _tree_matching(state.affected, rng)
    else:
        raise ValueError(f"unknown pairing mode {pairing!r}")

    i, j = pairs[:, 0], pairs[:, 1]

    points = state.points.copy()
    a, b = points[i], points[j]
    points[i] = _wrap_unit(a @ model.k_plus.T + b @ model.k_minus.T)
    points[j] = _wrap_unit(a @ model.k_minus.T + b @ model.k_plus.T)

    tangents = state.tangents.copy()
    da, db = tangents[i], tangents[j]
    tangents[i] = da @ model.k_plus.T + db @ model.k_minus.T
    tangents[j] = da @ model.k_minus.T + db @ model.k_plus.T

    was = state.affected
    affected = was.copy()
    affected[i] |= was[j]
    affected[j] |= was[i]

    n1 = state.n1.copy()
    n2 = state.n2.copy()
    # direct role: already affected before the collision; switch role: newly
    # affected through the partner.
    n1[i] += was[i]
    n1[j] += was[j]
    n2[i] += (~was[i]) & was[j]
    n2[j] += (~was[j]) & was[i]

    twin_points = None
    if state.twin_points is not None:
        twin_points = state.twin_points.copy()
        ta, tb = twin_points[i], twin_points[j]
        twin_points[i] = _wrap_unit(ta @ model.k_plus.T + tb @ model.k_minus.T)
        twin_points[j] = _wrap_unit(ta @ model.k_minus.T + tb @ model.k_plus.T)

    new_state = GasState(
        points=points,
        tangents=tangents,
        affected=affected,
        n1=n1,
        n2=n2,
        t=state.t + 1,
        twin_points=twin_points,
    )
    return new_state, pairs


def _diagnostics(state: GasState) -> tuple[int, float, float, float, float]:
    norms = state.displacement_norms()
    twin = math.nan
    if state.twin_points is not None:
        diff = torus_diff_arrays(state.twin_points, state.points)
        twin = float(np.sqrt(np.sum(diff**2)))
    return (
        int(np.count_nonzero(state.affected)),
        float(np.sqrt(np.sum(norms**2))),
        float(norms.max()),
        float(np.median(norms)),
        twin,
    )


def run_paired(config: RunConfig, model: CollisionModel | None = None) -> Trajectory:
    """Evolve the gas for config.steps steps, recording per-step diagnostics."""
    model = model or default_model()
    rng = np.random.default_rng(config.seed)
    state = init_gas(config, model, rng)

    n_rows = config.steps + 1
    affected_count = np.zeros(n_rows, dtype=np.int64)
    norm = np.zeros(n_rows)
    max_disp = np.zeros(n_rows)
    median_disp = np.zeros(n_rows)
    twin_dist = np.full(n_rows, math.nan)

    record = config.record_points
    points_history = tangents_history = affected_history = twin_history = None
    if record:
        n = config.n_particles
        points_history = np.empty((n_rows, n, 2))
        tangents_history = np.empty((n_rows, n, 2))
        affected_history = np.empty((n_rows, n), dtype=bool)
        if config.twin:
            twin_history = np.empty((n_rows, n, 2))

    pairs_history: list[np.ndarray] = []

    for t in range(n_rows):
        if t > 0:
            state, pairs = step(state, model, rng, config.pairing)
            pairs_history.append(pairs)
        (affected_count[t], norm[t], max_disp[t], median_disp[t], twin_dist[t]) = _diagnostics(state)
        if record:
            points_history[t] = state.points
            tangents_history[t] = state.tangents
            affected_history[t] = state.affected
            if config.twin:
                twin_history[t] = state.twin_points

    return Trajectory(
        config=config,
        model_matrix=model.m.tolist(),
        affected_count=affected_count,
        norm=norm,
        max_disp=max_disp,
        median_disp=median_disp,
        twin_dist=twin_dist,
        points_history=points_history,
        tangents_history=tangents_history,
        affected_history=affected_history,
        twin_points_history=twin_history,
        pairs_history=pairs_history,
    )


def significance_time(trajectory: Trajectory) -> int | float:
    """First step at which the median particle displacement reaches eps.

    Returns inf when the run never gets there (e.g. all-zero tangents).
    """
    eps = trajectory.config.epsilon
    hits = np.nonzero(trajectory.median_disp >= eps)[0]
    return int(hits[0]) if hits.size else math.inf
