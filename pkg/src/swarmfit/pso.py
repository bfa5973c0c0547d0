"""Particle swarm optimization over box-constrained domains.

Implements the classic inertia-weight velocity/position dynamics

    v' = w*v + c1*r1*(pbest - x) + c2*r2*(ref - x)
    x' = x + v'

with two ways of choosing the reference point ``ref``: the global-best
topology (every particle is pulled toward the best record of the whole
swarm) and the local-best topology (each particle is pulled toward the
best record among its m nearest neighbors by Euclidean distance on the
current positions).

Out-of-box moves are handled with an absorbing boundary: the offending
coordinate is clamped to the bound and its velocity component is zeroed,
so every evaluated point is feasible.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

Objective = Callable[[np.ndarray], float]


class Topology(str, Enum):
    GBEST = "gbest"
    LBEST = "lbest"


@dataclass(eq=False)
class BoxDomain:
    """Closed per-dimension bounds defining the feasible search box."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        self.validate()

    def validate(self) -> None:
        if self.lower.ndim != 1 or self.upper.ndim != 1:
            raise ValueError("domain bounds must be 1-d vectors")
        if self.lower.size != self.upper.size or self.lower.size < 1:
            raise ValueError("lower and upper must have equal length >= 1")
        if not (np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper))):
            raise ValueError("domain bounds must be finite")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def span(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))


@dataclass(eq=False)
class Particle:
    """One swarm member: current state plus its personal-best record."""

    position: np.ndarray
    velocity: np.ndarray
    best_position: np.ndarray
    best_value: float


@dataclass
class SwarmConfig:
    """Tuning parameters for one optimization run.

    ``w``, ``c1`` and ``c2`` are the inertia, cognitive and social
    coefficients; values outside [0, 2] are unusual and trigger a warning
    rather than an error.  ``m_neighbors`` is only consulted by the
    local-best topology.  ``scalar_r`` switches the random coefficients
    r1, r2 from one draw per dimension (default) to one draw per particle.
    """

    w: float = 0.9
    c1: float = 1.5
    c2: float = 0.3
    n_particles: int = 10
    topology: Topology = Topology.GBEST
    m_neighbors: int = 5
    n_iterations: int = 100
    seed: int = 0
    scalar_r: bool = False

    def __post_init__(self):
        self.topology = Topology(self.topology)
        self.validate()

    def validate(self) -> None:
        if self.n_particles < 1:
            raise ValueError("n_particles must be >= 1")
        if self.n_iterations < 1:
            raise ValueError("n_iterations must be >= 1")
        if not 1 <= self.m_neighbors <= self.n_particles:
            raise ValueError(
                f"m_neighbors must be in [1, n_particles], got {self.m_neighbors}"
            )
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        for name in ("w", "c1", "c2"):
            value = getattr(self, name)
            if not 0.0 <= value <= 2.0:
                warnings.warn(
                    f"{name}={value} is outside the usual [0, 2] range",
                    stacklevel=2,
                )


@dataclass(eq=False)
class OptResult:
    """Terminal swarm-best record plus the per-iteration best-value trace."""

    best_position: np.ndarray
    best_value: float
    trace: np.ndarray


@dataclass(eq=False)
class Swarm:
    """Full swarm state, stored as arrays with one row per particle.

    ``best_position``/``best_value`` hold the swarm-wide best record; the
    record is only replaced on strict improvement, scanning particles in
    index order.
    """

    positions: np.ndarray        # (n, d)
    velocities: np.ndarray       # (n, d)
    pbest_positions: np.ndarray  # (n, d)
    pbest_values: np.ndarray     # (n,)
    best_position: np.ndarray    # (d,)
    best_value: float

    @property
    def n_particles(self) -> int:
        return self.positions.shape[0]

    @property
    def particles(self) -> list[Particle]:
        return [
            Particle(
                position=self.positions[i].copy(),
                velocity=self.velocities[i].copy(),
                best_position=self.pbest_positions[i].copy(),
                best_value=float(self.pbest_values[i]),
            )
            for i in range(self.n_particles)
        ]


def _evaluate(objective: Objective, x: np.ndarray) -> float:
    # Non-finite objective values are mapped to +inf so the swarm can
    # traverse undefined regions without crashing.
    value = float(objective(x))
    return value if math.isfinite(value) else math.inf


def init_swarm(
    domain: BoxDomain,
    config: SwarmConfig,
    objective: Objective,
    rng: np.random.Generator | None = None,
) -> Swarm:
    """Draw the initial swarm.

    Positions are uniform inside the box; velocities are uniform in
    +-(range/2) per dimension.  Personal bests start at the initial
    positions and the swarm best is the lowest of those, earliest index
    winning ties.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    n, d = config.n_particles, domain.dim
    positions = rng.uniform(domain.lower, domain.upper, size=(n, d))
    half_span = domain.span / 2.0
    velocities = rng.uniform(-half_span, half_span, size=(n, d))
    values = np.array([_evaluate(objective, positions[i]) for i in range(n)])
    g = int(np.argmin(values))
    return Swarm(
        positions=positions,
        velocities=velocities,
        pbest_positions=positions.copy(),
        pbest_values=values,
        best_position=positions[g].copy(),
        best_value=float(values[g]),
    )


def velocity_update(v, x, p_i, p_ref, w, c1, c2, r1, r2) -> np.ndarray:
    """w*v + c1*r1*(p_i - x) + c2*r2*(p_ref - x), elementwise."""
    return w * v + c1 * r1 * (p_i - x) + c2 * r2 * (p_ref - x)


def position_update(x, v_new, domain: BoxDomain):
    """Move to x + v_new with an absorbing boundary.

    Clamped coordinates land exactly on the bound and have their velocity
    component zeroed.  Returns (position, velocity).
    """
    candidate = x + v_new
    out = (candidate < domain.lower) | (candidate > domain.upper)
    position = np.clip(candidate, domain.lower, domain.upper)
    velocity = np.where(out, 0.0, v_new)
    return position, velocity


def select_global_best(swarm: Swarm):
    """Lowest personal-best record of the whole swarm, earliest index on ties."""
    g = int(np.argmin(swarm.pbest_values))
    return swarm.pbest_positions[g].copy(), float(swarm.pbest_values[g])


def select_neighborhood_best(swarm: Swarm, i: int, m: int):
    """Best personal-best record among the m particles nearest to particle i.

    Neighbors are ranked by Euclidean distance between current positions
    (particle i itself has distance 0 and is always included); distance
    ties and value ties both break toward the lower particle index.
    """
    n = swarm.n_particles
    if not 1 <= m <= n:
        raise ValueError(f"m must be in [1, {n}], got {m}")
    distances = np.linalg.norm(swarm.positions - swarm.positions[i], axis=1)
    order = np.argsort(distances, kind="stable")
    neighborhood = order[:m]
    j = min(neighborhood, key=lambda k: (swarm.pbest_values[k], k))
    return swarm.pbest_positions[j].copy(), float(swarm.pbest_values[j])


def step(
    swarm: Swarm,
    objective: Objective,
    domain: BoxDomain,
    config: SwarmConfig,
    rng: np.random.Generator,
) -> Swarm:
    """Advance the swarm one iteration in place (synchronous update).

    Reference points are selected from the state at the start of the
    iteration, all particles then move, and the swarm-best record is
    refreshed last.
    """
    n, d = swarm.positions.shape
    r_shape = (n, 1) if config.scalar_r else (n, d)
    r1 = rng.random(r_shape)
    r2 = rng.random(r_shape)

    if config.topology is Topology.GBEST:
        p_ref = select_global_best(swarm)[0]
    else:
        p_ref = np.stack(
            [
                select_neighborhood_best(swarm, i, config.m_neighbors)[0]
                for i in range(n)
            ]
        )

    v_new = velocity_update(
        swarm.velocities,
        swarm.positions,
        swarm.pbest_positions,
        p_ref,
        config.w,
        config.c1,
        config.c2,
        r1,
        r2,
    )
    positions, velocities = position_update(swarm.positions, v_new, domain)
    values = np.array([_evaluate(objective, positions[i]) for i in range(n)])

    swarm.positions = positions
    swarm.velocities = velocities
    improved = values < swarm.pbest_values
    swarm.pbest_positions[improved] = positions[improved]
    swarm.pbest_values[improved] = values[improved]

    g = int(np.argmin(swarm.pbest_values))
    if swarm.pbest_values[g] < swarm.best_value:
        swarm.best_position = swarm.pbest_positions[g].copy()
        swarm.best_value = float(swarm.pbest_values[g])
    return swarm


def optimize(objective: Objective, domain: BoxDomain, config: SwarmConfig) -> OptResult:
    """Run the full PSO loop for a fixed iteration budget.

    Deterministic given ``config.seed``: two runs with identical inputs
    produce identical results.  The returned trace holds the swarm-best
    value after each iteration and is monotonically non-increasing.
    """
    domain.validate()
    config.validate()
    rng = np.random.default_rng(config.seed)
    swarm = init_swarm(domain, config, objective, rng)
    trace = np.empty(config.n_iterations)
    for k in range(config.n_iterations):
        step(swarm, objective, domain, config, rng)
        trace[k] = swarm.best_value
    return OptResult(
        best_position=swarm.best_position.copy(),
        best_value=swarm.best_value,
        trace=trace,
    )
