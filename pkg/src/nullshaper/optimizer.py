"""Maximisation of the mitigation-effectiveness ratio over complex weights.

The objective is the mean user-directed gain divided by the mean
probability-weighted interferer gain. It is nonconvex in the weights, so
the search is heuristic: particle-swarm optimisation over the stacked
real/imaginary parts (which sidesteps the 2*pi phase wrap), followed by a
derivative-free coordinate polish. Feasibility (||w||^2 <= 1) is kept by
projecting onto the unit ball after every move; the ratio is scale
invariant, so projection never changes an objective value.

Two deterministic warm-start particles seed the swarm: the matched
beamformer toward the users, and its projection onto the (regularised)
null space of the interferer sample directions. The swarm is free to beat
them; in easy geometries they already sit near the optimum, which keeps
run-to-run design quality flat.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .array import ArrayModel, Direction, WeightVector
from .uncertainty import NullSampleGrid

__all__ = [
    "PolishConfig",
    "PsoConfig",
    "Objective",
    "OptimizationResult",
    "mitigation_effectiveness",
    "optimize",
    "local_polish",
]

#: Fitness floor used inside log10 so exact zeros stay comparable.
_LOG_FLOOR = 1e-300

#: Relative Tikhonov weight for the null-projection warm start.
_PROJECTION_RIDGE = 1e-8


@dataclass(frozen=True)
class PolishConfig:
    """Coordinate-descent refinement: sweep count, initial step, and the
    factor applied to the step after a sweep with no accepted move."""

    sweeps: int = 50
    step: float = 0.05
    shrink: float = 0.5

    def __post_init__(self):
        if self.sweeps < 0 or self.step <= 0.0 or not 0.0 < self.shrink < 1.0:
            raise ValueError("invalid polish configuration")


@dataclass(frozen=True)
class PsoConfig:
    """Swarm search hyper-parameters.

    ``swarm_size=None`` resolves to ceil(8 * sqrt(dim)) for a search space
    of dim = 2 m n real coordinates. Inertia and the two acceleration
    coefficients default to the standard constriction values.
    """

    swarm_size: int | None = None
    iterations: int = 300
    inertia: float = 0.729
    cognitive: float = 1.49445
    social: float = 1.49445
    velocity_clamp: float = 0.5
    seed: int = 0
    polish: PolishConfig | None = field(default_factory=PolishConfig)

    def __post_init__(self):
        if self.swarm_size is not None and self.swarm_size < 2:
            raise ValueError("swarm_size must be >= 2")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0.0 <= self.inertia <= 1.0:
            raise ValueError("inertia must lie in [0, 1]")
        if self.cognitive <= 0.0 or self.social <= 0.0:
            raise ValueError("acceleration coefficients must be positive")
        if self.velocity_clamp <= 0.0:
            raise ValueError("velocity clamp must be positive")

    def resolved_swarm_size(self, dim: int) -> int:
        if self.swarm_size is not None:
            return self.swarm_size
        return max(2, math.ceil(8.0 * math.sqrt(dim)))


class Objective:
    """Mitigation effectiveness for fixed users and interferer grids.

    Steering vectors for every evaluation direction are precomputed once,
    so each objective call reduces to two small matrix products. An empty
    grid list disables the interferers (denominator pinned to 1), which
    turns the objective into plain mean user gain.
    """

    def __init__(
        self,
        array: ArrayModel,
        user_directions: list[Direction] | tuple[Direction, ...],
        interferer_grids: list[NullSampleGrid] | tuple[NullSampleGrid, ...] = (),
        eps_den: float = 1e-18,
    ):
        if len(user_directions) < 1:
            raise ValueError("need at least one user direction")
        if eps_den <= 0.0:
            raise ValueError("eps_den must be positive")
        self.array = array
        self.user_directions = tuple(user_directions)
        self.interferer_grids = tuple(interferer_grids)
        self.eps_den = float(eps_den)

        self._user_steering = array.steering(
            np.array([d.theta for d in self.user_directions]),
            np.array([d.phi for d in self.user_directions]),
        )
        if self.interferer_grids:
            j_count = len(self.interferer_grids)
            self._grid_steering = np.vstack(
                [array.steering(g.thetas, g.phis) for g in self.interferer_grids]
            )
            self._grid_weights = np.concatenate(
                [g.weights for g in self.interferer_grids]
            ) / j_count
        else:
            self._grid_steering = None
            self._grid_weights = None

    @property
    def user_count(self) -> int:
        return len(self.user_directions)

    @property
    def interferer_count(self) -> int:
        return len(self.interferer_grids)

    @property
    def dim(self) -> int:
        """Real search-space dimension (re and im per element)."""
        return 2 * self.array.size

    def user_gain_mean(self, w) -> float:
        values = _complex_of(w, self.array.size)
        return float(np.mean(np.abs(self._user_steering @ values) ** 2))

    def interferer_gain_mean(self, w) -> float:
        """Mean over interferers of the probability-weighted gain."""
        if self._grid_steering is None:
            raise ValueError("objective has no interferers")
        values = _complex_of(w, self.array.size)
        return float(self._grid_weights @ np.abs(self._grid_steering @ values) ** 2)

    def value(self, w) -> float:
        values = _complex_of(w, self.array.size)
        return float(self.value_batch(values[np.newaxis, :])[0])

    def value_batch(self, weights: np.ndarray) -> np.ndarray:
        """Objective for a (S, size) batch of complex weight rows."""
        numerator = np.mean(np.abs(self._user_steering @ weights.T) ** 2, axis=0)
        if self._grid_steering is None:
            return numerator
        denominator = self._grid_weights @ np.abs(self._grid_steering @ weights.T) ** 2
        return numerator / np.maximum(denominator, self.eps_den)


def _complex_of(w, size: int) -> np.ndarray:
    values = np.asarray(getattr(w, "values", w), dtype=complex).reshape(-1)
    if values.size != size:
        raise ValueError(f"weight length {values.size} != array size {size}")
    return values


def mitigation_effectiveness(obj: Objective, w) -> float:
    """Ratio of mean user gain to mean weighted interferer gain.

    The denominator is clamped at ``obj.eps_den``, so a perfect null yields
    numerator / eps_den and an all-zero weight vector yields 0.
    """
    return obj.value(w)


@dataclass(frozen=True)
class OptimizationResult:
    """Best weights found plus the search record.

    ``trace`` holds the best objective so far in dB, one entry per swarm
    iteration (including the initial population) and one per polish sweep;
    it is non-decreasing.
    """

    weights: WeightVector
    psi: float
    psi_db: float
    trace: tuple[float, ...]
    evaluations: int
    seed: int


def _to_real(values: np.ndarray) -> np.ndarray:
    return np.concatenate([values.real, values.imag])


def _to_complex_rows(x: np.ndarray) -> np.ndarray:
    half = x.shape[-1] // 2
    return x[..., :half] + 1j * x[..., half:]


def _project_ball(x: np.ndarray) -> np.ndarray:
    """Scale rows with ||w|| > 1 back onto the unit sphere."""
    norms = np.sqrt(np.sum(x * x, axis=-1, keepdims=True))
    return np.where(norms > 1.0, x / norms, x)


def _fitness(obj: Objective, x: np.ndarray) -> np.ndarray:
    return np.log10(np.maximum(obj.value_batch(_to_complex_rows(x)), _LOG_FLOOR))


def _warm_starts(obj: Objective) -> list[np.ndarray]:
    """Deterministic seeds: matched beam, then its ridge-regularised
    projection onto the null space of the grid steering vectors."""
    matched = np.conj(obj._user_steering.mean(axis=0))
    norm = np.linalg.norm(matched)
    if norm == 0.0:
        return []
    matched = matched / norm
    seeds = [_to_real(matched)]
    steering = obj._grid_steering
    if steering is not None:
        gram = steering @ steering.conj().T
        ridge = _PROJECTION_RIDGE * float(np.trace(gram).real) / steering.shape[0]
        coeff = np.linalg.solve(gram + ridge * np.eye(steering.shape[0]), steering @ matched)
        nulled = matched - steering.conj().T @ coeff
        nulled_norm = np.linalg.norm(nulled)
        if nulled_norm > 1e-12:
            seeds.append(_to_real(nulled / nulled_norm))
    return seeds


def optimize(obj: Objective, cfg: PsoConfig) -> OptimizationResult:
    """Particle-swarm search plus optional coordinate polish.

    Deterministic for a fixed (objective, config, seed): random draws are
    vectorised per iteration, fitness ties resolve to the lowest particle
    index, and the returned best is never worse than any initial particle.
    The reported weights are scaled to exactly unit norm (the objective is
    scale invariant).
    """
    dim = obj.dim
    swarm = cfg.resolved_swarm_size(dim)
    rng = np.random.default_rng(cfg.seed)

    positions = _project_ball(rng.uniform(-1.0, 1.0, size=(swarm, dim)))
    for row, seed_particle in enumerate(_warm_starts(obj)[:swarm]):
        positions[row] = _project_ball(seed_particle[np.newaxis, :])[0]
    velocities = np.zeros((swarm, dim))

    fitness = _fitness(obj, positions)
    evaluations = swarm
    personal_best = positions.copy()
    personal_fitness = fitness.copy()
    leader = int(np.argmax(personal_fitness))
    global_best = personal_best[leader].copy()
    global_fitness = float(personal_fitness[leader])
    trace = [10.0 * global_fitness]

    for _ in range(cfg.iterations):
        pull_personal = rng.uniform(size=(swarm, dim))
        pull_global = rng.uniform(size=(swarm, dim))
        velocities = (
            cfg.inertia * velocities
            + cfg.cognitive * pull_personal * (personal_best - positions)
            + cfg.social * pull_global * (global_best - positions)
        )
        np.clip(velocities, -cfg.velocity_clamp, cfg.velocity_clamp, out=velocities)
        positions = _project_ball(positions + velocities)
        fitness = _fitness(obj, positions)
        evaluations += swarm
        improved = fitness > personal_fitness
        personal_best[improved] = positions[improved]
        personal_fitness[improved] = fitness[improved]
        leader = int(np.argmax(personal_fitness))
        if personal_fitness[leader] > global_fitness:
            global_best = personal_best[leader].copy()
            global_fitness = float(personal_fitness[leader])
        trace.append(10.0 * global_fitness)

    if cfg.polish is not None:
        global_best, polish_trace, polish_evals = _polish_real(
            obj, global_best, cfg.polish
        )
        trace.extend(polish_trace)
        evaluations += polish_evals

    best_complex = _to_complex_rows(global_best[np.newaxis, :])[0]
    norm = np.linalg.norm(best_complex)
    if norm > 0.0:
        best_complex = best_complex / norm
    weights = WeightVector(best_complex)
    psi = obj.value(weights)
    return OptimizationResult(
        weights=weights,
        psi=psi,
        psi_db=10.0 * math.log10(max(psi, _LOG_FLOOR)),
        trace=tuple(trace),
        evaluations=evaluations,
        seed=cfg.seed,
    )


def _polish_real(
    obj: Objective, x0: np.ndarray, cfg: PolishConfig
) -> tuple[np.ndarray, list[float], int]:
    """Greedy +/-step coordinate descent on the projected ball; monotone."""
    x = x0.copy()
    best = float(obj.value(_to_complex_rows(x[np.newaxis, :])[0]))
    evaluations = 1
    step = cfg.step
    trace = []
    for _ in range(cfg.sweeps):
        accepted = False
        for coord in range(x.size):
            for delta in (step, -step):
                candidate = x.copy()
                candidate[coord] += delta
                candidate = _project_ball(candidate[np.newaxis, :])[0]
                value = float(obj.value_batch(_to_complex_rows(candidate[np.newaxis, :]))[0])
                evaluations += 1
                if value > best:
                    best = value
                    x = candidate
                    accepted = True
        trace.append(10.0 * math.log10(max(best, _LOG_FLOOR)))
        if not accepted:
            step *= cfg.shrink
    return x, trace, evaluations


def local_polish(obj: Objective, w0: WeightVector, cfg: PsoConfig) -> WeightVector:
    """Refine feasible weights by coordinate descent; the result never
    scores below the input."""
    polish_cfg = cfg.polish if cfg.polish is not None else PolishConfig()
    x0 = _to_real(_complex_of(w0, obj.array.size))
    x, _, _ = _polish_real(obj, x0, polish_cfg)
    return WeightVector(_to_complex_rows(x[np.newaxis, :])[0])
