"""Statistical model of an interferer's angular position and the sample grid
used to shape nulls over its uncertainty region.

The interferer's (theta, phi) direction is believed to follow an
uncorrelated bivariate normal. Null shaping samples that belief on an
L x L grid spanning +/- kappa standard deviations per axis and weights
each sample direction by the density there, so the optimizer suppresses
gain where the interferer is most likely to be.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .array import ArrayModel, gains

__all__ = [
    "DegenerateDistributionError",
    "InterfererBelief",
    "NullSampleGrid",
    "pdf",
    "build_grid",
    "normalize_weights",
    "weighted_interferer_gain",
    "write_grid_csv",
]


class DegenerateDistributionError(ValueError):
    """Density requested for a zero-variance axis."""


@dataclass(frozen=True)
class InterfererBelief:
    """Mean direction and per-axis standard deviations, all in radians."""

    mean_theta: float
    mean_phi: float
    sigma_theta: float
    sigma_phi: float

    def __post_init__(self):
        for name in ("mean_theta", "mean_phi", "sigma_theta", "sigma_phi"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"non-finite {name}")
        if self.sigma_theta < 0.0 or self.sigma_phi < 0.0:
            raise ValueError("standard deviations must be >= 0")

    @classmethod
    def isotropic(cls, mean_theta: float, mean_phi: float, sigma: float) -> "InterfererBelief":
        return cls(mean_theta, mean_phi, sigma, sigma)

    def covariance(self) -> np.ndarray:
        """Diagonal 2x2 covariance of (theta, phi)."""
        return np.diag([self.sigma_theta**2, self.sigma_phi**2])


def pdf(belief: InterfererBelief, theta, phi):
    """Bivariate normal density of the belief at (theta, phi).

    Requires both sigmas positive; a point-mass belief has no density (the
    grid builder handles that case separately).
    """
    if belief.sigma_theta <= 0.0 or belief.sigma_phi <= 0.0:
        raise DegenerateDistributionError("pdf undefined for zero sigma")
    z_theta = (np.asarray(theta, dtype=float) - belief.mean_theta) / belief.sigma_theta
    z_phi = (np.asarray(phi, dtype=float) - belief.mean_phi) / belief.sigma_phi
    norm = 2.0 * math.pi * belief.sigma_theta * belief.sigma_phi
    return np.exp(-0.5 * (z_theta**2 + z_phi**2)) / norm


@dataclass(frozen=True)
class NullSampleGrid:
    """Sample directions (Z, 2) with per-direction probability weights (Z,).

    Directions are the Cartesian product of the theta and phi sample lists,
    theta varying slowest. ``samples_per_axis`` and ``kappa`` record the
    construction parameters.
    """

    directions: np.ndarray
    weights: np.ndarray
    samples_per_axis: int
    kappa: int

    def __post_init__(self):
        directions = np.asarray(self.directions, dtype=float).reshape(-1, 2).copy()
        weights = np.asarray(self.weights, dtype=float).reshape(-1).copy()
        if directions.shape[0] != weights.size or weights.size == 0:
            raise ValueError("directions and weights must match and be non-empty")
        if np.any(weights <= 0.0) or not np.all(np.isfinite(weights)):
            raise ValueError("weights must be positive and finite")
        directions.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "directions", directions)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return self.weights.size

    @property
    def thetas(self) -> np.ndarray:
        return self.directions[:, 0]

    @property
    def phis(self) -> np.ndarray:
        return self.directions[:, 1]

    @classmethod
    def point(cls, theta: float, phi: float) -> "NullSampleGrid":
        """Single direction with unit weight; used to score a realised
        interferer position."""
        return cls(np.array([[theta, phi]]), np.array([1.0]), 1, 0)


def _axis_samples(mean: float, sigma: float, count: int, kappa: int) -> np.ndarray:
    if count == 1 or kappa == 0 or sigma == 0.0:
        return np.full(count, mean)
    # mean + symmetric offsets keeps the centre sample of an odd grid exact
    return mean + np.linspace(-kappa * sigma, kappa * sigma, count)


def build_grid(belief: InterfererBelief, samples_per_axis: int, kappa: int) -> NullSampleGrid:
    """Sample the belief on an endpoint-inclusive L x L grid over
    [mean - kappa sigma, mean + kappa sigma] per axis.

    Weights are the raw density values at the sample directions. Degenerate
    cases collapse instead of erroring: a point-mass belief (both sigmas
    zero) or L = 1 yields a single sample of weight one, and kappa = 0 or a
    zero sigma collapses the affected axis onto the mean (the collapsed
    axis contributing no density factor).
    """
    if samples_per_axis < 1:
        raise ValueError("samples_per_axis must be >= 1")
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    if samples_per_axis == 1 or (belief.sigma_theta == 0.0 and belief.sigma_phi == 0.0):
        return NullSampleGrid.point(belief.mean_theta, belief.mean_phi)

    count = samples_per_axis
    theta_samples = _axis_samples(belief.mean_theta, belief.sigma_theta, count, kappa)
    phi_samples = _axis_samples(belief.mean_phi, belief.sigma_phi, count, kappa)
    theta_grid, phi_grid = np.meshgrid(theta_samples, phi_samples, indexing="ij")
    directions = np.column_stack([theta_grid.ravel(), phi_grid.ravel()])

    weights = np.ones(count * count)
    for axis_values, mean, sigma in (
        (directions[:, 0], belief.mean_theta, belief.sigma_theta),
        (directions[:, 1], belief.mean_phi, belief.sigma_phi),
    ):
        if sigma > 0.0:
            z = (axis_values - mean) / sigma
            weights = weights * np.exp(-0.5 * z**2) / (math.sqrt(2.0 * math.pi) * sigma)
    return NullSampleGrid(directions, weights, count, kappa)


def normalize_weights(grid: NullSampleGrid) -> NullSampleGrid:
    """Rescale the weights to sum to one; directions are untouched."""
    total = float(grid.weights.sum())
    if not total > 0.0:
        raise ValueError("weights sum to zero")
    return NullSampleGrid(grid.directions, grid.weights / total, grid.samples_per_axis, grid.kappa)


def weighted_interferer_gain(arr: ArrayModel, w, grid: NullSampleGrid) -> float:
    """Probability-weighted array gain over the grid,
    sum_z p_z * G(theta_z, phi_z)."""
    return float(grid.weights @ gains(arr, w, grid.thetas, grid.phis))


def write_grid_csv(grid: NullSampleGrid, path) -> None:
    """Dump the grid for debugging: theta_deg, phi_deg, weight rows."""
    lines = ["theta_deg,phi_deg,weight"]
    for (theta, phi), weight in zip(grid.directions, grid.weights):
        lines.append(
            f"{math.degrees(theta)!r},{math.degrees(phi)!r},{float(weight)!r}"
        )
    with open(path, "w") as handle:
        handle.write("\n".join(lines) + "\n")
