"""Uniform planar array geometry, complex weights, and gain evaluation.

The array lies in the local horizontal plane of a nadir-pointing satellite:
element rows step along the local east axis with spacing ``dx``, columns
along north with spacing ``dy``, and boresight points straight down.
Directions are (theta, phi) with theta the polar angle off boresight and
phi the azimuth measured from east toward north.

The response of weight vector ``w`` toward (theta, phi) is

    AF(theta, phi) = sum_{m,n} w[m,n] * exp(-i 2 pi / wl *
                     (m dx sin(theta) cos(phi) + n dy sin(theta) sin(phi)))

with weights flattened so the second index varies fastest
(``w[m, n] -> w[m * n_count + n]``, the ndarray ``ravel`` order).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "SPEED_OF_LIGHT",
    "ElementPattern",
    "ArrayModel",
    "Direction",
    "WeightVector",
    "SignalSnapshot",
    "array_factor",
    "gain",
    "gains",
    "array_output",
    "pattern_cut",
    "null_width",
]

SPEED_OF_LIGHT = 299_792_458.0

#: Export floor replacing -inf when a pattern sample is exactly zero.
DEFAULT_FLOOR_DB = -100.0


class ElementPattern(Enum):
    """Per-element radiation pattern; only the isotropic element is modelled."""

    OMNI = "omni"


@dataclass(frozen=True)
class ArrayModel:
    """Uniform planar array of m x n isotropic elements."""

    m: int
    n: int
    dx: float
    dy: float
    wavelength: float
    element: ElementPattern = ElementPattern.OMNI

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("element counts must be >= 1")
        if min(self.dx, self.dy, self.wavelength) <= 0.0:
            raise ValueError("spacings and wavelength must be positive")

    @classmethod
    def half_wavelength(cls, m: int, n: int, wavelength: float) -> "ArrayModel":
        return cls(m, n, wavelength / 2.0, wavelength / 2.0, wavelength)

    @classmethod
    def from_frequency(
        cls,
        m: int,
        n: int,
        frequency_hz: float,
        dx_over_wl: float = 0.5,
        dy_over_wl: float = 0.5,
    ) -> "ArrayModel":
        wl = SPEED_OF_LIGHT / frequency_hz
        return cls(m, n, dx_over_wl * wl, dy_over_wl * wl, wl)

    @property
    def size(self) -> int:
        return self.m * self.n

    def element_offsets(self) -> tuple[np.ndarray, np.ndarray]:
        """Flattened (east, north) element offsets in metres, ravel order."""
        mi, ni = np.meshgrid(np.arange(self.m), np.arange(self.n), indexing="ij")
        return mi.ravel() * self.dx, ni.ravel() * self.dy

    def steering(self, theta, phi) -> np.ndarray:
        """Steering phasors exp(-i k . r) for one or many directions.

        Scalars give a (size,) vector; arrays of P directions give (P, size).
        """
        theta_arr = np.asarray(theta, dtype=float)
        phi_arr = np.asarray(phi, dtype=float)
        scalar = theta_arr.ndim == 0 and phi_arr.ndim == 0
        theta_arr, phi_arr = np.atleast_1d(theta_arr), np.atleast_1d(phi_arr)
        x_off, y_off = self.element_offsets()
        sin_theta = np.sin(theta_arr)
        path = np.outer(sin_theta * np.cos(phi_arr), x_off) + np.outer(
            sin_theta * np.sin(phi_arr), y_off
        )
        phasors = np.exp((-2j * np.pi / self.wavelength) * path)
        return phasors[0] if scalar else phasors


@dataclass(frozen=True)
class Direction:
    """Polar angle off boresight (theta in [0, pi/2]) and azimuth phi."""

    theta: float
    phi: float

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise ValueError("non-finite direction")
        if not -1e-15 <= self.theta <= math.pi / 2 + 1e-15:
            raise ValueError(f"theta {self.theta} outside [0, pi/2]")
        object.__setattr__(self, "theta", min(max(self.theta, 0.0), math.pi / 2))
        object.__setattr__(self, "phi", self.phi % (2.0 * math.pi))

    @classmethod
    def from_degrees(cls, theta_deg: float, phi_deg: float) -> "Direction":
        return cls(math.radians(theta_deg), math.radians(phi_deg))


def _values_of(w) -> np.ndarray:
    """Accept a WeightVector/SignalSnapshot or any complex array-like."""
    return np.asarray(getattr(w, "values", w), dtype=complex)


@dataclass(frozen=True)
class WeightVector:
    """Complex element weights with the transmit-power cap ||w||^2 <= 1."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex).reshape(-1).copy()
        if not np.all(np.isfinite(values.view(float))):
            raise ValueError("non-finite weight")
        if np.vdot(values, values).real > 1.0 + 1e-9:
            raise ValueError("weight vector exceeds the unit power budget")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    @classmethod
    def uniform(cls, size: int) -> "WeightVector":
        return cls(np.full(size, 1.0 / math.sqrt(size), dtype=complex))

    @classmethod
    def unit(cls, size: int, index: int = 0) -> "WeightVector":
        values = np.zeros(size, dtype=complex)
        values[index] = 1.0
        return cls(values)

    @classmethod
    def zeros(cls, size: int) -> "WeightVector":
        return cls(np.zeros(size, dtype=complex))

    @classmethod
    def matched(cls, arr: ArrayModel, d: Direction) -> "WeightVector":
        """Unit-norm conjugate beamformer, the gain-optimal weights toward d."""
        steer = arr.steering(d.theta, d.phi)
        return cls(np.conj(steer) / np.linalg.norm(steer))

    def norm_sq(self) -> float:
        return float(np.vdot(self.values, self.values).real)

    def normalized(self) -> "WeightVector":
        norm = math.sqrt(self.norm_sq())
        if norm == 0.0:
            return self
        return WeightVector(self.values / norm)

    def amplitudes(self) -> np.ndarray:
        return np.abs(self.values)

    def phases(self) -> np.ndarray:
        """Element phases canonicalised to [0, 2*pi)."""
        return np.angle(self.values) % (2.0 * math.pi)


@dataclass(frozen=True)
class SignalSnapshot:
    """One complex sample per element, flattened in the weight order."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex).reshape(-1).copy()
        if not np.all(np.isfinite(values.view(float))):
            raise ValueError("non-finite sample")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size


def element_factor(pattern: ElementPattern, theta, phi):
    if pattern is ElementPattern.OMNI:
        return np.ones_like(np.asarray(theta, dtype=float))
    raise NotImplementedError(f"element pattern {pattern}")


def array_factor(arr: ArrayModel, w, d: Direction) -> complex:
    """Complex array response toward one direction."""
    values = _values_of(w)
    if values.size != arr.size:
        raise ValueError(f"weight length {values.size} != array size {arr.size}")
    return complex(arr.steering(d.theta, d.phi) @ values)


def gains(arr: ArrayModel, w, theta, phi) -> np.ndarray:
    """Power gain |element factor * AF|^2 toward many directions at once."""
    values = _values_of(w)
    if values.size != arr.size:
        raise ValueError(f"weight length {values.size} != array size {arr.size}")
    response = arr.steering(theta, phi) @ values
    xi = element_factor(arr.element, theta, phi)
    return np.abs(xi * response) ** 2


def gain(arr: ArrayModel, w, d: Direction) -> float:
    """Power gain toward one direction."""
    return float(gains(arr, w, d.theta, d.phi))


def array_output(w, s) -> complex:
    """Beamformer output w^H s for one snapshot."""
    wv = _values_of(w)
    sv = _values_of(s)
    if wv.size != sv.size:
        raise ValueError(f"weight length {wv.size} != snapshot length {sv.size}")
    return complex(np.vdot(wv, sv))


def pattern_cut(
    arr: ArrayModel,
    w,
    *,
    phi_cut: float | None = None,
    theta_cut: float | None = None,
    samples: int = 3601,
    floor_db: float = DEFAULT_FLOOR_DB,
) -> tuple[np.ndarray, np.ndarray]:
    """Sample the gain pattern along one principal cut.

    Exactly one of ``phi_cut``/``theta_cut`` must be given. A phi cut sweeps
    theta over [-pi/2, pi/2] (negative theta meaning azimuth phi + pi); a
    theta cut sweeps phi over [0, 2*pi). Returns (angles_rad, gains_db) with
    the dB values clamped at ``floor_db``.

    Parameters
    ----------
    samples : int
        Number of sample points, at least 2.
    """
    if (phi_cut is None) == (theta_cut is None):
        raise ValueError("specify exactly one of phi_cut or theta_cut")
    if samples < 2:
        raise ValueError("need at least 2 samples")
    if phi_cut is not None:
        angles = np.linspace(-np.pi / 2, np.pi / 2, samples)
        power = gains(arr, w, angles, np.full(samples, float(phi_cut)))
    else:
        angles = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
        power = gains(arr, w, np.full(samples, float(theta_cut)), angles)
    with np.errstate(divide="ignore"):
        level_db = 10.0 * np.log10(power)
    return angles, np.maximum(level_db, floor_db)


def null_width(
    angles: np.ndarray, gains_db: np.ndarray, center: float, depth_db: float = 40.0
) -> float:
    """Width of the contiguous region around ``center`` that sits at least
    ``depth_db`` below the pattern maximum; 0.0 if the centre sample is not
    that deep."""
    angles = np.asarray(angles, dtype=float)
    gains_db = np.asarray(gains_db, dtype=float)
    threshold = gains_db.max() - depth_db
    idx = int(np.argmin(np.abs(angles - center)))
    if gains_db[idx] > threshold:
        return 0.0
    lo = idx
    while lo > 0 and gains_db[lo - 1] <= threshold:
        lo -= 1
    hi = idx
    while hi < angles.size - 1 and gains_db[hi + 1] <= threshold:
        hi += 1
    return float(angles[hi] - angles[lo])
