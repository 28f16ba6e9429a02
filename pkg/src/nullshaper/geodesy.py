"""Coordinate transforms between satellite-relative AER frames and Earth-fixed
geodetic coordinates on a reference ellipsoid.

Conventions used throughout:

* Angles are radians and distances are metres; degrees appear only at I/O
  boundaries.
* AER azimuth is measured in the local horizontal plane from east toward
  north, elevation from the horizontal plane (so a ray pointing straight
  down at the ground has elevation -pi/2).
* NED is the local north-east-down tangent frame at the observer.
* ECEF X points at (lon 0, lat 0), Y at (lon 90E, lat 0), Z at the north
  pole.

Scalar entry points accept and return small frozen value types; the
``*_arrays`` kernels operate on plain ndarrays and carry the heavy loops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "EllipsoidParams",
    "WGS84",
    "GeodeticPosition",
    "AerPosition",
    "NedVector",
    "EcefPosition",
    "ConvergenceError",
    "RayMissError",
    "prime_vertical_radius",
    "aer_to_ned",
    "geodetic_to_ecef",
    "geodetic_to_ecef_arrays",
    "ned_to_ecef_rotation",
    "ecef_to_geodetic",
    "ecef_to_geodetic_arrays",
    "aer_to_geodetic",
    "haversine_distance",
    "ray_ellipsoid_range",
    "ground_footprint",
    "angular_deviation_to_ground_distance",
]

TWO_PI = 2.0 * math.pi

# Latitude iteration caps for the ECEF -> geodetic inverse. Convergence takes
# <= 6 iterations anywhere below 2000 km altitude; 15 is a generous bound.
LATITUDE_TOL_RAD = 1e-12
LATITUDE_MAX_ITER = 15


class ConvergenceError(RuntimeError):
    """Latitude refinement failed to converge; ``last`` holds the final iterate."""

    def __init__(self, message: str, last: "GeodeticPosition"):
        super().__init__(message)
        self.last = last


class RayMissError(ValueError):
    """A look ray does not intersect the ellipsoid."""


@dataclass(frozen=True)
class EllipsoidParams:
    """Reference ellipsoid: semi-axes, first eccentricity squared, mean radius."""

    semi_major: float
    semi_minor: float
    eccentricity_sq: float
    mean_radius: float

    def __post_init__(self):
        if not (0.0 < self.semi_minor < self.semi_major):
            raise ValueError("require 0 < semi_minor < semi_major")
        if self.mean_radius <= 0.0:
            raise ValueError("mean radius must be positive")
        implied = 1.0 - (self.semi_minor / self.semi_major) ** 2
        if abs(implied - self.eccentricity_sq) > 1e-12:
            raise ValueError("eccentricity_sq inconsistent with the semi-axes")

    @property
    def eccentricity(self) -> float:
        return math.sqrt(self.eccentricity_sq)


_WGS84_A = 6378137.0
_WGS84_E2 = 6.69437999014e-3

#: World Geodetic System 1984 ellipsoid. The semi-minor axis is derived from
#: (a, e^2) so the forward and inverse transforms share one exact datum.
WGS84 = EllipsoidParams(
    semi_major=_WGS84_A,
    semi_minor=_WGS84_A * math.sqrt(1.0 - _WGS84_E2),
    eccentricity_sq=_WGS84_E2,
    mean_radius=6371008.8,
)


def _wrap_longitude(lon: float) -> float:
    """Wrap to (-pi, pi]."""
    lon = math.fmod(lon, TWO_PI)
    if lon <= -math.pi:
        lon += TWO_PI
    elif lon > math.pi:
        lon -= TWO_PI
    return lon


@dataclass(frozen=True)
class GeodeticPosition:
    """Longitude, latitude (radians) and altitude above the ellipsoid (metres)."""

    longitude: float
    latitude: float
    altitude: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.longitude) and math.isfinite(self.latitude) and math.isfinite(self.altitude)):
            raise ValueError("non-finite geodetic component")
        if abs(self.latitude) > math.pi / 2 + 1e-15:
            raise ValueError(f"latitude {self.latitude} outside [-pi/2, pi/2]")
        if self.altitude <= -WGS84.semi_minor:
            raise ValueError("altitude below the ellipsoid centre region")
        object.__setattr__(self, "longitude", _wrap_longitude(self.longitude))

    @classmethod
    def from_degrees(cls, lon_deg: float, lat_deg: float, altitude_m: float = 0.0) -> "GeodeticPosition":
        return cls(math.radians(lon_deg), math.radians(lat_deg), altitude_m)

    @property
    def longitude_deg(self) -> float:
        return math.degrees(self.longitude)

    @property
    def latitude_deg(self) -> float:
        return math.degrees(self.latitude)


@dataclass(frozen=True)
class AerPosition:
    """Azimuth/elevation (radians) and slant range (metres) of a target.

    Azimuth is stored wrapped to [0, 2*pi); elevation must lie in
    [-pi/2, pi/2] and the range must be positive.
    """

    azimuth: float
    elevation: float
    srange: float

    def __post_init__(self):
        if not (math.isfinite(self.azimuth) and math.isfinite(self.elevation) and math.isfinite(self.srange)):
            raise ValueError("non-finite AER component")
        if not self.srange > 0.0:
            raise ValueError("range must be positive")
        if abs(self.elevation) > math.pi / 2 + 1e-15:
            raise ValueError("elevation outside [-pi/2, pi/2]")
        object.__setattr__(self, "azimuth", self.azimuth % TWO_PI)


@dataclass(frozen=True)
class NedVector:
    """Displacement in the local north-east-down frame (metres)."""

    north: float
    east: float
    down: float

    def __post_init__(self):
        if not (math.isfinite(self.north) and math.isfinite(self.east) and math.isfinite(self.down)):
            raise ValueError("non-finite NED component")

    def norm(self) -> float:
        return math.sqrt(self.north**2 + self.east**2 + self.down**2)

    def as_array(self) -> np.ndarray:
        return np.array([self.north, self.east, self.down])


@dataclass(frozen=True)
class EcefPosition:
    """Earth-centred Earth-fixed Cartesian position (metres)."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise ValueError("non-finite ECEF component")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


def prime_vertical_radius(latitude, ell: EllipsoidParams = WGS84):
    """East-west radius of curvature of the ellipsoid at the given latitude.

    Ranges from the semi-major axis at the equator to a/sqrt(1-e^2) at the
    poles. Accepts scalars or ndarrays.
    """
    sin_lat = np.sin(latitude)
    return ell.semi_major / np.sqrt(1.0 - ell.eccentricity_sq * sin_lat * sin_lat)


def aer_to_ned(p: AerPosition) -> NedVector:
    """Resolve an AER observation into NED components.

    north = r cos(el) sin(az), east = r cos(el) cos(az), down = -r sin(el);
    the vector norm equals the slant range.
    """
    cos_el = math.cos(p.elevation)
    return NedVector(
        north=p.srange * cos_el * math.sin(p.azimuth),
        east=p.srange * cos_el * math.cos(p.azimuth),
        down=-p.srange * math.sin(p.elevation),
    )


def geodetic_to_ecef_arrays(lon, lat, alt, ell: EllipsoidParams = WGS84):
    """Vectorised geodetic -> ECEF transform; returns (x, y, z) arrays."""
    lon = np.asarray(lon, dtype=float)
    lat = np.asarray(lat, dtype=float)
    alt = np.asarray(alt, dtype=float)
    rn = prime_vertical_radius(lat, ell)
    cos_lat = np.cos(lat)
    axial_ratio_sq = (ell.semi_minor / ell.semi_major) ** 2
    x = (rn + alt) * cos_lat * np.cos(lon)
    y = (rn + alt) * cos_lat * np.sin(lon)
    z = (axial_ratio_sq * rn + alt) * np.sin(lat)
    return x, y, z


def geodetic_to_ecef(p: GeodeticPosition, ell: EllipsoidParams = WGS84) -> EcefPosition:
    """Convert a geodetic position to ECEF coordinates."""
    x, y, z = geodetic_to_ecef_arrays(p.longitude, p.latitude, p.altitude, ell)
    return EcefPosition(float(x), float(y), float(z))


def ned_to_ecef_rotation(lon: float, lat: float) -> np.ndarray:
    """Rotation matrix taking NED components at (lon, lat) into ECEF.

    Columns are the local north, east and down unit vectors expressed in
    ECEF; the matrix is proper orthonormal (det = +1). Apply the transpose
    to go from ECEF displacements to NED.
    """
    sin_lon, cos_lon = math.sin(lon), math.cos(lon)
    sin_lat, cos_lat = math.sin(lat), math.cos(lat)
    return np.array(
        [
            [-sin_lat * cos_lon, -sin_lon, -cos_lat * cos_lon],
            [-sin_lat * sin_lon, cos_lon, -cos_lat * sin_lon],
            [cos_lat, 0.0, -sin_lat],
        ]
    )


def ecef_to_geodetic_arrays(
    x,
    y,
    z,
    ell: EllipsoidParams = WGS84,
    tol: float = LATITUDE_TOL_RAD,
    max_iter: int = LATITUDE_MAX_ITER,
):
    """Vectorised ECEF -> geodetic inverse.

    The latitude starts from the geocentric value and is refined with the
    fixed-point update lat <- atan2(z + R_N e^2 sin(lat), hypot(x, y)), the
    altitude being recomputed alongside. Returns (lon, lat, alt, converged)
    where ``converged`` is a bool array.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    p = np.hypot(x, y)
    lon = np.arctan2(y, x)
    lat = np.arctan2(z, p)
    converged = np.zeros(np.shape(lat), dtype=bool)
    for _ in range(max_iter):
        rn = prime_vertical_radius(lat, ell)
        new_lat = np.arctan2(z + rn * ell.eccentricity_sq * np.sin(lat), p)
        converged = np.abs(new_lat - lat) < tol
        lat = new_lat
        if np.all(converged):
            break
    rn = prime_vertical_radius(lat, ell)
    alt = p / np.cos(lat) - rn
    return lon, lat, alt, converged


def ecef_to_geodetic(
    p: EcefPosition,
    ell: EllipsoidParams = WGS84,
    tol: float = LATITUDE_TOL_RAD,
    max_iter: int = LATITUDE_MAX_ITER,
) -> GeodeticPosition:
    """Convert ECEF coordinates to geodetic, raising on non-convergence."""
    lon, lat, alt, ok = ecef_to_geodetic_arrays(p.x, p.y, p.z, ell, tol, max_iter)
    result = GeodeticPosition(float(lon), float(lat), float(alt))
    if not bool(np.all(ok)):
        raise ConvergenceError(
            f"latitude iteration did not reach {tol} rad in {max_iter} steps", result
        )
    return result


def aer_to_geodetic(
    target: AerPosition, sat: GeodeticPosition, ell: EllipsoidParams = WGS84
) -> GeodeticPosition:
    """Locate an AER observation from ``sat`` on the globe.

    Chains AER -> NED -> ECEF -> geodetic. The observation range fixes the
    point; use :func:`ground_footprint` when the range should instead be
    solved against the ellipsoid surface.
    """
    ned = aer_to_ned(target)
    origin = geodetic_to_ecef(sat, ell)
    ecef = origin.as_array() + ned_to_ecef_rotation(sat.longitude, sat.latitude) @ ned.as_array()
    if not np.linalg.norm(ecef) > 0.0:
        raise ValueError("resulting point coincides with the Earth centre")
    return ecef_to_geodetic(EcefPosition(*ecef), ell)


def haversine_distance(
    p1: GeodeticPosition, p2: GeodeticPosition, mean_radius: float = WGS84.mean_radius
) -> float:
    """Great-circle distance over a sphere of the given radius.

    Altitudes are ignored; the result lies in [0, pi * mean_radius].
    """
    half_dlat = 0.5 * (p2.latitude - p1.latitude)
    half_dlon = 0.5 * (p2.longitude - p1.longitude)
    eta = math.sin(half_dlat) ** 2 + math.cos(p1.latitude) * math.cos(p2.latitude) * math.sin(half_dlon) ** 2
    central = 2.0 * math.atan2(math.sqrt(eta), math.sqrt(max(1.0 - eta, 0.0)))
    return mean_radius * central


def ray_ellipsoid_range(
    origin: np.ndarray, direction: np.ndarray, ell: EllipsoidParams = WGS84
) -> float:
    """Distance from ``origin`` (ECEF) along ``direction`` to the first
    ellipsoid intersection.

    Raises :class:`RayMissError` when the ray never reaches the surface.
    The farther quadratic root lies on the far side of the planet and is
    never returned.
    """
    direction = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(direction)
    if not norm > 0.0:
        raise ValueError("direction must be non-zero")
    unit = direction / norm
    scale = np.array([ell.semi_major, ell.semi_major, ell.semi_minor])
    o = np.asarray(origin, dtype=float) / scale
    d = unit / scale
    a = d @ d
    b = 2.0 * (o @ d)
    c = o @ o - 1.0
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        raise RayMissError("look ray does not intersect the ellipsoid")
    sqrt_disc = math.sqrt(disc)
    t_near = (-b - sqrt_disc) / (2.0 * a)
    t_far = (-b + sqrt_disc) / (2.0 * a)
    t = t_near if t_near > 0.0 else t_far
    if t <= 0.0:
        raise RayMissError("ellipsoid intersections lie behind the ray origin")
    return float(t)


def ground_footprint(
    sat: GeodeticPosition, azimuth: float, elevation: float, ell: EllipsoidParams = WGS84
) -> GeodeticPosition:
    """Geodetic point where the (azimuth, elevation) ray from ``sat`` first
    meets the ellipsoid surface (slant range solved, not supplied)."""
    ned = aer_to_ned(AerPosition(azimuth, elevation, 1.0))
    rotation = ned_to_ecef_rotation(sat.longitude, sat.latitude)
    direction = rotation @ ned.as_array()
    origin = geodetic_to_ecef(sat, ell).as_array()
    t = ray_ellipsoid_range(origin, direction, ell)
    return ecef_to_geodetic(EcefPosition(*(origin + t * direction)), ell)


def angular_deviation_to_ground_distance(
    sat: GeodeticPosition,
    expected: AerPosition,
    delta_azimuth: float,
    delta_elevation: float,
    ell: EllipsoidParams = WGS84,
) -> float:
    """Ground separation caused by pointing error.

    Intersects the expected look ray and the ray perturbed by
    (delta_azimuth, delta_elevation) with the ellipsoid and returns the
    great-circle distance between the two footprints. Zero deviation gives
    zero; a ray that misses the planet raises :class:`RayMissError`.
    """
    nominal = ground_footprint(sat, expected.azimuth, expected.elevation, ell)
    deviated = ground_footprint(
        sat, expected.azimuth + delta_azimuth, expected.elevation + delta_elevation, ell
    )
    return haversine_distance(nominal, deviated, ell.mean_radius)
