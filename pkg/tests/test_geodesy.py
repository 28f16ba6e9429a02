import math

import numpy as np
import pytest

from nullshaper.geodesy import (
    WGS84,
    AerPosition,
    ConvergenceError,
    EcefPosition,
    GeodeticPosition,
    NedVector,
    RayMissError,
    aer_to_geodetic,
    aer_to_ned,
    angular_deviation_to_ground_distance,
    ecef_to_geodetic,
    ecef_to_geodetic_arrays,
    geodetic_to_ecef,
    geodetic_to_ecef_arrays,
    ground_footprint,
    haversine_distance,
    ned_to_ecef_rotation,
    prime_vertical_radius,
)

# Satellite location reused across the viewing-geometry tests.
SAT = GeodeticPosition.from_degrees(138.53, -22.024, 800e3)


def ecef_to_geodetic_closed_form(x, y, z, ell=WGS84):
    """Independent reference inverse: exact algebraic (quartic) solution,
    no iteration shared with the production code."""
    a, b, e2 = ell.semi_major, ell.semi_minor, ell.eccentricity_sq
    ep2 = (a * a - b * b) / (b * b)
    p = math.hypot(x, y)
    big_f = 54.0 * b * b * z * z
    big_g = p * p + (1.0 - e2) * z * z - e2 * (a * a - b * b)
    c = e2 * e2 * big_f * p * p / (big_g**3)
    s = (1.0 + c + math.sqrt(c * c + 2.0 * c)) ** (1.0 / 3.0)
    k = s + 1.0 + 1.0 / s
    big_p = big_f / (3.0 * k * k * big_g * big_g)
    big_q = math.sqrt(1.0 + 2.0 * e2 * e2 * big_p)
    r0 = -big_p * e2 * p / (1.0 + big_q) + math.sqrt(
        max(
            0.5 * a * a * (1.0 + 1.0 / big_q)
            - big_p * (1.0 - e2) * z * z / (big_q * (1.0 + big_q))
            - 0.5 * big_p * p * p,
            0.0,
        )
    )
    u = math.hypot(p - e2 * r0, z)
    v = math.sqrt((p - e2 * r0) ** 2 + (1.0 - e2) * z * z)
    z0 = b * b * z / (a * v)
    return math.atan2(y, x), math.atan((z + ep2 * z0) / p), u * (1.0 - b * b / (a * v))


class TestAerToNed:
    def test_azimuth_zero_points_east(self):
        ned = aer_to_ned(AerPosition(0.0, 0.0, 1000.0))
        assert ned.north == pytest.approx(0.0, abs=1e-12)
        assert ned.east == pytest.approx(1000.0)
        assert ned.down == pytest.approx(0.0, abs=1e-12)

    def test_azimuth_quarter_turn_points_north(self):
        ned = aer_to_ned(AerPosition(math.pi / 2, 0.0, 1000.0))
        assert ned.north == pytest.approx(1000.0)
        assert ned.east == pytest.approx(0.0, abs=1e-9)
        assert ned.down == pytest.approx(0.0, abs=1e-12)

    def test_depressed_ray_points_down(self):
        ned = aer_to_ned(AerPosition(0.0, -math.pi / 2, 800_000.0))
        assert ned.north == pytest.approx(0.0, abs=1e-9)
        assert ned.east == pytest.approx(0.0, abs=1e-9)
        assert ned.down == pytest.approx(800_000.0)

    def test_norm_equals_range(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            p = AerPosition(
                rng.uniform(0, 2 * math.pi),
                rng.uniform(-math.pi / 2, math.pi / 2),
                rng.uniform(1.0, 1e7),
            )
            assert aer_to_ned(p).norm() == pytest.approx(p.srange, rel=1e-9)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            AerPosition(math.nan, 0.0, 1.0)
        with pytest.raises(ValueError):
            AerPosition(0.0, 0.0, -5.0)


class TestPrimeVerticalRadius:
    def test_equator_is_semi_major(self):
        assert prime_vertical_radius(0.0) == WGS84.semi_major == 6378137.0

    def test_pole(self):
        expected = WGS84.semi_major / math.sqrt(1.0 - WGS84.eccentricity_sq)
        assert prime_vertical_radius(math.pi / 2) == pytest.approx(expected, rel=1e-15)

    def test_reference_value_at_southern_latitude(self):
        # frozen from a 40-digit evaluation of a / sqrt(1 - e^2 sin^2(lat))
        assert prime_vertical_radius(math.radians(-22.024)) == pytest.approx(
            6381141.220301015, abs=1e-6
        )


class TestGeodeticToEcef:
    def test_equator_prime_meridian(self):
        e = geodetic_to_ecef(GeodeticPosition(0.0, 0.0, 0.0))
        assert (e.x, e.y, e.z) == pytest.approx((WGS84.semi_major, 0.0, 0.0), abs=1e-9)

    def test_east_quadrant_with_altitude(self):
        e = geodetic_to_ecef(GeodeticPosition.from_degrees(90.0, 0.0, 1000.0))
        assert e.x == pytest.approx(0.0, abs=1e-6)
        assert e.y == pytest.approx(WGS84.semi_major + 1000.0)
        assert e.z == pytest.approx(0.0, abs=1e-9)

    def test_satellite_reference_values(self):
        # frozen from a 40-digit evaluation at (138.53 deg, -22.024 deg, 800 km)
        e = geodetic_to_ecef(SAT)
        assert e.x == pytest.approx(-4988190.187779477, abs=1e-4)
        assert e.y == pytest.approx(4408523.863547695, abs=1e-4)
        assert e.z == pytest.approx(-2676872.656768587, abs=1e-4)


class TestNedRotation:
    def test_axes_at_origin(self):
        r = ned_to_ecef_rotation(0.0, 0.0)
        # at (lon 0, lat 0): north is +Z, east is +Y, down is -X
        assert r @ np.array([1.0, 0.0, 0.0]) == pytest.approx([0.0, 0.0, 1.0])
        assert r @ np.array([0.0, 1.0, 0.0]) == pytest.approx([0.0, 1.0, 0.0])
        assert r @ np.array([0.0, 0.0, 1.0]) == pytest.approx([-1.0, 0.0, 0.0])

    def test_proper_orthonormal(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            r = ned_to_ecef_rotation(rng.uniform(-math.pi, math.pi), rng.uniform(-1.5, 1.5))
            assert np.abs(r.T @ r - np.eye(3)).max() < 1e-12
            assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-12)

    def test_matches_finite_difference_tangent_frame(self):
        # numerical tangent frame of the forward transform at the satellite
        lon, lat, alt = SAT.longitude, SAT.latitude, SAT.altitude
        step = 10.0  # metres; balances truncation against float cancellation

        def unit(delta_lon, delta_lat, delta_alt):
            fwd = np.array(
                geodetic_to_ecef_arrays(lon + delta_lon, lat + delta_lat, alt + delta_alt)
            )
            bwd = np.array(
                geodetic_to_ecef_arrays(lon - delta_lon, lat - delta_lat, alt - delta_alt)
            )
            d = fwd - bwd
            return d / np.linalg.norm(d)

        r = ned_to_ecef_rotation(lon, lat)
        assert r[:, 0] == pytest.approx(unit(0.0, step / 6.4e6, 0.0), abs=1e-7)
        assert r[:, 1] == pytest.approx(unit(step / 6.4e6, 0.0, 0.0), abs=1e-7)
        assert r[:, 2] == pytest.approx(unit(0.0, 0.0, -step), abs=1e-10)


class TestEcefToGeodetic:
    def test_round_trip_random_points(self):
        rng = np.random.default_rng(3)
        lon = rng.uniform(-math.pi, math.pi, 10_000)
        lat = rng.uniform(-math.radians(85.0), math.radians(85.0), 10_000)
        alt = rng.uniform(0.0, 2e6, 10_000)
        x, y, z = geodetic_to_ecef_arrays(lon, lat, alt)
        lon2, lat2, alt2, ok = ecef_to_geodetic_arrays(x, y, z)
        assert ok.all()
        assert np.abs(lon2 - lon).max() < 1e-9
        assert np.abs(lat2 - lat).max() < 1e-9
        assert np.abs(alt2 - alt).max() < 1e-6

    def test_matches_closed_form_reference(self):
        rng = np.random.default_rng(4)
        for _ in range(300):
            p = GeodeticPosition(
                rng.uniform(-math.pi, math.pi),
                rng.uniform(-1.4, 1.4),
                rng.uniform(0.0, 1.5e6),
            )
            e = geodetic_to_ecef(p)
            g = ecef_to_geodetic(e)
            lon_ref, lat_ref, alt_ref = ecef_to_geodetic_closed_form(e.x, e.y, e.z)
            assert g.longitude == pytest.approx(lon_ref, abs=1e-9)
            assert g.latitude == pytest.approx(lat_ref, abs=1e-9)
            assert g.altitude == pytest.approx(alt_ref, abs=1e-5)

    def test_non_convergence_carries_last_iterate(self):
        e = geodetic_to_ecef(GeodeticPosition.from_degrees(10.0, 45.0, 1000.0))
        with pytest.raises(ConvergenceError) as err:
            ecef_to_geodetic(e, max_iter=1)
        assert isinstance(err.value.last, GeodeticPosition)
        # one refinement already lands within a few metres of the truth
        assert err.value.last.latitude == pytest.approx(math.radians(45.0), abs=1e-4)


class TestAerToGeodetic:
    def test_nadir_hits_subsatellite_point_equatorial(self):
        sat = GeodeticPosition.from_degrees(10.0, 0.0, 800e3)
        g = aer_to_geodetic(AerPosition(0.3, -math.pi / 2, 800e3), sat)
        assert g.longitude_deg == pytest.approx(10.0, abs=1e-6)
        assert g.latitude_deg == pytest.approx(0.0, abs=1e-6)
        assert abs(g.altitude) < 1.0

    def test_nadir_follows_ellipsoid_normal(self):
        g = aer_to_geodetic(AerPosition(1.234, -math.pi / 2, SAT.altitude), SAT)
        assert g.longitude_deg == pytest.approx(SAT.longitude_deg, abs=1e-9)
        assert g.latitude_deg == pytest.approx(SAT.latitude_deg, abs=1e-9)
        assert abs(g.altitude) < 1e-6

    def test_round_trip_against_ned_decomposition(self):
        # AER recovered from the NED line of sight must map back to the target
        rng = np.random.default_rng(5)
        for _ in range(50):
            target = GeodeticPosition(
                SAT.longitude + rng.uniform(-0.05, 0.05),
                SAT.latitude + rng.uniform(-0.05, 0.05),
                rng.uniform(0.0, 5e3),
            )
            rel = geodetic_to_ecef(target).as_array() - geodetic_to_ecef(SAT).as_array()
            ned = ned_to_ecef_rotation(SAT.longitude, SAT.latitude).T @ rel
            srange = float(np.linalg.norm(ned))
            aer = AerPosition(
                math.atan2(ned[0], ned[1]), -math.asin(ned[2] / srange), srange
            )
            g = aer_to_geodetic(aer, SAT)
            assert g.longitude == pytest.approx(target.longitude, abs=1e-9)
            assert g.latitude == pytest.approx(target.latitude, abs=1e-9)
            assert g.altitude == pytest.approx(target.altitude, abs=1e-5)

    def test_off_nadir_against_closed_form_reference(self):
        aer = AerPosition(math.radians(40.0), math.radians(-65.0), 1.1e6)
        ned = aer_to_ned(aer)
        ecef = geodetic_to_ecef(SAT).as_array() + ned_to_ecef_rotation(
            SAT.longitude, SAT.latitude
        ) @ ned.as_array()
        lon_ref, lat_ref, alt_ref = ecef_to_geodetic_closed_form(*ecef)
        g = aer_to_geodetic(aer, SAT)
        assert g.longitude == pytest.approx(lon_ref, abs=1e-9)
        assert g.latitude == pytest.approx(lat_ref, abs=1e-9)
        assert g.altitude == pytest.approx(alt_ref, abs=1e-5)


class TestHaversine:
    def test_identical_points(self):
        p = GeodeticPosition.from_degrees(17.0, -33.0)
        assert haversine_distance(p, p) == 0.0

    def test_antipodal_on_equator(self):
        a = GeodeticPosition.from_degrees(0.0, 0.0)
        b = GeodeticPosition.from_degrees(180.0, 0.0)
        assert haversine_distance(a, b) == pytest.approx(math.pi * WGS84.mean_radius, rel=1e-12)

    def test_one_degree_arc(self):
        a = GeodeticPosition.from_degrees(0.0, 0.0)
        b = GeodeticPosition.from_degrees(1.0, 0.0)
        # pi/180 * 6371008.8, frozen from exact spherical arc length
        assert haversine_distance(a, b) == pytest.approx(111195.08023353291, rel=1e-12)

    def test_symmetry_and_triangle_inequality(self):
        rng = np.random.default_rng(6)
        for _ in range(200):
            pts = [
                GeodeticPosition(rng.uniform(-math.pi, math.pi), rng.uniform(-1.5, 1.5))
                for _ in range(3)
            ]
            ab = haversine_distance(pts[0], pts[1])
            ba = haversine_distance(pts[1], pts[0])
            assert ab == pytest.approx(ba, rel=1e-12)
            bc = haversine_distance(pts[1], pts[2])
            ac = haversine_distance(pts[0], pts[2])
            assert ac <= ab + bc + 1e-6 * (ab + bc)


class TestGroundDistanceFromPointingError:
    EXPECTED = AerPosition(math.radians(90.0), math.radians(-80.0), 1.0)

    def test_zero_deviation_is_zero(self):
        assert angular_deviation_to_ground_distance(SAT, self.EXPECTED, 0.0, 0.0) == 0.0

    def test_grows_with_altitude(self):
        d_az = math.radians(0.5)
        previous = 0.0
        for alt_km in (800, 1200):
            sat = GeodeticPosition(SAT.longitude, SAT.latitude, alt_km * 1000.0)
            zeta = angular_deviation_to_ground_distance(sat, self.EXPECTED, d_az, 0.0)
            assert zeta > previous
            previous = zeta

    def test_nadir_elevation_deviation_small_angle(self):
        # flat-earth estimate h * tan(dev) for a nadir expected ray
        expected = AerPosition(0.0, -math.pi / 2, 1.0)
        zeta = angular_deviation_to_ground_distance(SAT, expected, 0.0, math.radians(0.5))
        assert zeta == pytest.approx(SAT.altitude * math.tan(math.radians(0.5)), rel=0.05)

    def test_monotone_in_each_deviation(self):
        for axis in ("az", "el"):
            previous = -1.0
            for dev_deg in np.arange(0.0, 1.01, 0.1):
                dev = math.radians(dev_deg)
                zeta = angular_deviation_to_ground_distance(
                    SAT,
                    self.EXPECTED,
                    dev if axis == "az" else 0.0,
                    dev if axis == "el" else 0.0,
                )
                assert zeta >= previous - 1e-9
                previous = zeta

    def test_ray_miss_raises(self):
        with pytest.raises(RayMissError):
            ground_footprint(SAT, 0.0, math.radians(30.0))
        with pytest.raises(RayMissError):
            angular_deviation_to_ground_distance(
                SAT, AerPosition(0.0, math.radians(-5.0), 1.0), 0.0, math.radians(4.9)
            )


class TestValueTypes:
    def test_longitude_wraps(self):
        p = GeodeticPosition(math.radians(190.0), 0.0)
        assert p.longitude_deg == pytest.approx(-170.0)

    def test_latitude_range_enforced(self):
        with pytest.raises(ValueError):
            GeodeticPosition(0.0, 2.0)

    def test_ned_rejects_nan(self):
        with pytest.raises(ValueError):
            NedVector(math.nan, 0.0, 0.0)

    def test_ecef_rejects_inf(self):
        with pytest.raises(ValueError):
            EcefPosition(math.inf, 0.0, 0.0)
