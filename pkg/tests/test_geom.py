import numpy as np
import pytest

from auramimo.geom import (
    angles_from_vector,
    clip_elevation_deg,
    rotate_azimuth,
    unit_from_angles,
    wrap_azimuth_deg,
)


@pytest.mark.parametrize(
    "raw,expected",
    [(190.0, -170.0), (-180.0, 180.0), (180.0, 180.0), (540.0, 180.0), (0.0, 0.0)],
)
def test_wrap_azimuth(raw, expected):
    assert wrap_azimuth_deg(raw) == expected


def test_wrap_azimuth_array():
    out = wrap_azimuth_deg(np.array([-190.0, 170.0]))
    np.testing.assert_allclose(out, [170.0, 170.0])


def test_clip_elevation():
    assert clip_elevation_deg(95.0) == 90.0
    assert clip_elevation_deg(-95.0) == -90.0
    assert clip_elevation_deg(12.5) == 12.5


def test_unit_from_angles_axes():
    np.testing.assert_allclose(unit_from_angles(0.0, 0.0), [1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(unit_from_angles(90.0, 0.0), [0, 1, 0], atol=1e-15)
    np.testing.assert_allclose(unit_from_angles(0.0, 90.0), [0, 0, 1], atol=1e-15)


def test_angles_from_vector_round_trip():
    rng = np.random.default_rng(3)
    for _ in range(100):
        az = rng.uniform(-179.9, 180.0)
        el = rng.uniform(-89.9, 89.9)
        got_az, got_el = angles_from_vector(unit_from_angles(az, el))
        assert got_az == pytest.approx(az, abs=1e-9)
        assert got_el == pytest.approx(el, abs=1e-9)


def test_angles_from_zero_vector():
    assert angles_from_vector(np.zeros(3)) == (0.0, 0.0)


def test_rotate_azimuth_quarter_turn():
    np.testing.assert_allclose(
        rotate_azimuth(np.array([1.0, 0.0, 2.0]), 90.0), [0, 1, 2], atol=1e-15
    )
    # Rotation preserves length and z.
    v = np.array([3.0, -4.0, 5.0])
    w = rotate_azimuth(v, 37.0)
    assert np.linalg.norm(w) == pytest.approx(np.linalg.norm(v))
    assert w[2] == v[2]
