import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from mmimmo.antenna import (ISOTROPIC, DipoleOnGround, DirectionalComposite, PatternError,
                            Sampled, array_factor, gain, local_angles)

Z = np.array([0.0, 0.0, 1.0])
X = np.array([1.0, 0.0, 0.0])


def _unit(v):
    v = np.asarray(v, float)
    return v / np.linalg.norm(v)


def test_isotropic():
    assert gain(ISOTROPIC, _unit([1, 2, 3]), Z) == 1.0
    assert_allclose(ISOTROPIC.gain(np.tile(X, (4, 1)), Z), np.ones(4))


def test_dipole_boresight_and_perpendicular():
    p = DipoleOnGround(1)
    assert p.gain(Z, Z) == 1.0
    assert p.gain(X, Z) == pytest.approx(0.0, abs=1e-15)
    assert p.gain(-Z, Z) == 0.0


def test_dipole_exponent():
    d = _unit([1, 0, 1])
    assert DipoleOnGround(2).gain(d, Z) == pytest.approx(0.5)


def test_non_unit_rejected():
    with pytest.raises(PatternError):
        ISOTROPIC.gain(np.array([1.0, 1.0, 0.0]), Z)
    with pytest.raises(PatternError):
        ISOTROPIC.gain(Z, np.array([0.0, 0.0, 2.0]))


def test_array_factor_examples():
    assert array_factor(5, 1.5, 0.0) == pytest.approx(5.0)
    assert array_factor(1, 0.7, 1.1) == pytest.approx(1.0)
    assert array_factor(2, 0.5, math.pi / 2) == pytest.approx(0.0, abs=1e-15)


@given(st.integers(1, 12), st.floats(0.1, 3.0), st.floats(-math.pi, math.pi))
def test_array_factor_bounded(n, s, theta):
    assert array_factor(n, s, theta) <= n + 1e-9


def test_directional_composite_on_boresight():
    p = DirectionalComposite()
    assert p.gain(Z, Z) == pytest.approx(5.0)
    # product of base and array factor off boresight
    d = _unit([0.2, 0.0, 1.0])
    theta = math.acos(d @ Z)
    assert p.gain(d, Z) == pytest.approx((d @ Z) * array_factor(5, 1.5, theta))


def _grid():
    az = np.linspace(-math.pi, math.pi, 9)[:-1]
    el = np.linspace(-math.pi / 2, math.pi / 2, 5)
    table = np.add.outer(np.arange(az.size), 10 * np.arange(el.size)).astype(float)
    return az, el, table


def _direction(az, el):
    # boresight +x, up +z frame
    return np.array([math.cos(el) * math.cos(az), math.cos(el) * math.sin(az), math.sin(el)])


def test_sampled_reproduces_nodes():
    az, el, table = _grid()
    p = Sampled(az, el, table)
    for i in range(az.size):
        for j in range(1, el.size - 1):
            assert p.gain(_direction(az[i], el[j]), X) == pytest.approx(table[i, j], abs=1e-9)


def test_sampled_midpoint_is_mean():
    az, el, table = _grid()
    p = Sampled(az, el, table)
    mid = 0.5 * (az[3] + az[4])
    assert p.gain(_direction(mid, el[2]), X) == pytest.approx(0.5 * (table[3, 2] + table[4, 2]))


def test_sampled_azimuth_wraps():
    az, el, table = _grid()
    p = Sampled(az, el, table)
    # halfway between the last sample (3pi/4) and +pi == -pi (first sample)
    mid = 0.5 * (az[-1] + math.pi)
    assert p.gain(_direction(mid, 0.0), X) == pytest.approx(0.5 * (table[-1, 2] + table[0, 2]))


def test_sampled_continuity():
    az, el, table = _grid()
    p = Sampled(az, el, table)
    d0 = _direction(0.3, 0.2)
    d1 = _direction(0.3 + 1e-6, 0.2)
    assert abs(p.gain(d0, X) - p.gain(d1, X)) < 1e-3


def test_dipole_continuity():
    p = DipoleOnGround(1.5)
    for a in np.linspace(0.1, 1.4, 7):
        d0 = _direction(a, 0.0)
        d1 = _direction(a + 1e-6, 0.0)
        assert abs(p.gain(d0, X) - p.gain(d1, X)) < 1e-3


def test_sampled_validation():
    az, el, table = _grid()
    with pytest.raises(PatternError):
        Sampled(az, el, -table)
    with pytest.raises(PatternError):
        Sampled(az[1:], el, table[1:])  # does not start at -pi
    with pytest.raises(PatternError):
        Sampled(az, el, table[:, :-1])


def test_sampled_csv_round_trip(tmp_path):
    az, el, table = _grid()
    p = Sampled(az, el, table)
    path = tmp_path / "pattern.csv"
    p.to_csv(path)
    q = Sampled.from_csv(path)
    assert_allclose(q.table, table)
    assert_allclose(q.azimuth, az)


def test_sampled_csv_incomplete(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("az_rad,el_rad,gain\n-3.141592653589793,-1.5707963267948966,1\n"
                    "-3.141592653589793,1.5707963267948966,1\n0,-1.5707963267948966,1\n")
    with pytest.raises(PatternError, match="incomplete"):
        Sampled.from_csv(path)


def test_local_angles_frame():
    az, el = local_angles(np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]), X)
    assert_allclose(az[0], math.pi / 2)
    assert_allclose(el[1], math.pi / 2)
