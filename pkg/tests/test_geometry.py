import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from mmimmo.geometry import (CarrierConfig, GeometryError, LinkGeometry, UlaSpec,
                             compute_num_streams, compute_spacing, condition_ratios,
                             element_positions, pairwise_distances, parallel_link)

LAM = 0.0115305  # 26 GHz, as printed


def test_carrier_wavelength_is_derived():
    c = CarrierConfig(26e9)
    assert c.wavelength == 299_792_458 / 26e9
    assert CarrierConfig(26e9, 3e8).wavelength == 3e8 / 26e9
    with pytest.raises(GeometryError):
        CarrierConfig(0)


@pytest.mark.parametrize("length, dist, expected", [
    (1.3, 0.9, 128),    # link 6
    (0.30, 0.5, 8),     # link 3
    (8.85, 18.7, 256),  # link 7
    (1.85, 17.4, 16),   # link 4
])
def test_num_streams_table_links(length, dist, expected):
    assert compute_num_streams(length, LAM, dist) == expected


def test_num_streams_boundary_is_one():
    assert compute_num_streams(1.0, 0.5, 2.0) == 1
    # exact power of two ratio
    assert compute_num_streams(4.0, 0.5, 2.0) == 16


def test_num_streams_undeployable():
    with pytest.raises(GeometryError, match="no stream"):
        compute_num_streams(0.01, LAM, 10.0)


@pytest.mark.parametrize("dist, n_u, expected", [
    (25.0, 64, 0.0671),
    (17.4, 16, 0.1120),
    (0.5, 8, 0.02685),
])
def test_spacing_table_links(dist, n_u, expected):
    d = compute_spacing(LAM, dist, n_u, 1e-4)
    # printed to 0.1 mm; allow half a printed unit plus one quantum
    assert abs(d - expected) <= 0.5e-4 + 1e-4 / n_u


def test_spacing_link3_exact():
    assert compute_spacing(LAM, 0.5, 8, 1e-4) == pytest.approx(0.02685, abs=1e-12)


def test_spacing_rejects_non_power_of_two():
    with pytest.raises(GeometryError):
        compute_spacing(LAM, 1.0, 12)


@given(st.floats(1e-3, 0.1), st.floats(0.1, 100), st.integers(0, 9), st.floats(1e-5, 1e-2))
def test_spacing_quantized_ceiling(lam, dist, k, step):
    n_u = 2 ** k
    d = compute_spacing(lam, dist, n_u, step)
    ideal = math.sqrt(lam * dist * n_u)
    assert d * n_u >= ideal * (1 - 1e-12)
    assert d * n_u - ideal < step * (1 + 1e-9)


@given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.1, 50), st.floats(0.1, 50))
def test_num_streams_monotone(l1, l2, d1, d2):
    lo_l, hi_l = sorted((l1, l2))
    lo_d, hi_d = sorted((d1, d2))
    try:
        base = compute_num_streams(lo_l, LAM, hi_d)
    except GeometryError:
        return
    assert compute_num_streams(hi_l, LAM, hi_d) >= base
    assert compute_num_streams(lo_l, LAM, lo_d) >= base


def _ula(anchor, axis, n, d):
    return UlaSpec(np.array(anchor, float), np.array(axis, float), n, d, np.array([0, 0, 1.0]))


def test_element_positions_examples():
    assert_array_equal(element_positions(_ula([0, 0, 0], [1, 0, 0], 2, 0.5)),
                       [[0, 0, 0], [0.5, 0, 0]])
    assert_array_equal(element_positions(_ula([3, 2, 1], [1, 0, 0], 1, 0.5)), [[3, 2, 1]])
    assert_allclose(element_positions(_ula([1, 1, 0], [0, 1, 0], 3, 0.1)),
                    [[1, 1, 0], [1, 1.1, 0], [1, 1.2, 0]], atol=1e-15)


@given(st.integers(2, 40), st.floats(1e-3, 1.0))
def test_element_positions_equally_spaced(n, d):
    axis = np.array([1.0, 2.0, 2.0]) / 3.0
    pts = element_positions(UlaSpec(np.zeros(3), axis, n, d, np.array([0, 0, 1.0])))
    steps = np.diff(pts, axis=0)
    assert_allclose(np.linalg.norm(steps, axis=1), d, rtol=1e-12)
    assert_allclose(steps / d, np.broadcast_to(axis, steps.shape), atol=1e-12)


def test_ula_validation():
    with pytest.raises(GeometryError):
        _ula([0, 0, 0], [1, 1, 0], 2, 0.1)
    with pytest.raises(GeometryError):
        _ula([0, 0, 0], [1, 0, 0], 0, 0.1)
    with pytest.raises(GeometryError):
        _ula([0, 0, 0], [1, 0, 0], 2, 0.0)


def test_pairwise_single_pair():
    assert_allclose(pairwise_distances(parallel_link(1, 0.1, 2.0)), [[2.0]])


def test_pairwise_pythagoras():
    g = parallel_link(2, 1.0, 1.0)
    dist = pairwise_distances(g)
    assert dist[0, 1] == pytest.approx(math.sqrt(2))
    assert dist[0, 0] == pytest.approx(1.0)


@given(st.integers(1, 20), st.floats(0.01, 0.5), st.floats(0.1, 30))
def test_pairwise_symmetric_for_aligned_arrays(n, d, dist):
    m = pairwise_distances(parallel_link(n, d, dist))
    assert_allclose(m, m.T, rtol=1e-12)
    assert np.all(m > 0)


def test_pairwise_rejects_coincident_elements():
    a = _ula([0, 0, 0], [1, 0, 0], 2, 0.5)
    b = _ula([0.5, 0, 0], [1, 0, 0], 2, 0.5)
    with pytest.raises(GeometryError, match="coincides"):
        pairwise_distances(LinkGeometry(a, b, 1.0, 1.0))


def test_distance_error_bound():
    a = _ula([0, 0, 0], [1, 0, 0], 2, 0.5)
    b = _ula([0, 0, 1], [1, 0, 0], 2, 0.5)
    LinkGeometry(a, b, 1.0, 1.05, max_distance_error=0.1)
    with pytest.raises(GeometryError):
        LinkGeometry(a, b, 1.0, 1.5, max_distance_error=0.1)


def test_condition_ratios_link4():
    g = parallel_link(16, 0.112, 17.4)
    r = condition_ratios(g, LAM, 16, 1)
    assert round(r.r2) == 10
    assert round(condition_ratios(g, LAM, 16, 2).r2_block) == 19
    # the array was sized to satisfy the length condition
    assert r.r1 == pytest.approx(1.0, abs=0.1)


def test_condition_ratios_one_stream_per_block():
    g = parallel_link(8, 0.02, 0.5)
    assert condition_ratios(g, LAM, 8, 8).r2_block == pytest.approx(0.5 / 0.02)


def test_condition_ratios_rejects_bad_blocks():
    with pytest.raises(GeometryError):
        condition_ratios(parallel_link(8, 0.02, 0.5), LAM, 8, 3)
