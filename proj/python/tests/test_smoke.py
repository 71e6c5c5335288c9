import math

import numpy as np
import pytest

import loewner_lab as ll


def test_version():
    assert ll.__version__ == "0.1.0"


def test_zero_driving_gives_a_vertical_slit():
    n = 1000
    d = ll.DrivingPath(np.linspace(0.0, 1.0, n + 1), np.zeros(n + 1))
    times, points = ll.trace(d)
    assert len(points) == n + 1
    assert abs(points[-1] - 2j) < 1e-6
    assert ll.forward_map(d, 3j, 1.0)[0] == pytest.approx(1j * math.sqrt(5.0))


def test_sampling_is_deterministic():
    a = ll.sample_sle(6.0, T=0.5, dt=1e-3, seed=4)
    b = ll.sample_sle(6.0, T=0.5, dt=1e-3, seed=4)
    assert np.array_equal(a.values, b.values)
    assert a.times[-1] == pytest.approx(0.5)
    assert ll.sample_sle(4.0, geometry="dipolar", T=0.2, dt=1e-2).geometry == "dipolar"


def test_adaptive_trace_respects_the_gap():
    _, pts = ll.adaptive_trace(6.0, T=0.2, dt=1e-3, seed=1, max_gap=0.02)
    assert np.max(np.abs(np.diff(pts))) <= 0.02 + 1e-12


def test_closed_forms():
    assert ll.cardy_triangle(0.3) == pytest.approx(0.3)
    assert ll.cardy_rectangle(1.0) == pytest.approx(0.5)
    assert ll.hitting_prob(1.0, 2.0, 6.0) == pytest.approx(0.5)
    assert ll.central_charge(6.0) == pytest.approx(0.0)
    assert ll.cft_data(8.0 / 3.0).d_kappa == pytest.approx(4.0 / 3.0)
    assert ll.restriction_prob(1.0, 0.4) == pytest.approx(0.84 ** 0.625)
    z = 0.2 + 1.1j
    total = ll.dipolar_left_prob(z, 6.0) + ll.dipolar_right_prob(z, 6.0) + ll.dipolar_in_prob(z, 6.0)
    assert total == pytest.approx(1.0)
    value, bound = ll.loop_measure_total(np.array([[0.0, 0.5], [0.5, 0.0]]), 1.0, 1.0, 200)
    assert value == pytest.approx(-math.log(0.75))


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        ll.hitting_prob(1.0, 2.0, 3.0)
    with pytest.raises(ll.CuspReached):
        ll.lg_zn_evolve(3, 1.0, 1.0)
    with pytest.raises(ValueError):
        ll.sample_sle(6.0, geometry="elliptic")


def test_lattice_and_growth():
    assert ll.loop_erase("jfmamjjasond") == "jasond"
    v = ll.percolation_interface(12, 12, seed=2)
    assert len(v) > 2
    w = ll.lerw_halfplane(10, seed=1)
    assert w.shape[1] == 2 and w[-1, 1] == 10
    assert ll.dla(30, seed=1).shape == (31, 2)
    cap, boundary = ll.hl_cluster(20, seed=1, boundary_points=100)
    assert cap > 0 and np.all(np.abs(boundary) >= 1.0 - 1e-9)
    R, beta = ll.lg_zn_evolve(3, 1.0, 0.1)
    assert 0 < beta < 1
    t, coeffs, area = ll.lg_evolve([1.0, 0.0, 0.05], 1e-3, 10)
    assert t == pytest.approx(1e-2)


def test_estimators():
    exponent, err, r2 = ll.fit_dimension([(L, L ** 1.5) for L in (4.0, 8.0, 16.0, 32.0)])
    assert exponent == pytest.approx(1.5)
    p, lo, hi = ll.hitting_estimate(6.0, 1.0, 2.0, paths=200, seed=3)
    assert lo <= p <= hi
    counts = ll.dipolar_outcomes(4.0, [1.5j], paths=20, seed=1)
    assert sum(counts[0].values()) == 20
