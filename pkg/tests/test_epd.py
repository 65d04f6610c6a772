import itertools
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dconfocal import discrete as D
from dconfocal import epd
from dconfocal.errors import DomainError, SingularStencilError
from dconfocal.geometry import diagonal_intersection, directed_ratio, planarity_residual, vertex_star_multiratio

NET2 = D.DiscreteNet(D.DiscreteParams((5, 1)))


def window_at(net, n, i, j, size=2):
    p = D.as_point(n)
    w = epd.NetWindow((i, j), origin=(p.n[i], p.n[j]))
    for a in range(size):
        for b in range(size):
            w.values[a, b] = net(p.shift(i, a).shift(j, b))
    return w


def test_confocal_eps():
    P = epd.EpdParams.confocal(3)
    assert P.gamma == 0.5
    assert P.eps[0] - P.eps[1] == 0.5
    assert P.eps[0] - P.eps[2] == 1.0


def test_depd_on_confocal_face():
    P = epd.EpdParams.confocal(2)
    assert epd.depd_residual(window_at(NET2, (-3, 1), 0, 1), P) < 1e-12


def test_depd_detects_wrong_gamma():
    w = window_at(NET2, (-3, 1), 0, 1)
    assert epd.depd_residual(w, epd.EpdParams(0.4, (-0.5, -1.0))) > 1e-4


def test_depd_zero_denominator():
    w = epd.NetWindow((0, 1), {(0, 0): [0, 0], (1, 0): [1, 0], (0, 1): [0, 1], (1, 1): [1, 1]}, origin=(0.5, 0.0))
    with pytest.raises(SingularStencilError):
        epd.depd_residual(w, epd.EpdParams(0.5, (0.0, 0.5)))


def test_koenigs_nu_values():
    mpmath.mp.dps = 30
    # arguments (m + de + 3/2)/2 = 5/2 and (m + de + 1/2)/2 = 2
    ref = mpmath.gamma(mpmath.mpf(2.5)) / mpmath.gamma(mpmath.mpf(2))
    assert epd.koenigs_nu(3, 0.5) == pytest.approx(float(ref), rel=1e-13)
    with pytest.raises(DomainError):
        epd.koenigs_nu(-5, 0.5)


@given(st.integers(min_value=2, max_value=60), st.sampled_from([0.5, 1.0, 1.5]))
def test_nu_relations(m, de):
    r1, r2 = epd.nu_relation_residuals(m, de)
    assert r1 < 1e-12 and r2 < 1e-12


def test_depd_coefficients_sign():
    A, B = epd.depd_coefficients(2.0)
    assert A == -0.25 and B == 0.25
    assert epd.diagonal_split_ratios(A, B) == pytest.approx(((1.25) / 0.75, 1.0))


def test_koenigs_equation_on_net():
    for n in [(-3, 1), (-4, 0), (-2.5, 0.5)]:
        assert epd.koenigs_equation_residual(window_at(NET2, n, 0, 1), epd.EpdParams.confocal(2)) < 1e-12


def test_koenigs_compatibility_identity():
    # coefficients generated by a common nu must be compatible
    mu = lambda m: epd.koenigs_nu(m, 0.5)
    def coeffs(m):
        return epd.koenigs_coefficients(mu(m), mu(m + 1), mu(m - 1), mu(m))
    A = [[coeffs(4)[0], coeffs(3)[0]], [coeffs(5)[0], coeffs(4)[0]]]
    B = [[coeffs(4)[1], coeffs(3)[1]], [coeffs(5)[1], coeffs(4)[1]]]
    assert epd.koenigs_compatibility(A, B) < 1e-12


def test_diagonal_split_matches_geometry():
    p = D.as_point((-3, 1))
    x, xi, xj, xij = NET2(p), NET2(p.shift(0)), NET2(p.shift(1)), NET2(p.shift(0).shift(1))
    M = diagonal_intersection([x, xi, xij, xj])
    d = (p.n[0] - 0.5) - (p.n[1] - 1.0)
    A, B = epd.depd_coefficients(d)
    r1, r2 = epd.diagonal_split_ratios(A, B)
    assert directed_ratio(xi, M, xj) == pytest.approx(r1, rel=1e-10)
    assert directed_ratio(x, M, xij) == pytest.approx(r2, rel=1e-10)


def test_multiratio_on_net_and_perturbed():
    p = D.as_point((-3, 2))
    get = lambda a, b: NET2(p.shift(0, a).shift(1, b))
    assert abs(vertex_star_multiratio(get, 0, 0) - 1) < 1e-10
    bumped = lambda a, b: get(a, b) + (np.array([1e-3, 0.0]) if (a, b) == (1, 0) else 0.0)
    assert abs(vertex_star_multiratio(bumped, 0, 0) - 1) > 1e-6


def test_multiratio_square_grid():
    get = lambda a, b: np.array([a, b], dtype=float)
    assert vertex_star_multiratio(get, 0, 0) == pytest.approx(1.0)


def test_planarity_examples():
    assert planarity_residual([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]]) < 1e-15
    r = planarity_residual([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])
    # |det| = 1, edges 1, sqrt2, sqrt2, 1
    assert r == pytest.approx(1 / ((2 + 2 * math.sqrt(2)) / 4) ** 3)


def test_separable_rho_discrete():
    mpmath.mp.dps = 30
    assert epd.separable_rho_discrete(3, 0.0) == pytest.approx(float(mpmath.gamma(3.5) / mpmath.gamma(3)), rel=1e-13)
    # left branch argument -n - shift - gamma + 1 = 3.5
    assert epd.separable_rho_discrete(-3, 0.0, branch="left") == pytest.approx(
        float(mpmath.gamma(4) / mpmath.gamma(3.5)), rel=1e-13)
    with pytest.raises(DomainError):
        epd.separable_rho_discrete(-3, 0.0)
