import itertools
import json
import math

import numpy as np
import pytest

from dconfocal import discrete as D
from dconfocal import lowdim as L
from dconfocal.errors import DomainError, ParameterError, SingularStencilError

P2 = L.Params2D(5, 1)
P3 = L.Params3D(8, 4, 1)
G2 = D.DiscreteParams((5, 1))
G3 = D.DiscreteParams((8, 4, 1))


def pts2(parities=(0, 1)):
    return D.window_points(G2, [(-5, -1), (-1, 6)], parities)


def pts3(parities=(0, 1)):
    return D.window_points(G3, [(-8, -4), (-4, -1), (-1, 8)], parities)


def test_params():
    assert P2.D1 ** 2 == pytest.approx(1 / 3.5)
    with pytest.raises(ParameterError):
        L.Params2D(1, 5)
    with pytest.raises(ParameterError):
        L.Params3D(8, 1, 4)
    assert (P3.a, P3.b, P3.c) == (8.5, 5.0, 2.5)
    assert P3.D_squared == pytest.approx(1 / 52.5)
    np.testing.assert_allclose(P3.D_sq, np.array([2.5, 6.0, 3.5]) / 52.5, rtol=1e-15)


def test_closed_forms_cross_validate():
    for p in pts2():
        np.testing.assert_allclose(L.eval_2d(P2, p), D.eval_discrete(G2, p), rtol=0, atol=1e-12)
    for p in pts3():
        np.testing.assert_allclose(L.eval_3d(P3, p), D.eval_discrete(G3, p), rtol=0, atol=1e-12)


def test_derivative_closed_forms():
    net2, net3 = D.DiscreteNet(G2), D.DiscreteNet(G3)
    hits = 0
    for p in pts2():
        for k, fn in enumerate((L.delta1_2d, L.delta2_2d)):
            try:
                np.testing.assert_allclose(fn(P2, p), D.discrete_derivative(net2, p, k), atol=1e-12)
                hits += 1
            except DomainError:
                pass
    for p in pts3():
        for k, fn in enumerate((L.delta1_3d, L.delta2_3d, L.delta3_3d)):
            try:
                np.testing.assert_allclose(fn(P3, p), D.discrete_derivative(net3, p, k), atol=1e-12)
                hits += 1
            except DomainError:
                pass
    assert hits > 200


def test_tau_step_example():
    n = (-3, 1)
    x = L.eval_2d(P2, n)
    nxt = L.tau_step_2d(P2, x, n, "pp")
    assert nxt[0] == pytest.approx((22 / 7) / x[0], rel=1e-14)
    np.testing.assert_allclose(nxt, L.eval_2d(P2, (-2.5, 1.5)), rtol=1e-12)


def test_tau_refuses_zero_component():
    with pytest.raises(SingularStencilError):
        L.tau_step_2d(P2, L.eval_2d(P2, (-5, 1)), (-5, 1), "pp")


def test_tau_commutativity():
    count = 0
    for n1 in range(-4, -1):
        for n2 in range(0, 6):
            x = L.eval_2d(P2, (n1, n2))
            assert L.tau_commutator(P2, x, (n1, n2)) < 1e-12
            count += 1
    assert count >= 18


def test_tau_propagation_reconstructs_net():
    allowed = set(D.window_points(G2, [(-4, -2), (0, 4)]))
    seed = D.as_point((-3, 2))
    vals = L.tau_propagate(P2, seed, L.eval_2d(P2, seed), allowed)
    assert len(vals) == len(allowed)
    for p, v in vals.items():
        np.testing.assert_allclose(v, L.eval_2d(P2, p), atol=1e-10)


def test_conic_relations():
    assert max(L.conic_relations_2d(P2, (-3, 1), "pp")) < 1e-12
    assert max(L.conic_relations_2d(P2, (-3, 1), "pm")) < 1e-12
    with pytest.raises(SingularStencilError):
        L.conic_relations_2d(P2, (-5, 1), "pp")


def test_isothermic_ratio():
    lhs, rhs = L.isothermic_ratio_2d(P2, (-3, 1))
    assert lhs == pytest.approx(rhs, rel=1e-10)
    for n1 in (-4, -3):
        for n2 in range(0, 5):
            lhs, rhs = L.isothermic_ratio_2d(P2, (n1, n2))
            assert rhs > 0
            assert abs(lhs - rhs) <= 1e-10 * max(1, abs(rhs))


def test_isothermic_continuum_anchor():
    # under a = alpha + 1/2, b = beta + 1, u_i = n_i - i/2 the discrete ratio tends to the smooth one
    devs = []
    for Lsc in (10, 100):
        P = L.Params2D(5 * Lsc, Lsc)
        n = (-3 * Lsc, 2 * Lsc)
        _, rhs = L.isothermic_ratio_2d(P, n)
        cont = L.isothermic_ratio_continuous_2d(P.alpha + 0.5, P.beta + 1, n[0] - 0.5, n[1] - 1)
        devs.append(abs(rhs / cont - 1))
    assert devs[1] < devs[0]


@pytest.mark.parametrize("sigma", list(itertools.product((1, -1), repeat=3)))
def test_quadric_relations_3d(sigma):
    net = D.DiscreteNet(G3)
    hits = 0
    for p in pts3():
        try:
            r = L.quadric_relations_3d(P3, p, sigma)
        except DomainError:
            continue
        assert max(r) < 1e-10
        # same identity through the general-N path
        for i in range(3):
            assert abs(D.quadric_residual(net, p, sigma, i) - r[i]) < 1e-12
        hits += 1
    assert hits > 20


def test_scaling_consistency():
    for v in L.scaling_consistency_3d(P3):
        assert abs(v) < 1e-14
    assert P3.D_sq[0] - P3.D_sq[1] + P3.D_sq[2] == pytest.approx(0, abs=1e-14)


def test_orthogonality_system():
    for p in pts3(parities=(0,)):
        for v in L.orthogonality_system_3d(P3, p):
            assert abs(v) < 1e-12


def test_umbilic_ellipsoid():
    ns, pts = L.umbilic_curve_ellipsoid(P3, 8)
    assert ns[0] == -1 and ns[-1] == 8 and len(ns) == 19
    assert pts[0][2] == 0.0 and np.all(pts[:, 1] == 0.0)
    for t in ns[:-1]:
        assert L.focal_hyperbola_residual(P3, t) < 1e-10
    with pytest.raises(DomainError):
        L.umbilic_point_ellipsoid(P3, -1.5)


def test_umbilic_matches_net():
    for t in (-1, 0.5, 3):
        p = (-4, -4, t) if float(t).is_integer() else (-4.5, -4.5, t)
        if float(t).is_integer():
            np.testing.assert_allclose(L.umbilic_point_ellipsoid(P3, t), D.eval_discrete(G3, p), atol=1e-12)
    for t in (-8, -6, -4):
        np.testing.assert_allclose(L.umbilic_point_hyperboloid(P3, t), D.eval_discrete(G3, (t, -1, -1)), atol=1e-12)


def test_umbilic_hyperboloid():
    ns, pts = L.umbilic_curve_hyperboloid(P3)
    assert ns[0] == -8 and ns[-1] == -4
    assert pts[0][0] == 0.0 and pts[-1][1] == 0.0
    for t in ns[:-1]:
        assert L.focal_ellipse_residual(P3, t) < 1e-10


def test_focal_continuum_trend():
    devs = []
    for Lsc in (10, 100):
        P = L.Params3D(8 * Lsc, 4 * Lsc, Lsc)
        devs.append(L.focal_hyperbola_continuum_residual(P, 3 * Lsc))
    assert devs[1] < devs[0]


def test_polyline_json():
    _, pts = L.umbilic_curve_hyperboloid(P3)
    doc = json.loads(L.polyline_json("focal_ellipse", pts))
    assert doc["kind"] == "focal_ellipse" and len(doc["points"]) == len(pts)
    with pytest.raises(ValueError):
        L.polyline_json("circle", pts)
