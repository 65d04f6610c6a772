import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dconfocal import continuous as C
from dconfocal import discrete as D
from dconfocal.errors import DomainError, ParameterError, SingularStencilError

P2 = D.DiscreteParams((5, 1))
P3 = D.DiscreteParams((8, 4, 1))
NET2 = D.DiscreteNet(P2)
NET3 = D.DiscreteNet(P3)
W2 = [(-5, -1), (-1, 6)]
W3 = [(-8, -4), (-4, -1), (-1, 8)]


def test_params_validation():
    with pytest.raises(ParameterError):
        D.DiscreteParams((1, 5))
    with pytest.raises(ParameterError):
        D.DiscreteParams((5.5, 1))
    with pytest.raises(ParameterError):
        D.DiscreteParams((5,))


def test_scaling_constants_2d():
    # D_1^-2 = D_2^-2 = alpha - beta - 1/2
    assert P2.D[0] == pytest.approx(1 / math.sqrt(3.5))
    assert P2.D[1] == pytest.approx(1 / math.sqrt(3.5))


def test_scaling_constants_3d():
    # the general-N formula reproduces the N=3 relative scaling (2.5 : 6 : 3.5) / 52.5
    np.testing.assert_allclose(np.square(P3.D), np.array([2.5, 6.0, 3.5]) / 52.5, rtol=1e-14)


def test_point_parity():
    with pytest.raises(DomainError):
        D.HalfLatticePoint((1, 2))
    p = D.HalfLatticePoint.from_n((-2.5, 0.5))
    assert p.dual and p.n == (-2.5, 0.5)


def test_spot_values_against_oracle():
    # 30-digit gamma-function oracle, frozen
    np.testing.assert_allclose(D.eval_discrete(P2, (-1, 0)), [2.1380899352993951, 0.0], rtol=1e-14, atol=0)
    assert D.eval_discrete(P2, (-1, 0))[0] == pytest.approx(4 * math.sqrt(2 / 7), abs=1e-10)
    np.testing.assert_allclose(D.eval_discrete(P2, (-3, 1)), [1.6290209030852534, 0.9445791984540266], rtol=1e-14)
    np.testing.assert_allclose(D.eval_discrete(P2, (-2.5, 1.5)), [1.9292920900553135, 0.9074335519411451], rtol=1e-14)
    np.testing.assert_allclose(D.eval_discrete(P3, (-6, -3, 2)),
                               [1.7708673045932572, 0.9130647853121467, 1.1768030136819887], rtol=1e-14)
    np.testing.assert_allclose(D.eval_discrete(P3, (-5.5, -2.5, 0.5)),
                               [1.9285344320098501, 0.8344476472655682, 0.6373199178453795], rtol=1e-14)


def test_domain_errors():
    with pytest.raises(DomainError):
        D.eval_discrete(P2, (0, 0))
    with pytest.raises(DomainError):
        D.eval_discrete(P2, (-6, 0))


def test_boundary_zeros():
    assert D.eval_discrete(P2, (-5, 2))[0] == 0.0
    assert D.eval_discrete(P2, (-1, 2))[1] == 0.0


def test_product_identity_exact_fractions():
    # x1(n) x1(n + f/2) = (n1 + 5)(n2 + 4.5)/3.5 at n = (-3, 1): 2 * 5.5 / 3.5 = 22/7
    lhs, rhs = D.product_identity(NET2, (-3, 1), (1, 1), 0)
    assert rhs == pytest.approx(float(Fraction(22, 7)), rel=1e-15)
    assert lhs == pytest.approx(rhs, rel=1e-13)
    lhs, rhs = D.product_identity(NET2, (-3, 1), (1, 1), 1)
    # (n1 + 1.5)(n2 + 1)/(-3.5) = (-1.5)(2)/(-3.5) = 6/7
    assert rhs == pytest.approx(float(Fraction(6, 7)), rel=1e-15)
    assert lhs == pytest.approx(rhs, rel=1e-13)


def test_wrong_scaling_breaks_orthogonality():
    bad = D.DiscreteNet(P2.with_scaling((1.0, 0.5)))
    assert D.orthogonality_residual_discrete(bad, (-3, 1), 0, 1) > 1e-3
    assert D.orthogonality_residual_discrete(NET2, (-3, 1), 0, 1) < 1e-12


def test_quadric_singular():
    # i = 1, k = 1 denominator n1 + alpha1 - (1 - sigma)/4 vanishes at n1 = -5, sigma1 = +1
    with pytest.raises(SingularStencilError):
        D.quadric_residual(NET2, (-5, 1), (1, 1), 0)


def interior3():
    return [p for p in D.window_points(P3, W3) if np.all(NET3(p) > 0)]


@pytest.mark.parametrize("sigma", list(itertools.product((1, -1), repeat=3)))
def test_quadric_and_scalar_3d(sigma):
    checked = 0
    for p in D.window_points(P3, W3):
        try:
            for i in range(3):
                assert D.quadric_residual(NET3, p, sigma, i) < 1e-12
            lhs, rhs = D.scalar_identity(NET3, p, sigma)
        except DomainError:
            continue
        assert lhs == pytest.approx(rhs, abs=1e-11)
        checked += 1
    assert checked > 10


def test_radial_identity():
    for p in interior3()[:20]:
        for i in range(3):
            s = [1, 1, 1]
            s[i] = -1
            try:
                assert D.radial_identity(NET3, p, s, i) == pytest.approx(0.5, abs=1e-12)
            except DomainError:
                pass
    with pytest.raises(DomainError):
        D.radial_identity(NET3, (-6, -3, 2), (1, 1, 1), 0)


def test_orthogonality_all_pairs():
    hits = 0
    for p in D.window_points(P3, W3, parities=(0, 1)):
        for i, j in itertools.permutations(range(3), 2):
            try:
                assert D.orthogonality_residual_discrete(NET3, p, i, j) < 1e-12
                hits += 1
            except DomainError:
                pass
    assert hits > 100


def test_factorization_against_closed_forms():
    p = D.as_point((-6, -3, 2))
    for i, j in itertools.permutations(range(3), 2):
        gi, gj = D.factorization_products(NET3, p, i, j)
        ci, cj = D.factorization_closed_forms(P3, p, i, j)
        assert gi == pytest.approx(ci, rel=1e-12)
        assert gj == pytest.approx(cj, rel=1e-12)
        _, lhs, rhs = D.factorization_check(NET3, p, i, j)
        assert lhs == pytest.approx(rhs, rel=1e-11)


def test_factorization_n4_all_ordered_pairs():
    params = D.DiscreteParams((9, 6, 3, 1))
    net = D.DiscreteNet(params)
    pts = D.window_points(params, [(-9, -6), (-6, -3), (-3, -1), (-1, 3)], (0,))
    hits = 0
    for p in pts:
        for i, j in itertools.permutations(range(4), 2):
            try:
                _, lhs, rhs = D.factorization_check(net, p, i, j)
            except (DomainError, SingularStencilError):
                continue
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))
            hits += 1
    assert hits > 50


def test_squares_match_continuous_under_identification():
    for p in interior3()[:30]:
        for s in itertools.product((1, -1), repeat=3):
            try:
                lhs = D.product_rhs(P3, p, s, 0)
            except DomainError:
                continue
            assert lhs == pytest.approx(D.continuous_squares_identified(P3, p, s, 0), rel=1e-12)


def test_identified_scaling_matches_continuous():
    np.testing.assert_allclose(P3.D, C.continuous_scaling_constants(C.ContinuousParams(P3.identified_a)), rtol=1e-14)


@given(st.integers(min_value=-4, max_value=-1), st.integers(min_value=0, max_value=20),
       st.sampled_from([(1, 1), (1, -1), (-1, 1), (-1, -1)]))
@settings(max_examples=60)
def test_quadric_2d_property(n1, n2, sigma):
    try:
        for i in range(2):
            assert D.quadric_residual(NET2, (n1, n2), sigma, i) < 1e-11
    except DomainError:
        pass


def test_window_points_and_json_roundtrip():
    pts = D.window_points(P2, W2, parities=(0, 1))
    assert len(pts) == 5 * 8 + 4 * 7
    net = D.net_from_json(D.net_to_json(P2, pts))
    for p in pts:
        np.testing.assert_array_equal(net(p), NET2(p))
    with pytest.raises(DomainError):
        net((-3, 7))


@pytest.mark.parametrize("text", ["{", "{}", '{"N": 2, "alpha": [5, 1], "points": [{"m2": [1, 2], "x": [0, 0]}]}',
                                  '{"N": 3, "alpha": [5, 1], "points": []}'])
def test_net_from_json_malformed(text):
    with pytest.raises(ParameterError):
        D.net_from_json(text)


def test_parse_window():
    assert D.parse_window("-5:-1,-1:6") == [(-5, -1), (-1, 6)]
    with pytest.raises(DomainError):
        D.parse_window("3:1")
    with pytest.raises(DomainError):
        D.parse_window("a:b")
