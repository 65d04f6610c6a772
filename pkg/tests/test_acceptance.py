"""The nine acceptance criteria, each at its stated tolerance.

Every test records its outcome with ``record_criterion`` so that the
terminal summary prints one PASS/FAIL line per criterion.
"""
import numpy as np
import pytest

from dconfocal import discrete as D
from dconfocal import lowdim
from dconfocal import verify as V

W2 = [(-5, -1), (-1, 6)]
W3 = [(-8, -4), (-4, -1), (-1, 8)]


@pytest.fixture(scope="module")
def net2():
    params = D.DiscreteParams((5, 1))
    return D.DiscreteNet(params), D.window_points(params, W2, (0, 1))


@pytest.fixture(scope="module")
def net3():
    params = D.DiscreteParams((8, 4, 1))
    return D.DiscreteNet(params), D.window_points(params, W3, (0, 1))


@pytest.fixture(scope="module")
def suites2(net2):
    return V.verify_net(*net2)


@pytest.fixture(scope="module")
def suites3(net3):
    return V.verify_net(*net3)


def _check(suites, names, limits=None):
    """(all ok, worst residual text); ``limits`` overrides the suite's own tolerance."""
    limits = limits or {}
    ok, parts = True, []
    for name in names:
        s = suites[name]
        tol = limits.get(name, s["tolerance"])
        good = s["count"] > 0 and s["max_residual"] <= tol
        ok &= good
        parts.append(f"{name}={s['max_residual']:.1e}")
    return ok, " ".join(parts)


def test_criterion_1_specfun(record_criterion):
    s = V.specfun_suites(tol=1e-12)
    ok = all(v["pass"] for v in s.values())
    errs = [V.scaling_limit_error(2.0, 10.0 ** -k) for k in range(1, 5)]
    ok &= all(q < p for p, q in zip(errs, errs[1:]))
    detail = f"difference={s['specfun_difference']['max_residual']:.1e} product={s['specfun_product']['max_residual']:.1e}"
    record_criterion(1, "specfun identities", ok, detail)
    assert ok, s


def test_criterion_2_continuous(record_criterion):
    ok, parts = True, []
    for a in ((2, 1), (3, 2, 1)):
        s = V.continuous_suites(a, tol=1e-10, roundtrip_tol=1e-9)
        ok &= all(v["pass"] for v in s.values())
        ok &= s["continuous_epd_order"]["max_residual"] >= 50
        worst = max(v["max_residual"] for k, v in s.items() if k not in ("continuous_epd_order",))
        parts.append(f"a={a}: worst={worst:.1e} epd_ratio={s['continuous_epd_order']['max_residual']:.0f}")
    record_criterion(2, "continuous confocal coordinates", ok, "; ".join(parts))
    assert ok


def test_criterion_3_discrete_n2(record_criterion, suites2):
    names = ["depd", "orthogonality", "conic_pp", "conic_pm", "tau_commutativity",
             "tau_propagation", "isothermic_ratio"]
    limits = {"depd": 1e-10, "orthogonality": 1e-12, "conic_pp": 1e-11, "conic_pm": 1e-11,
              "tau_commutativity": 1e-12, "tau_propagation": 1e-10, "isothermic_ratio": 1e-10}
    ok, detail = _check(suites2, names, limits)
    spot = V.spot_value_2d()
    ok &= spot <= 1e-10
    record_criterion(3, "discrete N=2 suite", ok, f"{detail} spot={spot:.1e}")
    assert ok


def test_criterion_4_discrete_n3(record_criterion, suites3):
    limits = {"depd": 1e-10, "orthogonality": 1e-10, "quadric_shifted": 1e-10, "scalar": 1e-11,
              "radial": 1e-11, "scaling_consistency": 1e-14}
    ok, detail = _check(suites3, list(limits), limits)
    P = lowdim.Params3D(8, 4, 1)
    ok &= abs(P.D_sq[0] - P.D_sq[1] + P.D_sq[2]) <= 1e-14
    record_criterion(4, "discrete N=3 suite", ok, detail)
    assert ok


def test_criterion_5_koenigs(record_criterion, net2, net3, suites2, suites3):
    worst = max(suites2["koenigs_multiratio"]["max_residual"], suites3["koenigs_multiratio"]["max_residual"])
    counts = suites2["koenigs_multiratio"]["count"] + suites3["koenigs_multiratio"]["count"]
    nu_rel = max(V.nu_relations_suite(2)["max_residual"], V.nu_relations_suite(3)["max_residual"])
    # negative control on the planar net: noise keeps every quad planar, so the
    # star is still defined and only the Koenigs property is destroyed
    net, pts = net2
    rng = np.random.default_rng(7)
    values = {p: net(p) + 1e-3 * rng.standard_normal(2) for p in pts}
    ctrl = V.discrete_suites(D.DiscreteNet(net.params, values), pts)["koenigs_multiratio"]
    bad = ctrl["max_residual"]
    ok = counts > 0 and worst <= 1e-8 and nu_rel <= 1e-12 and ctrl["count"] > 0 and bad > 1e-6
    record_criterion(5, "Koenigs certification", ok,
                     f"multiratio={worst:.1e} ({counts} stars) nu_relations={nu_rel:.1e} perturbed={bad:.1e}")
    assert ok


def test_criterion_6_mesh(record_criterion):
    s = V.mesh_suites(D.DiscreteParams((8, 4, 1)), W3, tol_planar=1e-10, tol_angle=1e-8)
    ok = all(v["pass"] and v["count"] > 0 for v in s.values())
    detail = " ".join(f"{k}={v['max_residual']:.1e}" for k, v in s.items())
    record_criterion(6, "mesh planarity, dual facets, OBJ reload", ok, detail)
    assert ok


def test_criterion_7_umbilics(record_criterion):
    s = V.umbilic_suites(lowdim.Params3D(8, 4, 1), tol=1e-10)
    ok = all(v["pass"] for v in s.values()) and s["umbilic_boundary_zeros"]["max_residual"] == 0.0
    detail = " ".join(f"{k}={v['max_residual']:.1e}" for k, v in s.items())
    record_criterion(7, "umbilics on focal conics", ok, detail)
    assert ok


def test_criterion_8_continuum(record_criterion):
    d10, d100 = V.continuum_deviation(10), V.continuum_deviation(100)
    ok = d100 < d10
    record_criterion(8, "continuum trend", ok, f"L=10: {d10:.3e} L=100: {d100:.3e}")
    assert ok


def test_criterion_9_icnet(record_criterion):
    s = V.icnet_suites(seed_eps=1e-3)
    limits = {"icnet_rhombic_ii_v": 1e-10, "icnet_rhombic_dual_conic": 1e-8, "icnet_solver_pitot": 1e-10,
              "icnet_solved_ii_v": 1e-6, "icnet_solved_vi": 1e-5}
    ok, detail = _check(s, list(limits), limits)
    ok &= s["icnet_solved_vi"]["pass"]
    record_criterion(9, "IC-net theorem and solver", ok, detail)
    assert ok
