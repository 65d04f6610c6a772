"""Identity suites over nets and parameter sets.

Every suite returns a plain dict {max_residual, tolerance, pass, count,
skipped} so results can be dumped straight into a JSON report.  Stencils that
leave the net (or hit a vanishing denominator) are counted as skipped, never
as passes.
"""
from dataclasses import dataclass, field
import itertools
import math

import numpy as np

from . import continuous as C
from . import discrete as D
from . import epd
from . import icnet
from . import lowdim
from . import mesh
from .errors import DomainError, GeometryError, SingularStencilError
from .specfun import dsqrt, pochhammer

SKIPPABLE = (DomainError, SingularStencilError, GeometryError)


@dataclass
class Suite:
    name: str
    tolerance: float
    residuals: list = field(default_factory=list)
    skipped: int = 0

    def add(self, value):
        self.residuals.append(float(value))

    def attempt(self, fn):
        try:
            self.add(fn())
        except SKIPPABLE:
            self.skipped += 1

    def report(self):
        mx = max(self.residuals) if self.residuals else 0.0
        ok = bool(self.residuals) and mx <= self.tolerance and math.isfinite(mx)
        return {"max_residual": mx, "tolerance": self.tolerance, "pass": ok,
                "count": len(self.residuals), "skipped": self.skipped}


def rel(a, b):
    return abs(a - b) / max(1.0, abs(b))


# --- special functions -----------------------------------------------------------

def specfun_suites(tol=1e-12):
    grid = np.arange(0.25, 50.0 + 1e-9, 0.25)
    e3 = Suite("specfun_difference", tol)
    e4 = Suite("specfun_product", tol)
    for u in grid:
        e3.add(abs(dsqrt(u + 1) - dsqrt(u) - 0.5 / dsqrt(u + 0.5)))
        e4.add(abs(dsqrt(u) * dsqrt(u + 0.5) - u) / max(1.0, u))
    lim = Suite("specfun_scaling_limit", 0.0)
    for u in (1.0, 2.0, 5.0):
        errs = [scaling_limit_error(u, 10.0 ** -k) for k in range(1, 5)]
        # residual = number of non-decreasing steps
        lim.add(sum(1 for p, q in zip(errs, errs[1:]) if not q < p))
    return {s.name: s.report() for s in (e3, e4, lim)}


def scaling_limit_error(u, eps, gamma=0.5):
    return abs(eps ** gamma * pochhammer(u / eps, gamma) - u ** gamma)


# --- continuous ------------------------------------------------------------------

def continuous_suites(a, counts=None, tol=1e-10, roundtrip_tol=1e-9, seed=0):
    params = C.ContinuousParams(tuple(a))
    N = params.N
    counts = counts or [6] * N
    pts = C.sample_grid(params, counts)
    av = np.asarray(params.a)
    S = {name: Suite(name, t) for name, t in [
        ("continuous_quadric", tol), ("continuous_squares", tol), ("continuous_sphere", tol),
        ("continuous_radial", tol), ("continuous_orthogonality", tol), ("continuous_roundtrip", roundtrip_tol),
        ("continuous_speed", tol)]}
    for u in pts:
        x = C.eval_continuous(params, u)
        for i in range(N):
            S["continuous_quadric"].add(abs(np.sum(x * x / (av + u[i])) - 1.0))
        for k in range(N):
            sq = np.prod(u + av[k]) / np.prod([av[k] - av[i] for i in range(N) if i != k])
            S["continuous_squares"].add(rel(x[k] ** 2, sq))
        S["continuous_sphere"].add(abs(np.sum(x * x) - np.sum(u + av)))
        J = C.first_derivatives(params, u)
        for i in range(N):
            S["continuous_radial"].add(abs(x @ J[i] - 0.5))
            S["continuous_speed"].add(rel(J[i] @ J[i], C.speed_squared_closed_form(params, u, i)))
            for j in range(i + 1, N):
                S["continuous_orthogonality"].add(abs(J[i] @ J[j]))
        S["continuous_roundtrip"].add(np.max(np.abs(C.invert_continuous(params, x) - u)))
    out = {s.name: s.report() for s in S.values()}
    out["continuous_epd_order"] = epd_fd_order(params)
    return out


def default_fd_point(params):
    """A point well inside the box: midpoints of the bounded intervals, -a_N + 1 last."""
    a = params.a
    u = [0.5 * (-a[k] - a[k + 1]) for k in range(params.N - 1)] + [-a[-1] + 1.0]
    return np.array(u)


def epd_fd_order(params, u=None, h_big=1e-3, h_small=1e-4, min_ratio=50.0):
    """Ratio of EPD finite-difference residuals at two steps; O(h^2) decay gives ~100."""
    u = default_fd_point(params) if u is None else u
    worst = math.inf
    for i, j in itertools.combinations(range(params.N), 2):
        r1 = C.epd_residual_continuous(params, u, i, j, h_big)
        r2 = C.epd_residual_continuous(params, u, i, j, h_small)
        worst = min(worst, r1 / r2 if r2 > 0 else math.inf)
    return {"max_residual": float(worst), "tolerance": min_ratio, "pass": bool(worst >= min_ratio),
            "count": params.N * (params.N - 1) // 2, "skipped": 0, "note": "residual is the min decay ratio"}


# --- discrete nets -----------------------------------------------------------------

def _eps(params):
    return epd.EpdParams.confocal(params.N)


def depd_face_residual(net, p, i, j, gamma=0.5):
    eps = _eps(net.params).eps
    n = p.n
    d = (n[i] + eps[i]) - (n[j] + eps[j])
    if d == 0:
        raise SingularStencilError("vanishing dEPD denominator")
    x, xi, xj, xij = net(p), net(p.shift(i)), net(p.shift(j)), net(p.shift(i).shift(j))
    di, dj = xi - x, xj - x
    return float(np.linalg.norm(xij - xi - xj + x - gamma / d * (dj - di)))


def koenigs_face_residual(net, p, i, j):
    """Defect of the Darboux equation with A, B generated from nu = mu(n_i - n_j)."""
    eps = _eps(net.params).eps
    window = epd.NetWindow((i, j), origin=(p.n[i], p.n[j]))
    for a, b in [(0, 0), (1, 0), (0, 1), (1, 1)]:
        window.values[a, b] = net(p.shift(i, a).shift(j, b))
    return epd.koenigs_equation_residual(window, epd.EpdParams(0.5, eps), (0, 0))


def star_multiratio(net, p, i, j):
    get = lambda a, b: net(p.shift(i, a).shift(j, b))
    return abs(epd.vertex_star_multiratio(get, 0, 0) - 1.0)


def discrete_suites(net, points, tols=None):
    """Identity suites common to every N, on the given lattice points."""
    net = D.as_net(net)
    params = net.params
    N = params.N
    t = {"depd": 1e-10, "orthogonality": 1e-12, "quadric": 1e-10, "product": 1e-10,
         "scalar": 1e-11, "radial": 1e-11, "factorization": 1e-10, "koenigs_multiratio": 1e-8,
         "koenigs_nu": 1e-10, "planarity": 1e-10}
    t.update(tols or {})
    S = {k: Suite(k, v) for k, v in t.items()}
    signs = list(itertools.product((1, -1), repeat=N))
    pairs = [(i, j) for i in range(N) for j in range(N) if i != j]
    for p in points:
        for i, j in pairs:
            if i < j:
                S["depd"].attempt(lambda: depd_face_residual(net, p, i, j))
                S["koenigs_nu"].attempt(lambda: koenigs_face_residual(net, p, i, j))
                S["koenigs_multiratio"].attempt(lambda: star_multiratio(net, p, i, j))
                S["planarity"].attempt(lambda: mesh.planarity_residual(
                    [net(p), net(p.shift(i)), net(p.shift(i).shift(j)), net(p.shift(j))]))
            S["orthogonality"].attempt(lambda: _ortho_scaled(net, p, i, j))
            S["factorization"].attempt(lambda: _factorization(net, p, i, j))
        for s in signs:
            for k in range(N):
                S["product"].attempt(lambda: rel(*D.product_identity(net, p, s, k)))
                S["quadric"].attempt(lambda: D.quadric_residual(net, p, s, k))
                if s[k] == -1:
                    S["radial"].attempt(lambda: abs(D.radial_identity(net, p, s, k) - 0.5))
            S["scalar"].attempt(lambda: abs(np.subtract(*D.scalar_identity(net, p, s))))
    return {k: s.report() for k, s in S.items()}


def _ortho_scaled(net, p, i, j):
    """|<u, v>| / max(1, |u||v|): absolute for small edges, relative for long ones."""
    _, pi, q, qj = D.ortho_stencil(p, i, j)
    u = net(pi) - net(p)
    v = net(qj) - net(q)
    return abs(float(u @ v)) / max(1.0, float(np.linalg.norm(u) * np.linalg.norm(v)))


def _factorization(net, p, i, j):
    _, lhs, rhs = D.factorization_check(net, p, i, j)
    return rel(lhs, rhs)


def nu_relations_suite(N, m_range=range(-20, 21), tol=1e-12):
    s = Suite("koenigs_nu_relations", tol)
    for i, j in itertools.combinations(range(N), 2):
        de = 0.5 * (j - i)
        for m in m_range:
            try:
                s.add(max(epd.nu_relation_residuals(m, de)))
            except SKIPPABLE:
                s.skipped += 1
    return s.report()


# --- N = 2 and N = 3 specifics --------------------------------------------------------

def lowdim2_suites(net, points, tol=1e-10):
    net = D.as_net(net)
    al, be = net.params.alpha
    P = lowdim.Params2D(al, be)
    S = {k: Suite(k, v) for k, v in [("conic_pp", 1e-11), ("conic_pm", 1e-11), ("tau_commutativity", 1e-12),
                                      ("tau_propagation", tol), ("isothermic_ratio", tol), ("closed_form_2d", 1e-12)]}
    pset = set(points)
    for p in points:
        S["conic_pp"].attempt(lambda: max(lowdim.conic_relations_2d(P, p, "pp", net)))
        S["conic_pm"].attempt(lambda: max(lowdim.conic_relations_2d(P, p, "pm", net)))
        S["isothermic_ratio"].attempt(lambda: _iso2(P, p, net))
        if net.values is None:
            S["closed_form_2d"].attempt(lambda: np.max(np.abs(lowdim.eval_2d(P, p) - net(p))))

        def comm():
            x = net(p)
            if np.any(x == 0) or p.half_shift((1, 1)) not in pset or p.half_shift((1, -1)) not in pset:
                raise SingularStencilError("boundary")
            return lowdim.tau_commutator(P, x, p) / max(1.0, float(np.max(np.abs(x))))
        S["tau_commutativity"].attempt(comm)
    interior = [p for p in points if np.all(net(p) > 0)]
    if interior:
        seed = min(interior, key=lambda q: (sum(abs(v) for v in q.m), q.m))
        vals = lowdim.tau_propagate(P, seed, net(seed), pset)
        for q, v in vals.items():
            S["tau_propagation"].add(np.max(np.abs(v - net(q))))
        S["tau_propagation"].skipped += len(pset) - len(vals)
    out = {k: s.report() for k, s in S.items()}
    if net.values is not None:
        out.pop("closed_form_2d")
    return out


def _iso2(P, p, net):
    lhs, rhs = lowdim.isothermic_ratio_2d(P, p, net)
    return abs(lhs - rhs) / max(1.0, abs(rhs))


def spot_value_2d():
    """x(-1, 0) for alpha = (5, 1) against 4 sqrt(2/7)."""
    x = D.eval_discrete(D.DiscreteParams((5, 1)), (-1, 0))
    return abs(x[0] - 4.0 * math.sqrt(2.0 / 7.0)) + abs(x[1])


def lowdim3_suites(net, points, tol=1e-10):
    net = D.as_net(net)
    P = lowdim.Params3D(*net.params.alpha)
    S = {k: Suite(k, v) for k, v in [("quadric_shifted", tol), ("closed_form_3d", 1e-12),
                                      ("closed_form_derivatives", 1e-12)]}
    signs = list(itertools.product((1, -1), repeat=3))
    deltas = (lowdim.delta1_3d, lowdim.delta2_3d, lowdim.delta3_3d)
    for p in points:
        for s in signs:
            S["quadric_shifted"].attempt(lambda: max(lowdim.quadric_relations_3d(P, p, s, net)))
        if net.values is None:
            S["closed_form_3d"].attempt(lambda: np.max(np.abs(lowdim.eval_3d(P, p) - net(p))))
            for k, fn in enumerate(deltas):
                S["closed_form_derivatives"].attempt(
                    lambda: np.max(np.abs(fn(P, p) - D.discrete_derivative(net, p, k))))
    out = {k: s.report() for k, s in S.items()}
    if net.values is not None:
        out.pop("closed_form_3d")
        out.pop("closed_form_derivatives")
    cons = Suite("scaling_consistency", 1e-14)
    for v in lowdim.scaling_consistency_3d(P):
        cons.add(abs(v))
    out["scaling_consistency"] = cons.report()
    return out


def umbilic_suites(P, n3_max=8, tol=1e-10):
    hyp = Suite("umbilic_focal_hyperbola", tol)
    ell = Suite("umbilic_focal_ellipse", tol)
    zeros = Suite("umbilic_boundary_zeros", 0.0)
    ns, pts = lowdim.umbilic_curve_ellipsoid(P, n3_max)
    for t in ns[:-1]:
        hyp.add(lowdim.focal_hyperbola_residual(P, t))
    zeros.add(abs(pts[0][2]))
    zeros.add(float(np.max(np.abs(pts[:, 1]))))
    ns, pts = lowdim.umbilic_curve_hyperboloid(P)
    for t in ns[:-1]:
        ell.add(lowdim.focal_ellipse_residual(P, t))
    zeros.add(abs(pts[0][0]))
    zeros.add(abs(pts[-1][1]))
    zeros.add(float(np.max(np.abs(pts[:, 2]))))
    return {s.name: s.report() for s in (hyp, ell, zeros)}


def mesh_suites(params, window, tol_planar=1e-10, tol_angle=1e-8):
    """Planarity of every layer n_N = const (and its duals) plus edge/dual-facet angles."""
    net = D.DiscreteNet(params)
    planar = Suite("mesh_planarity", tol_planar)
    angle = Suite("mesh_edge_dual_facet", tol_angle)
    roundtrip = Suite("mesh_obj_roundtrip", 0.0)
    N = params.N
    fixed = N - 1
    lo, hi = window[fixed]
    free = [w for k, w in enumerate(window) if k != fixed]
    for m in range(2 * lo, 2 * hi + 1):
        try:
            msh = mesh.surface_mesh(params, fixed, m / 2, free, net)
        except DomainError:
            planar.skipped += 1
            continue
        for r in msh.planarity():
            planar.add(r)
        verts, faces = mesh.load_obj(mesh.export_obj(msh))
        same = np.array_equal(np.asarray(verts)[:, :N], np.asarray(msh.vertices)) and faces == msh.faces
        roundtrip.add(0.0 if same else 1.0)
    angles, skipped = mesh.edge_facet_angles(net, D.window_points(params, window))
    for a in angles:
        angle.add(a)
    angle.skipped += skipped
    return {s.name: s.report() for s in (planar, angle, roundtrip)}


# --- continuum trend -----------------------------------------------------------------

def continuum_deviation(L, base=(5, 1), t1=(-4.5, -3.5, -2.5, -1.5), t2=(0.5, 1.5, 3.0, 5.0)):
    """Max relative deviation between x_discrete(n) and x_continuous(u) over n = round(L t)."""
    params = D.DiscreteParams(tuple(L * b for b in base))
    cp = C.ContinuousParams(params.identified_a)
    worst = 0.0
    for s1 in t1:
        for s2 in t2:
            n = (round(L * s1), round(L * s2))
            u = [n[i] - 0.5 * (i + 1) for i in range(2)]
            xd = D.eval_discrete(params, n)
            xc = C.eval_continuous(cp, u)
            worst = max(worst, float(np.linalg.norm(xd - xc) / np.linalg.norm(xc)))
    return worst


def continuum_suite(Ls=(10, 100)):
    devs = [continuum_deviation(L) for L in Ls]
    dec = all(q < p for p, q in zip(devs, devs[1:]))
    return {"max_residual": devs[-1], "tolerance": devs[0], "pass": bool(dec), "count": len(devs),
            "skipped": 0, "deviations": dict(zip(map(str, Ls), devs))}


# --- IC-nets --------------------------------------------------------------------------

def icnet_suites(seed_eps=1e-3, seed=0):
    out = {}
    base = icnet.rhombic_grid(8)
    rep = icnet.verify_icnet_theorem(icnet.build_icnet(base), tol=1e-10, conic_tol=1e-8)
    ii_v = max(v for k, v in rep["residuals"].items() if k[:2] in ("ii", "iv", "v_") or k.startswith("iii"))
    out["icnet_rhombic_ii_v"] = _pack(ii_v, 1e-10)
    out["icnet_rhombic_dual_conic"] = _pack(rep["residuals"]["i_dual_conic"], 1e-8)
    solved = icnet.icnet_solve(icnet.perturb_grid(base, seed_eps, seed), tol=1e-10)
    out["icnet_solver_pitot"] = _pack(solved.residual, 1e-10)
    data = icnet.build_icnet(solved.grid)
    rep = icnet.verify_icnet_theorem(data, tol=1e-6)
    ii_v = max(v for k, v in rep["residuals"].items() if k[:2] in ("ii", "iv", "v_") or k.startswith("iii"))
    out["icnet_solved_ii_v"] = _pack(ii_v, 1e-6)
    fac = icnet.factorization_numerical(data, tol=1e-5)
    out["icnet_solved_vi"] = _pack(fac["rank1_residual"], 1e-5, fac["sign_consistent"])
    return out


def _pack(value, tol, extra_ok=True):
    value = float(value)
    return {"max_residual": value, "tolerance": tol, "pass": bool(value <= tol and extra_ok),
            "count": 1, "skipped": 0}


# --- whole-net driver -----------------------------------------------------------------

def verify_net(net, points=None, window=None):
    """Every suite that applies to a net of the given dimension."""
    net = D.as_net(net)
    params = net.params
    if points is None:
        points = net.points() if net.values is not None else D.window_points(params, window)
    out = discrete_suites(net, points)
    if params.N == 2:
        out.update(lowdim2_suites(net, points))
    elif params.N == 3:
        out.update(lowdim3_suites(net, points))
    return out


def all_passed(suites):
    return all(s["pass"] for s in suites.values())
