"""Incircular (IC) nets: line grids whose elementary quads all have incircles.

Indexing: rows[i] and cols[j] meet at f[i, j].  The quad (i, j) has vertices
(f[i,j], f[i+1,j], f[i+1,j+1], f[i,j+1]) and sides on cols[j], rows[i+1],
cols[j+1], rows[i].  Its incenter is omega[i, j].

The two diagonal subnets of omega are keyed by integer pairs (k, l):

    eta[k, l]       = omega[k - l, k + l]        (i + j even)
    eta_tilde[k, l] = omega[k - l, k + l + 1]    (i + j odd)

so eta_tilde[k, l] plays the role of the half-shifted point (k+1/2, l+1/2)
of one combined net on Z^2 and its dual lattice.
"""
from dataclasses import dataclass, field
import json
import math

import numpy as np

from .errors import GeometryError, ParameterError, SolverError
from .geometry import interior_angle, multiratio

PITOT_RTOL = 1e-9
THEOREM_TOL = 1e-6


@dataclass(frozen=True)
class Line2D:
    """Line {a x + b y = c} with unit normal (a, b)."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if abs(self.a * self.a + self.b * self.b - 1.0) > 1e-14:
            raise ParameterError(f"line normal ({self.a}, {self.b}) is not a unit vector")

    @classmethod
    def from_normal(cls, a, b, c):
        s = math.hypot(a, b)
        if s == 0.0:
            raise ParameterError("zero line normal")
        return cls(a / s, b / s, c / s)

    @classmethod
    def from_angle(cls, theta, c):
        return cls(math.cos(theta), math.sin(theta), c)

    @property
    def normal(self):
        return np.array([self.a, self.b])

    @property
    def direction(self):
        return np.array([-self.b, self.a])

    def signed_distance(self, p):
        return float(self.a * p[0] + self.b * p[1] - self.c)

    def homogeneous(self):
        """Unit-norm homogeneous line coordinates (a, b, -c)."""
        v = np.array([self.a, self.b, -self.c])
        return v / np.linalg.norm(v)


@dataclass
class LineGrid:
    rows: list
    cols: list

    def __post_init__(self):
        if len(self.rows) < 2 or len(self.cols) < 2:
            raise ParameterError("a line grid needs at least two rows and two columns")

    @property
    def shape(self):
        return len(self.rows), len(self.cols)

    def to_json(self):
        enc = lambda ls: [[l.a, l.b, l.c] for l in ls]
        return json.dumps({"rows": enc(self.rows), "cols": enc(self.cols)})

    @classmethod
    def from_json(cls, text):
        try:
            obj = json.loads(text)
            rows = [Line2D.from_normal(*map(float, r)) for r in obj["rows"]]
            cols = [Line2D.from_normal(*map(float, c)) for c in obj["cols"]]
        except (ValueError, KeyError, TypeError) as exc:
            raise ParameterError(f"malformed line-grid JSON: {exc}") from None
        return cls(rows, cols)


def intersect(l1, l2):
    A = np.array([[l1.a, l1.b], [l2.a, l2.b]])
    det = np.linalg.det(A)
    if abs(det) < 1e-12:
        raise GeometryError("parallel or identical lines")
    return np.linalg.solve(A, [l1.c, l2.c])


def build_vertices(grid):
    """f[i, j] = rows[i] n cols[j] as an (R, C, 2) array."""
    R, C = grid.shape
    f = np.empty((R, C, 2))
    for i in range(R):
        for j in range(C):
            f[i, j] = intersect(grid.rows[i], grid.cols[j])
    return f


def order_violations(grid, f):
    """Lines along which the vertices are not in strictly monotone order."""
    bad = []
    for i, line in enumerate(grid.rows):
        t = f[i, :] @ line.direction
        d = np.diff(t)
        if not (np.all(d > 0) or np.all(d < 0)):
            bad.append(("row", i))
    for j, line in enumerate(grid.cols):
        t = f[:, j] @ line.direction
        d = np.diff(t)
        if not (np.all(d > 0) or np.all(d < 0)):
            bad.append(("col", j))
    return bad


def _is_convex(quad):
    q = np.asarray(quad, dtype=float)
    s = []
    for k in range(4):
        u = q[(k + 1) % 4] - q[k]
        v = q[(k + 2) % 4] - q[(k + 1) % 4]
        s.append(u[0] * v[1] - u[1] * v[0])
    return all(v > 0 for v in s) or all(v < 0 for v in s)


def pitot_signed(quad):
    q = np.asarray(quad, dtype=float)
    e = [np.linalg.norm(q[(k + 1) % 4] - q[k]) for k in range(4)]
    return (e[0] + e[2]) - (e[1] + e[3]), sum(e)


def check_tangential(quad, rtol=PITOT_RTOL):
    """(is_tangential, pitot_residual, reason)."""
    res, perim = pitot_signed(quad)
    res = abs(res)
    if not _is_convex(quad):
        return False, res, "non-convex quad"
    if res > rtol * perim:
        return False, res, "pitot sums differ"
    return True, res, ""


def quad_vertices(f, i, j):
    return np.array([f[i, j], f[i + 1, j], f[i + 1, j + 1], f[i, j + 1]])


def quad_sides(grid, i, j):
    return [grid.cols[j], grid.rows[i + 1], grid.cols[j + 1], grid.rows[i]]


def incircle(sides, quad, rtol=PITOT_RTOL):
    """Center and radius of the circle tangent to the four side lines, center inside.

    The center is the intersection of the bisectors at the corners on sides
    (3, 0) and (0, 1); the fourth side is then checked.
    """
    ok, res, why = check_tangential(quad, rtol)
    if not ok:
        err = GeometryError(f"quad has no incircle ({why}, pitot residual {res:.3e})")
        err.pitot_residual = res
        raise err
    g = np.mean(quad, axis=0)
    rows, rhs = [], []
    for line in sides:
        s = 1.0 if line.signed_distance(g) > 0 else -1.0
        rows.append([s * line.a, s * line.b, -1.0])
        rhs.append(s * line.c)
    A, b = np.array(rows), np.array(rhs)
    sol = np.linalg.solve(A[[3, 0, 1]], b[[3, 0, 1]])
    center, r = sol[:2], sol[2]
    if r <= 0:
        raise GeometryError("incircle radius is not positive")
    dev = abs(A[2] @ sol - b[2])
    if dev > 1e-9 * r:
        raise GeometryError(f"fourth side not tangent (deviation {dev:.3e})")
    return center, float(r)


@dataclass
class ICNetData:
    grid: LineGrid
    f: np.ndarray
    omega: np.ndarray
    radii: np.ndarray
    eta: dict = field(default_factory=dict)
    eta_tilde: dict = field(default_factory=dict)
    tangency: float = 0.0
    pitot: float = 0.0


def dual_subnets(omega):
    """Split the omega grid into (eta, eta_tilde) dicts keyed by (k, l)."""
    eta, eta_t = {}, {}
    for i in range(omega.shape[0]):
        for j in range(omega.shape[1]):
            if (i + j) % 2 == 0:
                eta[(i + j) // 2, (j - i) // 2] = omega[i, j]
            else:
                eta_t[(i + j - 1) // 2, (j - i - 1) // 2] = omega[i, j]
    return eta, eta_t


def build_icnet(grid, rtol=PITOT_RTOL):
    f = build_vertices(grid)
    bad = order_violations(grid, f)
    if bad:
        raise GeometryError(f"order not preserved along {bad[:4]}")
    R, C = grid.shape
    omega = np.empty((R - 1, C - 1, 2))
    radii = np.empty((R - 1, C - 1))
    worst_t = worst_p = 0.0
    for i in range(R - 1):
        for j in range(C - 1):
            quad = quad_vertices(f, i, j)
            worst_p = max(worst_p, abs(pitot_signed(quad)[0]))
            omega[i, j], radii[i, j] = incircle(quad_sides(grid, i, j), quad, rtol)
            for line in quad_sides(grid, i, j):
                d = abs(line.signed_distance(omega[i, j]))
                worst_t = max(worst_t, abs(d - radii[i, j]) / radii[i, j])
    eta, eta_t = dual_subnets(omega)
    return ICNetData(grid, f, omega, radii, eta, eta_t, worst_t, worst_p)


def max_pitot(grid):
    f = build_vertices(grid)
    R, C = grid.shape
    return max(abs(pitot_signed(quad_vertices(f, i, j))[0]) for i in range(R - 1) for j in range(C - 1))


# --- theorem checks ------------------------------------------------------------

def _line_meet(p, q, r, s):
    """Intersection of line pq with line rs in the plane."""
    d1, d2 = q - p, s - r
    A = np.array([[d1[0], -d2[0]], [d1[1], -d2[1]]])
    if abs(np.linalg.det(A)) < 1e-14 * (np.linalg.norm(d1) * np.linalg.norm(d2)):
        raise GeometryError("parallel diagonals")
    t, _ = np.linalg.solve(A, r - p)
    return p + t * d1


def _quads(net):
    for (k, l) in net:
        keys = [(k, l), (k + 1, l), (k + 1, l + 1), (k, l + 1)]
        if all(key in net for key in keys):
            yield (k, l), [net[key] for key in keys]


def _stars(net):
    for (k, l) in net:
        keys = [(k + 1, l), (k, l + 1), (k - 1, l), (k, l - 1)]
        if all(key in net for key in keys):
            yield (k, l), net[k, l], [net[key] for key in keys]


def _mean_edge(net):
    e = [np.linalg.norm(net[k + 1, l] - net[k, l]) for (k, l) in net if (k + 1, l) in net]
    e += [np.linalg.norm(net[k, l + 1] - net[k, l]) for (k, l) in net if (k, l + 1) in net]
    return float(np.mean(e)) if e else 1.0


def diagonal_residuals(net, other, shift):
    """Distance of other[(k,l) + shift] to the diagonal intersection of net's quad (k,l)."""
    scale = _mean_edge(net)
    out = []
    for (k, l), (p0, p1, p2, p3) in _quads(net):
        key = (k + shift[0], l + shift[1])
        if key not in other:
            continue
        m = _line_meet(p0, p2, p1, p3)
        out.append(np.linalg.norm(m - other[key]) / scale)
    return out


def circular_residuals(net):
    out = []
    for _, q in _quads(net):
        ang = [interior_angle(q[k - 1], q[k], q[(k + 1) % 4]) for k in range(4)]
        out += [abs(ang[0] + ang[2] - math.pi), abs(ang[1] + ang[3] - math.pi)]
    return out


def conical_residuals(net):
    out = []
    for _, c, nb in _stars(net):
        th = [interior_angle(nb[k], c, nb[(k + 1) % 4]) for k in range(4)]
        out += [abs(th[0] + th[2] - math.pi), abs(th[1] + th[3] - math.pi)]
    return out


def dual_edge_cosines(omega):
    """|cos| between the two diagonals of every 2x2 block of omega (one edge of each subnet)."""
    out = []
    for i in range(omega.shape[0] - 1):
        for j in range(omega.shape[1] - 1):
            u = omega[i + 1, j + 1] - omega[i, j]
            v = omega[i, j + 1] - omega[i + 1, j]
            out.append(abs(u @ v) / (np.linalg.norm(u) * np.linalg.norm(v)))
    return out


def _star_with(net, diag, c_key, diag_keys):
    k, l = c_key
    nb = [net[k + 1, l], net[k, l + 1], net[k - 1, l], net[k, l - 1]]
    ms = [diag[key] for key in diag_keys]
    return [nb[0], ms[0], nb[1], ms[1], nb[2], ms[2], nb[3], ms[3]]


def subnet_multiratios(net, other, offset):
    """Koenigs multi-ratio minus 1 at interior stars of ``net``.

    The diagonal point of net's quad (k, l) is other[(k, l) + offset].
    """
    out = []
    ox, oy = offset
    for (k, l), _, _ in _stars(net):
        keys = [(k + ox, l + oy), (k - 1 + ox, l + oy), (k - 1 + ox, l - 1 + oy), (k + ox, l - 1 + oy)]
        if not all(key in other for key in keys):
            continue
        star = _star_with(net, other, (k, l), keys)
        out.append(abs(multiratio(star) - 1.0))
    return out


def omega_multiratios(omega, f):
    """Multi-ratio minus 1 for omega itself; the diagonal points are the vertices f."""
    out = []
    for i in range(1, omega.shape[0] - 1):
        for j in range(1, omega.shape[1] - 1):
            star = [omega[i + 1, j], f[i + 1, j + 1], omega[i, j + 1], f[i, j + 1],
                    omega[i - 1, j], f[i, j], omega[i, j - 1], f[i + 1, j]]
            out.append(abs(multiratio(star) - 1.0))
    return out


def dual_conic_fit(lines):
    """Fit a dual conic C (l^T C l = 0) to homogeneous line coordinates.

    Returns (C, max residual) with ||C||_F-normalized coefficient vector.
    """
    L = np.array([line.homogeneous() for line in lines])
    if L.shape[0] < 5:
        raise GeometryError("need at least five lines for a dual conic")
    a, b, w = L[:, 0], L[:, 1], L[:, 2]
    M = np.stack([a * a, a * b, b * b, a * w, b * w, w * w], axis=1)
    _, _, vt = np.linalg.svd(M)
    c = vt[-1]
    C = np.array([[c[0], c[1] / 2, c[3] / 2], [c[1] / 2, c[2], c[4] / 2], [c[3] / 2, c[4] / 2, c[5]]])
    return C, float(np.max(np.abs(M @ c)))


def _mx(vals):
    return float(max(vals)) if vals else 0.0


def verify_icnet_theorem(data, tol=THEOREM_TOL, conic_tol=1e-8):
    """Residuals of properties (i)-(v) plus structural checks; see module docstring."""
    if data.omega.ndim != 3 or data.omega.shape[0] < 2 or data.omega.shape[1] < 2:
        raise GeometryError("omega grid must be at least 2x2")
    eta, eta_t = data.eta, data.eta_tilde
    res = {
        "pitot": data.pitot,
        "incircle_tangency": data.tangency,
        "ii_diagonals": _mx(diagonal_residuals(eta, eta_t, (0, 0)) + diagonal_residuals(eta_t, eta, (1, 1))),
        "iii_circular": _mx(circular_residuals(eta) + circular_residuals(eta_t)),
        "iii_conical": _mx(conical_residuals(eta) + conical_residuals(eta_t)),
        "iv_orthogonality": _mx(dual_edge_cosines(data.omega)),
        "v_koenigs_eta": _mx(subnet_multiratios(eta, eta_t, (0, 0))),
        "v_koenigs_eta_tilde": _mx(subnet_multiratios(eta_t, eta, (1, 1))),
        "v_koenigs_omega": _mx(omega_multiratios(data.omega, data.f)),
    }
    _, res["i_dual_conic"] = dual_conic_fit(list(data.grid.rows) + list(data.grid.cols))
    checks = {k: (v <= tol) for k, v in res.items() if k not in ("pitot", "i_dual_conic")}
    perim = _mean_edge({(i, j): data.f[i, j] for i in range(data.f.shape[0]) for j in range(data.f.shape[1])})
    checks["pitot"] = data.pitot <= PITOT_RTOL * 4 * perim
    checks["i_dual_conic"] = res["i_dual_conic"] <= conic_tol
    res = {k: float(v) for k, v in res.items()}
    checks = {k: bool(v) for k, v in checks.items()}
    return {"residuals": res, "pass": checks, "ok": all(checks.values())}


def icnet_report(grid, tol=THEOREM_TOL, conic_tol=1e-8, with_factorization=True):
    """Full report for a line grid; a grid that is not an IC-net yields ok=False."""
    try:
        data = build_icnet(grid)
    except GeometryError as exc:
        return {"ok": False, "error": str(exc), "pitot": float(max_pitot(grid))}
    rep = verify_icnet_theorem(data, tol, conic_tol)
    if with_factorization and min(data.omega.shape[:2]) >= 4:
        rep["vi_factorization"] = factorization_numerical(data)
    return rep


# --- property (vi) -------------------------------------------------------------

def combined_net(omega):
    """x on doubled coordinates: x[2k, 2l] = eta[k, l], x[2k+1, 2l+1] = eta_tilde[k, l]."""
    eta, eta_t = dual_subnets(omega)
    x = {(2 * k, 2 * l): p for (k, l), p in eta.items()}
    x.update({(2 * k + 1, 2 * l + 1): p for (k, l), p in eta_t.items()})
    return x


def factorization_quotients(omega):
    """Q(k, l) = <D1 x(n), D1 x(n+f/2)> / <D2 x(n-e2+f/2), D2 x(n-e2+f)> at n = (k, l)."""
    x = combined_net(omega)
    out = {}
    for (m1, m2) in list(x):
        if m1 % 2:
            continue
        keys = [(m1, m2), (m1 + 2, m2), (m1 + 1, m2 + 1), (m1 + 3, m2 + 1),
                (m1 + 1, m2 - 1), (m1 + 1, m2 + 1), (m1 + 2, m2), (m1 + 2, m2 + 2)]
        if not all(k in x for k in keys):
            continue
        p = [x[k] for k in keys]
        top = (p[1] - p[0]) @ (p[3] - p[2])
        bot = (p[5] - p[4]) @ (p[7] - p[6])
        if bot == 0.0 or top == 0.0:
            continue
        out[m1 // 2, m2 // 2] = top / bot
    return out


def factorization_quotient_residual(omega):
    """(rank-1 residual of log|Q|, sign-consistent flag, number of quotients)."""
    Q = factorization_quotients(omega)
    ks = sorted({k for k, _ in Q})
    ls = sorted({l for _, l in Q})
    if len(ks) < 2 or len(ls) < 2:
        raise GeometryError("too few factorization quotients for a separability test")
    L = {key: math.log(abs(v)) for key, v in Q.items()}
    worst = 0.0
    for (k, l) in L:
        for (k0, l0) in L:
            if (k, l0) in L and (k0, l) in L:
                worst = max(worst, abs(L[k, l] - L[k, l0] - L[k0, l] + L[k0, l0]))
    signs = {math.copysign(1.0, v) for v in Q.values()}
    return worst, len(signs) == 1, len(Q)


def factorization_numerical(data, tol=1e-6):
    """Separability report for the factorization quotient on eta / eta_tilde."""
    if data.omega.shape[0] < 4 or data.omega.shape[1] < 4:
        raise GeometryError("property (vi) needs an omega grid of at least 4x4")
    r, same_sign, count = factorization_quotient_residual(data.omega)
    return {"rank1_residual": r, "sign_consistent": same_sign, "count": count,
            "tolerance": tol, "pass": bool(r <= tol and same_sign)}


# --- builtins and solver -------------------------------------------------------

def rhombic_grid(n=8, m=None, h=1.0, angle=math.pi / 3, rotation=0.0, offset=(0.0, 0.0)):
    """Two equally spaced parallel pencils: every elementary quad is a rhombus."""
    m = n if m is None else m
    ox, oy = offset
    tr, tc = math.pi / 2 + rotation, angle - math.pi / 2 + rotation
    rows = []
    for i in range(n):
        a, b = math.cos(tr), math.sin(tr)
        rows.append(Line2D(a, b, i * h + a * ox + b * oy))
    cols = []
    for j in range(m):
        a, b = math.cos(tc), math.sin(tc)
        cols.append(Line2D(a, b, j * h + a * ox + b * oy))
    return LineGrid(rows, cols)


BUILTINS = {"rhombic": rhombic_grid}


def _pack(grid):
    lines = list(grid.rows) + list(grid.cols)
    return np.array([math.atan2(l.b, l.a) for l in lines] + [l.c for l in lines])


def _unpack(x, R):
    half = len(x) // 2
    lines = [Line2D.from_angle(t, c) for t, c in zip(x[:half], x[half:])]
    return LineGrid(lines[:R], lines[R:])


def _pitot_vector(x, R):
    f = build_vertices(_unpack(x, R))
    A, B, C, D = f[:-1, :-1], f[1:, :-1], f[1:, 1:], f[:-1, 1:]
    n = lambda p, q: np.linalg.norm(p - q, axis=-1)
    return (n(A, B) + n(C, D) - n(B, C) - n(D, A)).ravel()


def perturb_grid(grid, eps, seed=0):
    rng = np.random.default_rng(seed)
    x = _pack(grid)
    return _unpack(x + eps * rng.standard_normal(x.size), len(grid.rows))


def rotate_line(grid, which, index, angle):
    """Rotate one line about its midpoint vertex (negative controls)."""
    rows, cols = list(grid.rows), list(grid.cols)
    lines = rows if which == "row" else cols
    other = cols if which == "row" else rows
    line = lines[index]
    pivot = intersect(line, other[len(other) // 2])
    t = math.atan2(line.b, line.a) + angle
    a, b = math.cos(t), math.sin(t)
    lines[index] = Line2D(a, b, a * pivot[0] + b * pivot[1])
    return LineGrid(rows, cols)


def _admissible(x, R):
    try:
        grid = _unpack(x, R)
        return not order_violations(grid, build_vertices(grid))
    except GeometryError:
        return False


@dataclass
class SolveResult:
    grid: LineGrid
    iterations: int
    residual: float
    history: list


def _jacobian(x, R, h):
    cols = []
    for p in range(x.size):
        e = np.zeros(x.size)
        e[p] = h
        cols.append((_pitot_vector(x + e, R) - _pitot_vector(x - e, R)) / (2 * h))
    return np.column_stack(cols)


def icnet_solve(seed, iterations=50, tol=1e-10, fd_step=1e-6, damping=1e-3, max_tries=40):
    """Levenberg-Marquardt on the signed Pitot residuals over line parameters (angle, offset).

    IC-nets form a family, so the Jacobian loses rank as the iteration closes
    in; the damping term keeps the steps bounded there.  A step is accepted
    only if the residual norm drops and the vertex order along every line
    survives (an undamped step can collapse the grid onto a degenerate
    configuration where every Pitot residual vanishes trivially).  Returns a
    SolveResult or raises SolverError carrying the final residual.
    """
    R = len(seed.rows)
    x = _pack(seed)
    if not _admissible(x, R):
        raise SolverError("seed grid does not have the admissible combinatorics", math.inf)
    F = _pitot_vector(x, R)
    history = [float(np.max(np.abs(F)))]
    lam = None
    for it in range(iterations + 1):
        if history[-1] <= tol:
            return SolveResult(_unpack(x, R), it, history[-1], history)
        if it == iterations:
            break
        J = _jacobian(x, R, fd_step)
        A, g = J.T @ J, J.T @ F
        if lam is None:
            lam = damping * float(np.max(np.diag(A)))
        norm0 = np.linalg.norm(F)
        for _ in range(max_tries):
            trial = x - np.linalg.solve(A + lam * np.eye(x.size), g)
            if _admissible(trial, R):
                Ft = _pitot_vector(trial, R)
                if np.linalg.norm(Ft) < norm0:
                    x, F = trial, Ft
                    lam = max(lam / 3.0, 1e-15)
                    break
            lam *= 4.0
        else:
            raise SolverError(f"damped step failed to reduce the residual {history[-1]:.3e}", history[-1])
        history.append(float(np.max(np.abs(F))))
    raise SolverError(f"no convergence after {iterations} iterations (residual {history[-1]:.3e})", history[-1])
