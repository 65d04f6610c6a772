"""Explicit closed forms for N = 2 and N = 3.

These are written out independently of the general-N code path in
``discrete`` so the two implementations can cross-validate each other.
The third N = 3 spectrum integer is called ``gamma_lat`` to keep it apart
from the EPD parameter gamma = 1/2.
"""
from collections import deque
from dataclasses import dataclass
import json
import math

import numpy as np

from .discrete import HalfLatticePoint, as_point
from .errors import DomainError, ParameterError, SingularStencilError
from .specfun import dsqrt as sq


@dataclass(frozen=True)
class Params2D:
    alpha: int
    beta: int

    def __post_init__(self):
        if int(self.alpha) != self.alpha or int(self.beta) != self.beta:
            raise ParameterError("alpha, beta must be integers")
        if not self.alpha > self.beta:
            raise ParameterError(f"need alpha > beta, got {self.alpha}, {self.beta}")

    @property
    def D1(self):
        return 1.0 / math.sqrt(self.alpha - self.beta - 0.5)

    @property
    def D2(self):
        return self.D1


@dataclass(frozen=True)
class Params3D:
    alpha: int
    beta: int
    gamma_lat: int

    def __post_init__(self):
        vals = (self.alpha, self.beta, self.gamma_lat)
        if any(int(v) != v for v in vals):
            raise ParameterError("alpha, beta, gamma_lat must be integers")
        if not self.alpha > self.beta > self.gamma_lat:
            raise ParameterError(f"need alpha > beta > gamma_lat, got {vals}")

    @property
    def a(self):
        return self.alpha + 0.5

    @property
    def b(self):
        return self.beta + 1.0

    @property
    def c(self):
        return self.gamma_lat + 1.5

    @property
    def D_squared(self):
        a, b, c = self.a, self.b, self.c
        return 1.0 / ((a - b) * (a - c) * (b - c))

    @property
    def D_sq(self):
        """(D1^2, D2^2, D3^2) from the unique orthogonal relative scaling."""
        a, b, c, d2 = self.a, self.b, self.c, self.D_squared
        return (b - c) * d2, (a - c) * d2, (a - b) * d2

    @property
    def D(self):
        return tuple(math.sqrt(v) for v in self.D_sq)


def _den(u):
    v = sq(u)
    if v == 0.0:
        raise SingularStencilError(f"vanishing discrete square root at {u} in a derivative denominator")
    return v


def _n(n):
    return as_point(n).n


# --- N = 2 -------------------------------------------------------------------

def in_domain_2d(params, n):
    n1, n2 = _n(n)
    return -params.alpha <= n1 <= -params.beta <= n2


def _require_2d(params, n):
    p = as_point(n)
    if p.N != 2 or not in_domain_2d(params, p):
        raise DomainError(f"n={p.n} outside the N=2 domain")
    return p.n


def eval_2d(params, n):
    n1, n2 = _require_2d(params, n)
    al, be = params.alpha, params.beta
    return np.array([
        params.D1 * sq(n1 + al) * sq(n2 + al - 0.5),
        params.D2 * sq(-n1 - be) * sq(n2 + be),
    ])


def delta1_2d(params, n):
    n1, n2 = _n(n)
    al, be = params.alpha, params.beta
    return 0.5 * np.array([
        params.D1 * sq(n2 + al - 0.5) / _den(n1 + al + 0.5),
        -params.D2 * sq(n2 + be) / _den(-n1 - be - 0.5),
    ])


def delta2_2d(params, n):
    n1, n2 = _n(n)
    al, be = params.alpha, params.beta
    return 0.5 * np.array([
        params.D1 * sq(n1 + al) / _den(n2 + al),
        params.D2 * sq(-n1 - be) / _den(n2 + be + 0.5),
    ])


TAU_SIGNS = {"pp": (1, 1), "pm": (1, -1)}


def tau_products(params, n, sign):
    """Right-hand sides x(n)x(n+s/2), y(n)y(n+s/2) for s = (+,+) or (+,-)."""
    n1, n2 = _n(n)
    al, be = params.alpha, params.beta
    den_x = al - be - 0.5
    den_y = be - al + 0.5
    if sign == "pp":
        return ((n1 + al) * (n2 + al - 0.5) / den_x, (n1 + be + 0.5) * (n2 + be) / den_y)
    if sign == "pm":
        return ((n1 + al) * (n2 + al - 1.0) / den_x, (n1 + be + 0.5) * (n2 + be - 0.5) / den_y)
    raise DomainError(f"unknown tau sign {sign!r}")


def tau_step_2d(params, p, n, sign):
    """Propagate x(n) -> x(n + s/2) by dividing the bilinear products by x(n)."""
    p = np.asarray(p, dtype=float)
    if np.any(p == 0):
        raise SingularStencilError("cannot propagate through a vanishing component")
    if np.any(p < 0):
        raise DomainError("tau propagation works on the positive quadrant")
    return np.asarray(tau_products(params, n, sign)) / p


def tau_step_inverse_2d(params, p, n, sign):
    """Recover x(n) from x(n + s/2), where ``n`` is the source lattice point."""
    return tau_step_2d(params, p, n, sign)


def tau_commutator(params, p, n):
    """max-norm of tau++ o tau+- (p) - tau+- o tau++ (p) starting at lattice point n."""
    start = as_point(n)
    a = tau_step_2d(params, p, start, "pm")
    a = tau_step_2d(params, a, start.half_shift(TAU_SIGNS["pm"]), "pp")
    b = tau_step_2d(params, p, start, "pp")
    b = tau_step_2d(params, b, start.half_shift(TAU_SIGNS["pp"]), "pm")
    return float(np.max(np.abs(a - b)))


def tau_propagate(params, seed, seed_value, allowed):
    """Fill a set of lattice points from one seed by tau moves and their inverses.

    ``allowed`` is a collection of HalfLatticePoint.  A point is propagated
    from only when all its components are nonzero; zero components end the
    walk (boundary rays are leaves).  Returns {point: value}.
    """
    allowed = set(allowed)
    seed = as_point(seed)
    if seed not in allowed:
        raise DomainError("seed not among the allowed points")
    out = {seed: np.asarray(seed_value, dtype=float)}
    queue = deque([seed])
    while queue:
        p = queue.popleft()
        val = out[p]
        if np.any(val == 0):
            continue
        for sign, s in TAU_SIGNS.items():
            fwd = p.half_shift(s)
            if fwd in allowed and fwd not in out:
                out[fwd] = tau_step_2d(params, val, p, sign)
                queue.append(fwd)
            back = p.half_shift(tuple(-v for v in s))
            if back in allowed and back not in out:
                # x(back) x(p) = products evaluated at the source ``back``
                out[back] = np.asarray(tau_products(params, back, sign)) / val
                queue.append(back)
    return out


def conic_relations_2d(params, n, sign, net=None):
    """Residuals |lhs - 1| of the two discrete conic equations through x(n)."""
    p = as_point(n)
    s = TAU_SIGNS[sign]
    q = p.half_shift(s)
    get = (lambda pt: eval_2d(params, pt)) if net is None else net
    xa, xb = get(p), get(q)
    n1, n2 = p.n
    al, be = params.alpha, params.beta
    pxx, pyy = xa[0] * xb[0], xa[1] * xb[1]
    if sign == "pp":
        dens = ((n1 + al, n1 + be + 0.5), (n2 + al - 0.5, n2 + be))
    else:
        dens = ((n1 + al, n1 + be + 0.5), (n2 + al - 1.0, n2 + be - 0.5))
    out = []
    for dx, dy in dens:
        if dx == 0 or dy == 0:
            raise SingularStencilError(f"zero conic denominator at n={p.n}")
        out.append(abs(pxx / dx + pyy / dy - 1.0))
    return tuple(out)


def isothermic_ratio_2d(params, n, net=None):
    """(measured quotient of inner products, closed-form phi_1/phi_2)."""
    p = as_point(n)
    get = (lambda pt: eval_2d(params, pt)) if net is None else net
    f = (1, 1)
    pf = p.half_shift(f)
    q = p.shift(1, -1).half_shift(f)
    qf = q.half_shift(f)
    top = float(np.dot(get(p.shift(0)) - get(p), get(pf.shift(0)) - get(pf)))
    bot = float(np.dot(get(q.shift(1)) - get(q), get(qf.shift(1)) - get(qf)))
    n1, n2 = p.n
    al, be = params.alpha, params.beta
    den = (n1 + al + 0.5) * (n1 + be + 1.0)
    if bot == 0 or den == 0:
        raise SingularStencilError(f"singular isothermic stencil at n={p.n}")
    rhs = -(n2 + al - 0.5) * (n2 + be) / den
    return top / bot, rhs


def isothermic_ratio_continuous_2d(a, b, u1, u2):
    return -(u2 + a) * (u2 + b) / ((u1 + a) * (u1 + b))


# --- N = 3 -------------------------------------------------------------------

def in_domain_3d(params, n):
    n1, n2, n3 = _n(n)
    return -params.alpha <= n1 <= -params.beta <= n2 <= -params.gamma_lat <= n3


def _require_3d(params, n):
    p = as_point(n)
    if p.N != 3 or not in_domain_3d(params, p):
        raise DomainError(f"n={p.n} outside the N=3 domain")
    return p.n


def eval_3d(params, n):
    n1, n2, n3 = _require_3d(params, n)
    al, be, ga = params.alpha, params.beta, params.gamma_lat
    D1, D2, D3 = params.D
    return np.array([
        D1 * sq(n1 + al) * sq(n2 + al - 0.5) * sq(n3 + al - 1.0),
        D2 * sq(-n1 - be) * sq(n2 + be) * sq(n3 + be - 0.5),
        D3 * sq(-n1 - ga - 0.5) * sq(-n2 - ga) * sq(n3 + ga),
    ])


def delta1_3d(params, n):
    n1, n2, n3 = _n(n)
    al, be, ga = params.alpha, params.beta, params.gamma_lat
    D1, D2, D3 = params.D
    return 0.5 * np.array([
        D1 * sq(n2 + al - 0.5) * sq(n3 + al - 1.0) / _den(n1 + al + 0.5),
        -D2 * sq(n2 + be) * sq(n3 + be - 0.5) / _den(-n1 - be - 0.5),
        -D3 * sq(-n2 - ga) * sq(n3 + ga) / _den(-n1 - ga - 1.0),
    ])


def delta2_3d(params, n):
    n1, n2, n3 = _n(n)
    al, be, ga = params.alpha, params.beta, params.gamma_lat
    D1, D2, D3 = params.D
    return 0.5 * np.array([
        D1 * sq(n1 + al) * sq(n3 + al - 1.0) / _den(n2 + al),
        D2 * sq(-n1 - be) * sq(n3 + be - 0.5) / _den(n2 + be + 0.5),
        -D3 * sq(-n1 - ga - 0.5) * sq(n3 + ga) / _den(-n2 - ga - 0.5),
    ])


def delta3_3d(params, n):
    n1, n2, n3 = _n(n)
    al, be, ga = params.alpha, params.beta, params.gamma_lat
    D1, D2, D3 = params.D
    return 0.5 * np.array([
        D1 * sq(n1 + al) * sq(n2 + al - 0.5) / _den(n3 + al - 0.5),
        D2 * sq(-n1 - be) * sq(n2 + be) / _den(n3 + be),
        D3 * sq(-n1 - ga - 0.5) * sq(-n2 - ga) / _den(n3 + ga + 0.5),
    ])


def orthogonality_system_3d(params, n):
    """Left-hand sides of the three linear orthogonality conditions at n."""
    n1, n2, n3 = _n(n)
    a, b, c = params.a, params.b, params.c
    d1, d2, d3 = params.D_sq
    return (
        d1 * (n3 + a - 1.5) - d2 * (n3 + b - 1.5) + d3 * (n3 + c - 1.5),
        d1 * (n2 + a - 1.0) - d2 * (n2 + b - 1.0) + d3 * (n2 + c - 1.0),
        d1 * (n1 + a - 0.5) - d2 * (n1 + b - 0.5) + d3 * (n1 + c - 0.5),
    )


def scaling_consistency_3d(params):
    """(D1^2 - D2^2 + D3^2, D1^2 a - D2^2 b + D3^2 c, and the three ratios D_k^2 / gap - D^2)."""
    a, b, c, d2 = params.a, params.b, params.c, params.D_squared
    d1s, d2s, d3s = params.D_sq
    return (
        d1s - d2s + d3s,
        d1s * a - d2s * b + d3s * c,
        d1s / (b - c) - d2,
        d2s / (a - c) - d2,
        d3s / (a - b) - d2,
    )


def shifted_coordinates_3d(n, sigma):
    n1, n2, n3 = _n(n)
    s1, s2, s3 = sigma
    return (n1 + 0.25 * s1 - 0.75, n2 + 0.25 * s2 - 1.25, n3 + 0.25 * s3 - 1.75)


def quadric_relations_3d(params, n, sigma, net=None):
    """Residuals |lhs - 1| of the three bilinear quadric equations."""
    p = as_point(n)
    get = (lambda pt: eval_3d(params, pt)) if net is None else net
    xa = get(p)
    xb = get(p.half_shift(sigma))
    prod = xa * xb
    a, b, c = params.a, params.b, params.c
    out = []
    for t in shifted_coordinates_3d(p, sigma):
        dens = (t + a, t + b, t + c)
        if 0 in dens:
            raise SingularStencilError(f"zero quadric denominator at n={p.n}, sigma={sigma}")
        out.append(abs(sum(v / d for v, d in zip(prod, dens)) - 1.0))
    return tuple(out)


# --- discrete umbilics and focal conics ---------------------------------------

def _half_range(lo, hi):
    """lo, lo + 1/2, ..., hi as doubled integers."""
    return range(int(round(2 * lo)), int(round(2 * hi)) + 1)


def umbilic_point_ellipsoid(params, n3):
    if n3 < -params.gamma_lat:
        raise DomainError(f"n3={n3} below -gamma_lat")
    al, be, ga = params.alpha, params.beta, params.gamma_lat
    D1, _, D3 = params.D
    return np.array([D1 * (al - be - 0.5) * sq(n3 + al - 1.0), 0.0, D3 * (be - ga - 0.5) * sq(n3 + ga)])


def umbilic_curve_ellipsoid(params, n3_max):
    """Discrete focal hyperbola: umbilics n1 = n2 = -beta over n3 in [-gamma_lat, n3_max] (step 1/2)."""
    ns = [m / 2 for m in _half_range(-params.gamma_lat, n3_max)]
    return ns, np.array([umbilic_point_ellipsoid(params, t) for t in ns])


def focal_hyperbola_residual(params, n3):
    """|x(t)x(t+1/2)/(alpha-beta-1/2) - z(t)z(t+1/2)/(beta-gamma-1/2) - 1|."""
    p, q = umbilic_point_ellipsoid(params, n3), umbilic_point_ellipsoid(params, n3 + 0.5)
    al, be, ga = params.alpha, params.beta, params.gamma_lat
    return abs(p[0] * q[0] / (al - be - 0.5) - p[2] * q[2] / (be - ga - 0.5) - 1.0)


def umbilic_point_hyperboloid(params, n1):
    al, be, ga = params.alpha, params.beta, params.gamma_lat
    if not -al <= n1 <= -be:
        raise DomainError(f"n1={n1} outside [-alpha, -beta]")
    D1, D2, _ = params.D
    return np.array([D1 * (al - ga - 1.0) * sq(n1 + al), D2 * (be - ga - 0.5) * sq(-n1 - be), 0.0])


def umbilic_curve_hyperboloid(params):
    """Discrete focal ellipse: umbilics n2 = n3 = -gamma_lat over n1 in [-alpha, -beta] (step 1/2)."""
    ns = [m / 2 for m in _half_range(-params.alpha, -params.beta)]
    return ns, np.array([umbilic_point_hyperboloid(params, t) for t in ns])


def focal_ellipse_residual(params, n1):
    p, q = umbilic_point_hyperboloid(params, n1), umbilic_point_hyperboloid(params, n1 + 0.5)
    al, be, ga = params.alpha, params.beta, params.gamma_lat
    return abs(p[0] * q[0] / (al - ga - 1.0) + p[1] * q[1] / (be - ga - 0.5) - 1.0)


def focal_hyperbola_continuum_residual(params, n3):
    """|x^2/(a-b) - z^2/(b-c) - 1| of a discrete umbilic against the smooth focal hyperbola."""
    p = umbilic_point_ellipsoid(params, n3)
    a, b, c = params.a, params.b, params.c
    return abs(p[0] ** 2 / (a - b) - p[2] ** 2 / (b - c) - 1.0)


def focal_ellipse_continuum_residual(params, n1):
    p = umbilic_point_hyperboloid(params, n1)
    a, b, c = params.a, params.b, params.c
    return abs(p[0] ** 2 / (a - c) + p[1] ** 2 / (b - c) - 1.0)


def polyline_json(kind, points):
    if kind not in ("focal_hyperbola", "focal_ellipse"):
        raise ValueError(f"unknown polyline kind {kind!r}")
    return json.dumps({"kind": kind, "points": [[float(v) for v in p] for p in points]})


def umbilic_lattice_points(params):
    """Lattice locations of umbilics: n1 = n2 = -beta (ellipsoids), n2 = n3 = -gamma_lat (hyperboloids)."""
    return {
        "ellipsoid": (-params.beta, -params.beta),
        "hyperboloid": (-params.gamma_lat, -params.gamma_lat),
    }


def point2(n1, n2):
    return HalfLatticePoint.from_n((n1, n2))
