"""Discrete confocal coordinates on U u U*, the integer and half-integer lattices.

Lattice points are stored in doubled-integer form: ``m_i = 2 n_i``.  All m_i
even is a point of U (in Z^N); all odd is a point of U* (in (Z + 1/2)^N).

    x_k(n) = D_k prod_{i<k} (-n_i - alpha_k - (k-i)/2 + 1/2)_{1/2}
                 prod_{i>=k} (n_i + alpha_k + (k-i)/2)_{1/2}

with D_k^{-1} = prod_{i<k} sqrt(alpha_i - alpha_k + (i-k)/2)
                prod_{i>k} sqrt(alpha_k - alpha_i + (k-i)/2).

Indices in this module are 0-based in code; the half-shifts (k - i)/2 only
depend on index differences, so the formulas are unchanged.
"""
from dataclasses import dataclass
from functools import lru_cache
import itertools
import json
import math

import numpy as np

from .errors import DomainError, ParameterError, SingularStencilError
from .specfun import dsqrt


@dataclass(frozen=True)
class DiscreteParams:
    alpha: tuple
    D: tuple = None

    def __post_init__(self):
        try:
            alpha = tuple(int(v) for v in self.alpha)
        except (TypeError, ValueError):
            raise ParameterError(f"spectrum must be integers, got {self.alpha!r}") from None
        if any(float(v) != int(v) for v in self.alpha):
            raise ParameterError(f"spectrum must be integers, got {self.alpha!r}")
        if len(alpha) < 2:
            raise ParameterError("need N >= 2")
        if any(alpha[k] <= alpha[k + 1] for k in range(len(alpha) - 1)):
            raise ParameterError(f"need alpha_1 > alpha_2 > ... > alpha_N, got {alpha}")
        N = len(alpha)
        D = []
        for k in range(N):
            inv2 = 1.0
            for i in range(N):
                if i == k:
                    continue
                r = radicand(alpha, i, k)
                if r <= 0:
                    raise ParameterError(
                        f"nonpositive scaling radicand {r} for pair (i={i + 1}, k={k + 1})")
                inv2 *= r
            D.append(1.0 / math.sqrt(inv2))
        object.__setattr__(self, "alpha", alpha)
        if self.D is None:
            object.__setattr__(self, "D", tuple(D))
        else:
            Dgiven = tuple(float(v) for v in self.D)
            if len(Dgiven) != N or any(not (v > 0 and math.isfinite(v)) for v in Dgiven):
                raise ParameterError("custom scaling constants must be N positive reals")
            object.__setattr__(self, "D", Dgiven)

    @property
    def N(self):
        return len(self.alpha)

    @property
    def identified_a(self):
        """Continuous semi-axis parameters a_k = alpha_k + k/2 (1-based k)."""
        return tuple(self.alpha[k] + 0.5 * (k + 1) for k in range(self.N))

    def with_scaling(self, D):
        return DiscreteParams(self.alpha, tuple(D))


def radicand(alpha, i, k):
    """Factor alpha_i - alpha_k + (i-k)/2 (i < k) or alpha_k - alpha_i + (k-i)/2 (i > k)."""
    if i < k:
        return alpha[i] - alpha[k] + 0.5 * (i - k)
    return alpha[k] - alpha[i] + 0.5 * (k - i)


@dataclass(frozen=True, order=True)
class HalfLatticePoint:
    m: tuple

    def __post_init__(self):
        m = tuple(int(v) for v in self.m)
        if len(m) == 0:
            raise DomainError("empty lattice point")
        parities = {v & 1 for v in m}
        if len(parities) != 1:
            raise DomainError(f"mixed parity lattice point m={m}")
        object.__setattr__(self, "m", m)

    @classmethod
    def from_n(cls, n):
        m = []
        for v in n:
            twice = 2 * float(v)
            if twice != round(twice):
                raise DomainError(f"coordinate {v} is not a multiple of 1/2")
            m.append(int(round(twice)))
        return cls(tuple(m))

    @property
    def n(self):
        return tuple(v / 2 for v in self.m)

    @property
    def dual(self):
        """True for points of U* (half-integer coordinates)."""
        return bool(self.m[0] & 1)

    @property
    def N(self):
        return len(self.m)

    def shift(self, i, steps=1):
        """Move by ``steps`` (integer) along direction i."""
        m = list(self.m)
        m[i] += 2 * steps
        return HalfLatticePoint(tuple(m))

    def half_shift(self, sigma):
        """n + sigma/2 for a sign vector sigma."""
        return HalfLatticePoint(tuple(v + int(s) for v, s in zip(self.m, sigma)))

    def add(self, doubled_offset):
        return HalfLatticePoint(tuple(v + int(d) for v, d in zip(self.m, doubled_offset)))


def as_point(n):
    if isinstance(n, HalfLatticePoint):
        return n
    return HalfLatticePoint.from_n(n)


def in_domain(params, point):
    """-alpha_1 <= n_1 <= -alpha_2 <= n_2 <= ... <= -alpha_N <= n_N (doubled)."""
    m = point.m
    if len(m) != params.N:
        return False
    al = params.alpha
    for k in range(params.N):
        if m[k] < -2 * al[k]:
            return False
        if k + 1 < params.N and m[k] > -2 * al[k + 1]:
            return False
    return True


def _check_point(params, n):
    p = as_point(n)
    if p.N != params.N:
        raise DomainError(f"point has {p.N} coordinates, spectrum has {params.N}")
    if not in_domain(params, p):
        raise DomainError(f"n={p.n} outside the domain for alpha={params.alpha}")
    return p


def factor_argument(params, n, i, k):
    """Argument of the k-th component's discrete square root in direction i."""
    return _factor_arg(params.alpha, n, i, k)


def _factor_arg(alpha, n, i, k):
    if i < k:
        return -n[i] - alpha[k] - 0.5 * (k - i) + 0.5
    return n[i] + alpha[k] + 0.5 * (k - i)


@lru_cache(maxsize=65536)
def _eval_cached(alpha, D, m):
    n = tuple(v / 2 for v in m)
    N = len(alpha)
    x = np.empty(N)
    for k in range(N):
        v = D[k]
        for i in range(N):
            arg = _factor_arg(alpha, n, i, k)
            if arg < 0:
                raise DomainError(f"negative discrete-square-root argument at n={n}")
            v *= dsqrt(arg)
        x[k] = v
    x.setflags(write=False)
    return x


def eval_discrete(params, n):
    """x(n) in the closed positive hyperoctant, for n in U u U*."""
    p = _check_point(params, n)
    return _eval_cached(params.alpha, params.D, p.m).copy()


class DiscreteNet:
    """A net on U u U*: closed-form (from params) or tabulated (from a file).

    Calling the net on a point returns its value; tabulated nets raise
    DomainError for points they do not contain.
    """

    def __init__(self, params, values=None):
        self.params = params
        self.values = None if values is None else {
            as_point(k): np.asarray(v, dtype=float) for k, v in values.items()}

    def __call__(self, n):
        p = _check_point(self.params, n)
        if self.values is None:
            return eval_discrete(self.params, p)
        try:
            return self.values[p]
        except KeyError:
            raise DomainError(f"point n={p.n} not in tabulated net") from None

    def contains(self, n):
        try:
            p = as_point(n)
        except DomainError:
            return False
        if p.N != self.params.N or not in_domain(self.params, p):
            return False
        return self.values is None or p in self.values

    def points(self):
        return sorted(self.values) if self.values is not None else []


def as_net(obj):
    if isinstance(obj, DiscreteNet):
        return obj
    if isinstance(obj, DiscreteParams):
        return DiscreteNet(obj)
    return DiscreteNet(DiscreteParams(tuple(obj)))


# --- identity families -------------------------------------------------------

def discrete_derivative(net, n, i):
    """Delta_i x(n) = x(n + e_i) - x(n)."""
    net = as_net(net)
    p = as_point(n)
    return net(p.shift(i)) - net(p)


def ortho_stencil(n, i, j):
    """Points n, n+e_i, n-e_j+f/2, n+f/2 used by the orthogonality identity."""
    p = as_point(n)
    f = (1,) * p.N
    q = p.shift(j, -1).half_shift(f)
    return [p, p.shift(i), q, q.shift(j)]


def orthogonality_residual_discrete(net, n, i, j, relative=False):
    """|<Delta_i x(n), Delta_j x(n - e_j + f/2)>|, optionally divided by the norms."""
    net = as_net(net)
    p, pi, q, qj = ortho_stencil(n, i, j)
    u = net(pi) - net(p)
    v = net(qj) - net(q)
    val = abs(float(np.dot(u, v)))
    if relative:
        scale = float(np.linalg.norm(u) * np.linalg.norm(v))
        return val / scale if scale > 0 else 0.0
    return val


def product_rhs(params, n, sigma, k):
    """Closed form of x_k(n) x_k(n + sigma/2)."""
    n = as_point(n).n
    num = 1.0
    for i in range(params.N):
        num *= n[i] + params.alpha[k] + 0.5 * (k - i) - 0.25 * (1 - sigma[i])
    den = 1.0
    for i in range(params.N):
        if i != k:
            den *= params.alpha[k] - params.alpha[i] + 0.5 * (k - i)
    return num / den


def product_identity(net, n, sigma, k):
    """(x_k(n) x_k(n + sigma/2), closed form)."""
    net = as_net(net)
    p = as_point(n)
    lhs = float(net(p)[k] * net(p.half_shift(sigma))[k])
    return lhs, product_rhs(net.params, p, sigma, k)


def quadric_denominator(params, n, sigma, i, k):
    n = as_point(n).n
    return n[i] + params.alpha[k] + 0.5 * (k - i) - 0.25 * (1 - sigma[i])


def quadric_residual(net, n, sigma, i):
    """|sum_k x_k(n) x_k(n + sigma/2) / (n_i + alpha_k + (k-i)/2 - (1-sigma_i)/4) - 1|."""
    net = as_net(net)
    params = net.params
    p = as_point(n)
    xa = net(p)
    xb = net(p.half_shift(sigma))
    total = 0.0
    for k in range(params.N):
        den = quadric_denominator(params, p, sigma, i, k)
        if den == 0:
            raise SingularStencilError(f"zero quadric denominator at n={p.n}, i={i + 1}, k={k + 1}")
        total += xa[k] * xb[k] / den
    return abs(total - 1.0)


def scalar_identity(net, n, sigma):
    """(<x(n), x(n + sigma/2)>, sum_k (n_k + alpha_k - (1 - sigma_k)/4))."""
    net = as_net(net)
    params = net.params
    p = as_point(n)
    lhs = float(np.dot(net(p), net(p.half_shift(sigma))))
    nn = p.n
    rhs = sum(nn[k] + params.alpha[k] - 0.25 * (1 - sigma[k]) for k in range(params.N))
    return lhs, rhs


def radial_identity(net, n, sigma, i):
    """<x(n), Delta_i x(n + sigma/2)>, which equals 1/2 whenever sigma_i = -1."""
    if sigma[i] != -1:
        raise DomainError("radial identity needs sigma_i = -1")
    net = as_net(net)
    p = as_point(n)
    q = p.half_shift(sigma)
    return float(np.dot(net(p), net(q.shift(i)) - net(q)))


def factorization_closed_forms(params, n, i, j):
    """Closed forms of the two inner products of the factorization identity."""
    nn = as_point(n).n
    al = params.alpha
    N = params.N
    num_i = np.prod([nn[i] - nn[m] + 0.5 * (m - i) + 0.5 for m in range(N) if m != i])
    den_i = 4.0 * np.prod([nn[i] + al[m] + 0.5 * (m - i) + 0.5 for m in range(N)])
    num_j = np.prod([nn[j] - nn[m] + 0.5 * (m - j) - 0.5 for m in range(N) if m != j])
    den_j = 4.0 * np.prod([nn[j] + al[m] + 0.5 * (m - j) for m in range(N)])
    return float(num_i / den_i), float(num_j / den_j)


def factorization_ratio_rhs(params, n, i, j):
    """phi_i(n_i) / phi_j(n_j) in closed form."""
    nn = as_point(n).n
    al = params.alpha
    N = params.N
    others = [m for m in range(N) if m not in (i, j)]
    num_i = np.prod([nn[i] - nn[m] + 0.5 * (m - i) + 0.5 for m in others]) if others else 1.0
    den_i = np.prod([nn[i] + al[m] + 0.5 * (m - i) + 0.5 for m in range(N)])
    num_j = np.prod([nn[j] + al[m] + 0.5 * (m - j) for m in range(N)])
    den_j = np.prod([nn[j] - nn[m] + 0.5 * (m - j) - 0.5 for m in others]) if others else 1.0
    return float(-(num_i / den_i) * (num_j / den_j))


def factorization_stencil(n, i, j):
    p = as_point(n)
    f = (1,) * p.N
    pf = p.half_shift(f)
    q = p.shift(j, -1).half_shift(f)
    qf = q.half_shift(f)
    return p, pf, q, qf


def factorization_products(net, n, i, j):
    """(<D_i x(n), D_i x(n+f/2)>, <D_j x(n-e_j+f/2), D_j x(n-e_j+f)>)."""
    net = as_net(net)
    p, pf, q, qf = factorization_stencil(n, i, j)
    gi = float(np.dot(net(p.shift(i)) - net(p), net(pf.shift(i)) - net(pf)))
    gj = float(np.dot(net(q.shift(j)) - net(q), net(qf.shift(j)) - net(qf)))
    return gi, gj


def factorization_check(net, n, i, j):
    """(s^2, measured phi_i/phi_j, closed-form phi_i/phi_j)."""
    net = as_net(net)
    nn = as_point(n).n
    s2 = abs(nn[i] - nn[j] + 0.5 * (j - i) + 0.5)
    gi, gj = factorization_products(net, n, i, j)
    if gj == 0.0:
        raise SingularStencilError(f"vanishing denominator product at n={nn}")
    return s2, gi / gj, factorization_ratio_rhs(net.params, n, i, j)


def continuous_squares_identified(params, n, sigma, k):
    """Continuous x_k^2 formula at a_k = alpha_k + k/2, u_i = n_i - i/2 - (1-sigma_i)/4."""
    nn = as_point(n).n
    a = params.identified_a
    u = [nn[i] - 0.5 * (i + 1) - 0.25 * (1 - sigma[i]) for i in range(params.N)]
    num = np.prod([u[i] + a[k] for i in range(params.N)])
    den = np.prod([a[k] - a[i] for i in range(params.N) if i != k])
    return float(num / den)


# --- lattice enumeration and serialization -----------------------------------

def parse_window(spec):
    """'lo:hi,lo:hi,...' -> list of (lo, hi) integer pairs."""
    out = []
    for part in str(spec).split(","):
        try:
            lo, hi = part.split(":")
            lo, hi = int(lo), int(hi)
        except ValueError:
            raise DomainError(f"bad window component {part!r}; expected lo:hi") from None
        if lo > hi:
            raise DomainError(f"empty window component {part!r}")
        out.append((lo, hi))
    return out


def window_points(params, window, parities=(0, 1)):
    """Domain points with lo <= n_i <= hi; parity 0 = integer, 1 = half-integer."""
    if len(window) != params.N:
        raise DomainError(f"window has {len(window)} axes, spectrum has {params.N}")
    pts = []
    for par in parities:
        axes = [range(2 * lo + par, 2 * hi + 1, 2) for lo, hi in window]
        for m in itertools.product(*axes):
            p = HalfLatticePoint(m)
            if in_domain(params, p):
                pts.append(p)
    return pts


def in_window(point, window):
    return all(2 * lo <= v <= 2 * hi for v, (lo, hi) in zip(point.m, window))


def net_to_json(params, points, net=None):
    net = as_net(params if net is None else net)
    doc = {
        "N": params.N,
        "alpha": list(params.alpha),
        "points": [{"m2": list(p.m), "x": [float(v) for v in net(p)]} for p in points],
    }
    return json.dumps(doc, indent=1)


def net_from_json(text):
    """Parse a net document into a tabulated DiscreteNet; raises ParameterError if malformed."""
    try:
        doc = json.loads(text)
        N = int(doc["N"])
        params = DiscreteParams(tuple(doc["alpha"]))
        if params.N != N:
            raise ParameterError("N does not match the spectrum length")
        values = {}
        for rec in doc["points"]:
            p = HalfLatticePoint(tuple(rec["m2"]))
            x = np.asarray(rec["x"], dtype=float)
            if p.N != N or x.shape != (N,) or not np.all(np.isfinite(x)):
                raise ParameterError(f"malformed point record {rec!r}")
            values[p] = x
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        if isinstance(exc, ParameterError):
            raise
        raise ParameterError(f"malformed net document: {exc}") from None
    return DiscreteNet(params, values)
