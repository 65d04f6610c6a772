"""Classical confocal (elliptic) coordinates on the positive hyperoctant.

Given a_1 > ... > a_N > 0, the point u of the box

    -a_1 < u_1 < -a_2 < u_2 < ... < -a_N < u_N

is mapped to the unique x in R^N_+ lying on the N confocal quadrics
sum_k x_k^2 / (a_k + u_i) = 1.  This module evaluates and inverts that map
and exposes residuals for the Euler-Poisson-Darboux equation (gamma = 1/2),
orthogonality and the isothermic factorization.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError, ParameterError

# Finite-difference stencils lose ~eps/h^2 to cancellation; extended precision
# keeps roundoff well below the O(h^2) truncation error for h >= 1e-4.
_FD_DTYPE = np.longdouble


@dataclass(frozen=True)
class ContinuousParams:
    a: tuple

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        if len(a) < 2:
            raise ParameterError("need N >= 2 semi-axis parameters")
        if not all(math.isfinite(v) for v in a):
            raise ParameterError("semi-axis parameters must be finite")
        if any(a[k] <= a[k + 1] for k in range(len(a) - 1)) or a[-1] <= 0:
            raise ParameterError(f"need a_1 > a_2 > ... > a_N > 0, got {a}")
        object.__setattr__(self, "a", a)

    @property
    def N(self):
        return len(self.a)


def _as_params(params):
    return params if isinstance(params, ContinuousParams) else ContinuousParams(tuple(params))


def in_domain(params, u, closed=False):
    """Whether u lies in the (open or closed) coordinate box."""
    params = _as_params(params)
    a = params.a
    u = [float(v) for v in u]
    if len(u) != params.N:
        return False
    lt = (lambda p, q: p <= q) if closed else (lambda p, q: p < q)
    for k in range(params.N):
        if not lt(-a[k], u[k]):
            return False
        if k + 1 < params.N and not lt(u[k], -a[k + 1]):
            return False
    return True


def _check_u(params, u, closed):
    u = np.asarray(u, dtype=float)
    if u.shape != (params.N,) or not np.all(np.isfinite(u)):
        raise DomainError(f"u must be a finite vector of length {params.N}")
    if not in_domain(params, u, closed=closed):
        kind = "closed" if closed else "open"
        raise DomainError(f"u={u.tolist()} outside the {kind} domain for a={params.a}")
    return u


def _radicand(u_i, a_k, i, k):
    # sqrt(u_i + a_k) for i >= k, sqrt(-(u_i + a_k)) for i < k
    return (u_i + a_k) if i >= k else -(u_i + a_k)


def _eval(a, u, dtype=float):
    N = len(a)
    a = np.asarray(a, dtype=dtype)
    u = np.asarray(u, dtype=dtype)
    x = np.empty(N, dtype=dtype)
    for k in range(N):
        num = dtype(1)
        den = dtype(1)
        for i in range(N):
            r = _radicand(u[i], a[k], i, k)
            if r <= 0:
                # boundary face: exact zero
                num = dtype(0)
                break
            num *= np.sqrt(r)
        for i in range(N):
            if i != k:
                den *= np.sqrt(abs(a[i] - a[k]))
        x[k] = num / den
    return x


def eval_continuous(params, u):
    """Cartesian point x(u) in the closed positive hyperoctant."""
    params = _as_params(params)
    u = _check_u(params, u, closed=True)
    return _eval(params.a, u)


def _quadric_function(a, x2, lam):
    return float(np.sum(x2 / (a + lam)) - 1.0)


def _bracket_root(f, lo, hi, decreasing=True):
    """Bisection on (lo, hi) for a strictly monotone f, then Newton polish."""
    width = 1e-13 * (hi - lo)
    a_, b_ = lo, hi
    while b_ - a_ > width:
        mid = 0.5 * (a_ + b_)
        if mid <= a_ or mid >= b_:
            break
        v = f(mid)
        if v == 0.0:
            return mid
        if (v > 0) == decreasing:
            a_ = mid
        else:
            b_ = mid
    return 0.5 * (a_ + b_)


def invert_continuous(params, x):
    """Confocal coordinates u of a point x with all x_k > 0.

    Each u_i is the root of f(lam) = sum x_k^2/(a_k + lam) - 1 in the pole
    interval (-a_i, -a_{i+1}) (last one: (-a_N, -a_N + sum x^2 + a_1)).
    f is strictly decreasing between consecutive poles.
    """
    params = _as_params(params)
    x = np.asarray(x, dtype=float)
    if x.shape != (params.N,) or not np.all(np.isfinite(x)):
        raise DomainError(f"x must be a finite vector of length {params.N}")
    if np.any(x <= 0):
        raise DomainError("invert_continuous needs all x_k > 0")
    a = np.asarray(params.a)
    x2 = x * x
    f = lambda lam: _quadric_function(a, x2, lam)
    df = lambda lam: -float(np.sum(x2 / (a + lam) ** 2))
    u = np.empty(params.N)
    for i in range(params.N):
        lo = -a[i]
        hi = -a[i + 1] if i + 1 < params.N else -a[-1] + float(np.sum(x2)) + a[0]
        root = _bracket_root(f, lo, hi)
        for _ in range(3):
            step = f(root) / df(root)
            cand = root - step
            if lo < cand < hi:
                root = cand
        u[i] = root
    return u


def first_derivatives(params, u):
    """Closed-form Jacobian J[i, k] = d x_k / d u_i = x_k / (2 (a_k + u_i))."""
    params = _as_params(params)
    u = _check_u(params, u, closed=False)
    a = np.asarray(params.a)
    x = _eval(params.a, u)
    return 0.5 * x[None, :] / (a[None, :] + u[:, None])


def _fd_parts(params, u, i, j, h):
    params = _as_params(params)
    u = _check_u(params, u, closed=False)
    N = params.N
    if not (0 <= i < N and 0 <= j < N) or i == j:
        raise DomainError(f"need distinct direction indices in [0, {N}), got {i}, {j}")
    h = float(h)
    if not h > 0:
        raise DomainError("step h must be positive")
    E = np.eye(N, dtype=_FD_DTYPE)
    uu = u.astype(_FD_DTYPE)
    hh = _FD_DTYPE(h)
    offsets = [(si, sj) for si in (-1, 0, 1) for sj in (-1, 0, 1)]
    vals = {}
    for si, sj in offsets:
        p = uu + si * hh * E[i] + sj * hh * E[j]
        if not in_domain(params, p.astype(float)):
            raise DomainError(f"finite-difference stencil of step {h} leaves the domain at u={u.tolist()}")
        vals[si, sj] = _eval(params.a, p, dtype=_FD_DTYPE)
    di = (vals[1, 0] - vals[-1, 0]) / (2 * hh)
    dj = (vals[0, 1] - vals[0, -1]) / (2 * hh)
    dij = (vals[1, 1] - vals[1, -1] - vals[-1, 1] + vals[-1, -1]) / (4 * hh * hh)
    return uu, di, dj, dij


def epd_residual_continuous(params, u, i, j, h):
    """Norm of D_iD_j x - (1/2)/(u_i - u_j) (D_j x - D_i x) by central differences."""
    uu, di, dj, dij = _fd_parts(params, u, i, j, h)
    res = dij - _FD_DTYPE(0.5) / (uu[i] - uu[j]) * (dj - di)
    return float(np.linalg.norm(res.astype(float)))


def orthogonality_residual_continuous(params, u, i, j, h):
    """|<D_i x, D_j x>| by central differences."""
    _, di, dj, _ = _fd_parts(params, u, i, j, h)
    return float(abs(np.dot(di, dj)))


def isothermic_factors_continuous(params, u, i, j):
    """Conformal factor s = |u_i - u_j|^(1/2) and the ratio alpha_i(u_i)/alpha_j(u_j)."""
    params = _as_params(params)
    u = _check_u(params, u, closed=False)
    if i == j:
        raise DomainError("need i != j")
    a = np.asarray(params.a)
    others = [m for m in range(params.N) if m not in (i, j)]
    s = math.sqrt(abs(u[i] - u[j]))
    num_i = np.prod([u[i] - u[m] for m in others]) if others else 1.0
    num_j = np.prod([u[j] - u[m] for m in others]) if others else 1.0
    ratio = -(num_i / np.prod(u[i] + a)) * (np.prod(u[j] + a) / num_j)
    return s, float(ratio)


def speed_squared_closed_form(params, u, i):
    """|dx/du_i|^2 = (1/4) prod_{m != i}(u_i - u_m) / prod_m (u_i + a_m)."""
    params = _as_params(params)
    u = _check_u(params, u, closed=False)
    a = np.asarray(params.a)
    num = np.prod([u[i] - u[m] for m in range(params.N) if m != i])
    return float(0.25 * num / np.prod(u[i] + a))


def continuous_scaling_constants(params):
    """D_k > 0 with D_k^{-2} = prod_{i<k}(a_i - a_k) prod_{i>k}(a_k - a_i)."""
    params = _as_params(params)
    a = params.a
    D = []
    for k in range(params.N):
        inv2 = 1.0
        for i in range(params.N):
            if i != k:
                inv2 *= abs(a[i] - a[k])
        D.append(1.0 / math.sqrt(inv2))
    return D


def separable_rho_continuous(u, c, branch):
    """sqrt(u + c) on the 'plus' branch (u > -c), sqrt(-(u + c)) on 'minus'."""
    u = float(u)
    c = float(c)
    if branch == "plus":
        if u + c < 0:
            raise DomainError(f"plus branch needs u + c >= 0, got {u + c}")
        return math.sqrt(u + c)
    if branch == "minus":
        if u + c > 0:
            raise DomainError(f"minus branch needs u + c <= 0, got {u + c}")
        return math.sqrt(-(u + c))
    raise DomainError(f"unknown branch {branch!r}")


def sample_grid(params, counts, upper=None):
    """Cell-centred sample of the open box; the last axis spans (-a_N, upper)."""
    params = _as_params(params)
    a = params.a
    if len(counts) != params.N:
        raise DomainError("one count per axis is required")
    if upper is None:
        upper = -a[-1] + (a[0] - a[-1])
    axes = []
    for k in range(params.N):
        lo = -a[k]
        hi = -a[k + 1] if k + 1 < params.N else upper
        n = int(counts[k])
        if n < 1 or hi <= lo:
            raise DomainError("empty sampling axis")
        axes.append(lo + (np.arange(n) + 0.5) * (hi - lo) / n)
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)
