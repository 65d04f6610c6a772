"""Discrete Euler-Poisson-Darboux residuals and discrete Koenigs certification.

A 2D net satisfies dEPD_gamma when

    D_i D_j x = gamma / (n_i + eps_i - n_j - eps_j) * (D_j x - D_i x),

i.e. the discrete Darboux equation D_iD_j x = A D_i x + B D_j x holds with
A = -gamma/d and B = gamma/d.  Koenigs nets are certified two ways: through
the explicit nu = mu(n_i - n_j) built from gamma functions, and through the
Menelaus multi-ratio of diagonal intersections around each vertex star.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DomainError, SingularStencilError
from .geometry import (  # noqa: F401  (re-exported)
    diagonal_intersection,
    directed_ratio,
    multiratio,
    vertex_star_multiratio,
)
from .specfun import log_gamma, pochhammer


@dataclass(frozen=True)
class EpdParams:
    gamma: float = 0.5
    eps: tuple = ()

    @classmethod
    def confocal(cls, N):
        """gamma = 1/2 with eps_i - eps_j = (j - i)/2 (1-based i, j)."""
        return cls(0.5, tuple(-0.5 * (i + 1) for i in range(N)))


@dataclass
class NetWindow:
    """2D window of a net in directions (i, j).

    ``values`` maps offsets (a, b) to points; offset (a, b) sits at lattice
    coordinates n_i = origin[0] + a, n_j = origin[1] + b.
    """

    dims: tuple
    values: dict = field(default_factory=dict)
    origin: tuple = (0.0, 0.0)

    def get(self, a, b):
        try:
            return np.asarray(self.values[a, b], dtype=float)
        except KeyError:
            raise DomainError(f"offset {(a, b)} not in window") from None

    def __contains__(self, key):
        return key in self.values


def depd_denominator(net, params, a, b):
    i, j = net.dims
    return (net.origin[0] + a + params.eps[i]) - (net.origin[1] + b + params.eps[j])


def darboux_parts(net, a, b):
    x = net.get(a, b)
    xi = net.get(a + 1, b)
    xj = net.get(a, b + 1)
    xij = net.get(a + 1, b + 1)
    return xi - x, xj - x, xij - xi - xj + x


def depd_residual(net, params, n=(0, 0)):
    """Euclidean norm of the dEPD defect on the face starting at offset ``n``."""
    a, b = n
    d = depd_denominator(net, params, a, b)
    if d == 0:
        raise SingularStencilError(f"dEPD denominator vanishes at offset {n}")
    di, dj, dij = darboux_parts(net, a, b)
    return float(np.linalg.norm(dij - params.gamma / d * (dj - di)))


def koenigs_nu(m, delta_eps, gamma=0.5):
    """mu(m) = Gamma((m + de + gamma + 1)/2) / Gamma((m + de - gamma + 1)/2), b(m) = 1."""
    hi = 0.5 * (m + delta_eps + gamma + 1.0)
    lo = 0.5 * (m + delta_eps - gamma + 1.0)
    if hi <= 0 or lo <= 0:
        raise DomainError(f"nonpositive gamma-function argument for m={m}, delta_eps={delta_eps}")
    return math.exp(log_gamma(hi) - log_gamma(lo))


def depd_coefficients(d, gamma=0.5):
    """(A, B) of the Darboux form for dEPD at denominator d."""
    if d == 0:
        raise SingularStencilError("dEPD denominator vanishes")
    return -gamma / d, gamma / d


def nu_relation_residuals(m, delta_eps, gamma=0.5):
    """Residuals of (A+1) nu_(i) = (B+1) nu_(j) and nu_(ij) = (A+B+1) nu.

    With nu(n_i, n_j) = mu(n_i - n_j): nu_(i) = mu(m+1), nu_(j) = mu(m-1),
    nu_(ij) = nu = mu(m).  Residuals are relative to the larger side.
    """
    A, B = depd_coefficients(m + delta_eps, gamma)
    nu = koenigs_nu(m, delta_eps, gamma)
    nu_i = koenigs_nu(m + 1, delta_eps, gamma)
    nu_j = koenigs_nu(m - 1, delta_eps, gamma)
    lhs, rhs = (A + 1) * nu_i, (B + 1) * nu_j
    r1 = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
    r2 = abs(nu - (A + B + 1) * nu) / nu
    return r1, r2


def koenigs_coefficients(nu, nu_i, nu_j, nu_ij):
    """(A, B) of the discrete Koenigs equation for given nu values on a face."""
    den = nu * (nu_i + nu_j)
    return (nu_j * nu_ij - nu * nu_i) / den, (nu_i * nu_ij - nu * nu_j) / den


def koenigs_equation_residual(net, params, n=(0, 0)):
    """Defect of D_iD_j x = A D_i x + B D_j x with A, B generated by nu = mu(n_i - n_j).

    The roles of i and j are swapped when that keeps the gamma arguments
    positive (the Koenigs property is symmetric in the two directions).
    """
    a, b = n
    i, j = net.dims
    di, dj, dij = darboux_parts(net, a, b)
    ni = net.origin[0] + a
    nj = net.origin[1] + b
    m = ni - nj
    de = params.eps[i] - params.eps[j]
    try:
        nus = [koenigs_nu(m + s, de, params.gamma) for s in (0, 1, -1)]
        A, B = koenigs_coefficients(nus[0], nus[1], nus[2], nus[0])
    except DomainError:
        nus = [koenigs_nu(-m + s, -de, params.gamma) for s in (0, -1, 1)]
        A, B = koenigs_coefficients(nus[0], nus[1], nus[2], nus[0])
    return float(np.linalg.norm(dij - A * di - B * dj))


def koenigs_compatibility(A, B):
    """|lhs/rhs - 1| for the Koenigs compatibility condition on a 2x2 face block.

    ``A`` and ``B`` are indexable as X[0][0] (base), X[1][0] (shift i),
    X[0][1] (shift j), X[1][1] (shift ij).
    """
    a, ai, aj, aij = A[0][0], A[1][0], A[0][1], A[1][1]
    b, bi, bj, bij = B[0][0], B[1][0], B[0][1], B[1][1]
    if -1.0 in (a, ai, aj, aij, b, bi, bj, bij):
        raise SingularStencilError("coefficient equal to -1")
    den_l = bij + 1.0
    den_r = (ai + bi + 1.0) * (b + 1.0)
    if den_l == 0.0 or den_r == 0.0:
        raise SingularStencilError("degenerate Koenigs coefficients")
    lhs = (aij + 1.0) / den_l
    rhs = (aj + bj + 1.0) / (ai + bi + 1.0) * (a + 1.0) / (b + 1.0)
    if rhs == 0.0:
        raise SingularStencilError("degenerate Koenigs coefficients")
    return abs(lhs / rhs - 1.0)


def diagonal_split_ratios(A, B):
    """Predicted ratios x_(i)M : M x_(j) and x M : M x_(ij) for the Darboux face."""
    return (B + 1.0) / (A + 1.0), 1.0 / (A + B + 1.0)


def koenigs_multiratio(star):
    """Multi-ratio of an 8-point vertex star (x_1, M, x_2, M, x_-1, M, x_-2, M)."""
    return multiratio(star)


def separable_rho_discrete(n, shift, gamma=0.5, branch="right"):
    """Separable dEPD factor: (n + shift)_gamma on the right half-axis,
    (-n - shift - gamma + 1)_gamma on the left one."""
    n = float(n)
    shift = float(shift)
    if branch == "right":
        arg = n + shift
    elif branch == "left":
        arg = -n - shift - gamma + 1.0
    else:
        raise DomainError(f"unknown branch {branch!r}")
    if arg < 0:
        raise DomainError(f"negative Pochhammer argument {arg} on the {branch} branch")
    return pochhammer(arg, gamma)
