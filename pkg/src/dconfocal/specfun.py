"""Gamma-function kernel: log-gamma, Pochhammer symbol, discrete square root.

The discrete square root ``dsqrt(u) = Gamma(u + 1/2) / Gamma(u)`` is the
building block of every discrete confocal net. Ratios are never formed as
quotients of raw gamma values (those overflow past u ~ 171).  For large u the
log-ratio is summed from the Stirling series with the leading term written via
log1p, which keeps full relative accuracy; a plain lgamma difference loses
about ulp(lgamma(u)) and degrades to ~1e-10 relative error at u ~ 1e6.
Small arguments are shifted up with Gamma(u + 1) = u Gamma(u).
"""
import math

from .errors import DomainError


def _check_finite(u, name="u"):
    if not math.isfinite(u):
        raise DomainError(f"{name} must be finite, got {u!r}")


def log_gamma(u):
    """ln Gamma(u) for u > 0."""
    u = float(u)
    _check_finite(u)
    if u <= 0.0:
        raise DomainError(f"log_gamma requires u > 0, got {u}")
    return math.lgamma(u)


def pochhammer(u, gamma):
    """Generalized Pochhammer symbol (u)_gamma = Gamma(u + gamma) / Gamma(u).

    Returns exactly 0 at u = 0 (limit 1/Gamma(0) = 0).
    """
    u = float(u)
    gamma = float(gamma)
    _check_finite(u)
    _check_finite(gamma, "gamma")
    if gamma <= 0.0:
        raise DomainError(f"pochhammer requires gamma > 0, got {gamma}")
    if u < 0.0:
        raise DomainError(f"pochhammer requires u >= 0, got {u}")
    if u == 0.0:
        return 0.0
    if gamma > _ASYMPTOTIC_FROM:
        return math.exp(math.lgamma(u + gamma) - math.lgamma(u))
    # (u)_g = (u + n)_g * prod_{k<n} (u + k) / (u + k + g)
    factor = 1.0
    while u < _ASYMPTOTIC_FROM:
        factor *= u / (u + gamma)
        u += 1.0
    return factor * math.exp(_log_ratio_asymptotic(u, gamma))


_ASYMPTOTIC_FROM = 20.0
# Stirling coefficients B_2k / (2k (2k - 1)) for k = 1..6
_STIRLING = (1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188, -691 / 360360)


def _stirling_tail(x):
    inv = 1.0 / x
    inv2 = inv * inv
    acc = 0.0
    for c in reversed(_STIRLING):
        acc = acc * inv2 + c
    return acc * inv


def _log_ratio_asymptotic(u, gamma):
    """ln Gamma(u + g) - ln Gamma(u) for u >= 20."""
    lead = (u - 0.5) * math.log1p(gamma / u) + gamma * math.log(u + gamma) - gamma
    return lead + (_stirling_tail(u + gamma) - _stirling_tail(u))


def dsqrt(u):
    """Discrete square root (u)_{1/2}; dsqrt(0) = 0."""
    return pochhammer(u, 0.5)
