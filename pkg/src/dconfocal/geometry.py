"""Quad-level geometric primitives used by the net verifiers.

Points may live in any R^d; planarity is measured by the 3-volume spanned by
the three edge vectors from the first vertex (computed via QR, so it degrades
gracefully instead of squaring the condition number like a Gram determinant).
"""
import numpy as np

from .errors import GeometryError

PLANARITY_TOL = 1e-9


def _pts(points, count):
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != count:
        raise GeometryError(f"expected {count} points, got shape {arr.shape}")
    return arr


def planarity_residual(face):
    """Dimensionless non-planarity of a quad: |vol(p1-p0, p2-p0, p3-p0)| / (mean edge)^3."""
    p = _pts(face, 4)
    edges = [np.linalg.norm(p[(k + 1) % 4] - p[k]) for k in range(4)]
    mean_edge = sum(edges) / 4.0
    if mean_edge <= 0.0:
        raise GeometryError("zero-perimeter face")
    if p.shape[1] < 3:
        return 0.0
    M = np.stack([p[1] - p[0], p[2] - p[0], p[3] - p[0]], axis=1)
    r = np.linalg.qr(M, mode="r")
    vol = abs(float(np.prod(np.diag(r))))
    return vol / mean_edge ** 3


def diagonal_intersection(face, tol=PLANARITY_TOL):
    """Intersection of the diagonals [p0, p2] and [p1, p3] of a planar quad.

    ``face`` is ordered (x, x_(i), x_(ij), x_(j)).
    """
    p = _pts(face, 4)
    if planarity_residual(p) > tol:
        raise GeometryError("face is not planar")
    d1 = p[2] - p[0]
    d2 = p[3] - p[1]
    A = np.stack([d1, -d2], axis=1)
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] <= 1e-12 * sv[0]:
        raise GeometryError("diagonals are parallel or degenerate")
    (s, t), *_ = np.linalg.lstsq(A, p[1] - p[0], rcond=None)
    m1 = p[0] + s * d1
    m2 = p[1] + t * d2
    scale = max(np.linalg.norm(d1), np.linalg.norm(d2))
    if np.linalg.norm(m1 - m2) > tol * scale:
        raise GeometryError("diagonals do not meet")
    return 0.5 * (m1 + m2)


def directed_ratio(a, m, b):
    """Signed ratio AM : MB of collinear points, by projection on the direction of AB."""
    a = np.asarray(a, dtype=float)
    m = np.asarray(m, dtype=float)
    b = np.asarray(b, dtype=float)
    d = b - a
    length = np.linalg.norm(d)
    if length == 0.0:
        raise GeometryError("degenerate segment")
    d = d / length
    den = float(np.dot(b - m, d))
    if den == 0.0:
        raise GeometryError("ratio point coincides with segment end")
    return float(np.dot(m - a, d)) / den


def multiratio(points):
    """Cyclic multi-ratio of 2n points: prod_k (z_{2k-1}z_{2k}) / (z_{2k}z_{2k+1}).

    Consecutive triples (z_{2k-1}, z_{2k}, z_{2k+1}) must be collinear.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] % 2 or pts.shape[0] < 4:
        raise GeometryError("multiratio needs an even number (>= 4) of points")
    n = pts.shape[0]
    prod = 1.0
    for k in range(0, n, 2):
        prod *= directed_ratio(pts[k], pts[k + 1], pts[(k + 2) % n])
    return prod


def star_points(get, a, b):
    """The 8-point Menelaus cycle around vertex (a, b) of a 2D net.

    ``get(a, b)`` returns the vertex at the given 2D index.  Returns the cycle
    (x_1, M_{++}, x_2, M_{-+}, x_{-1}, M_{--}, x_{-2}, M_{+-}).
    """
    c = get(a, b)
    p1, p2, m1, m2 = get(a + 1, b), get(a, b + 1), get(a - 1, b), get(a, b - 1)
    mpp = diagonal_intersection([c, p1, get(a + 1, b + 1), p2])
    mmp = diagonal_intersection([c, p2, get(a - 1, b + 1), m1])
    mmm = diagonal_intersection([c, m1, get(a - 1, b - 1), m2])
    mpm = diagonal_intersection([c, m2, get(a + 1, b - 1), p1])
    return [p1, mpp, p2, mmp, m1, mmm, m2, mpm]


def vertex_star_multiratio(get, a, b):
    """Koenigs multi-ratio at an interior vertex; equals 1 for discrete Koenigs nets."""
    return multiratio(star_points(get, a, b))


def interior_angle(prev, at, nxt):
    u = np.asarray(prev, dtype=float) - np.asarray(at, dtype=float)
    v = np.asarray(nxt, dtype=float) - np.asarray(at, dtype=float)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise GeometryError("zero-length edge")
    cross = u[0] * v[1] - u[1] * v[0] if u.size == 2 else np.linalg.norm(np.cross(u, v))
    return float(np.arctan2(abs(cross), np.dot(u, v)))
