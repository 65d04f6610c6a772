"""Quad meshes of discrete confocal quadrics, dual layers, reflection and export.

A layer fixes n_i at a value (integer or half-integer) and lets the other
coordinates run over a window of the same parity.  Vertices carry their
doubled lattice coordinates so reports can point back to the lattice.
"""
from dataclasses import dataclass, field
import io
import itertools
import json
import math

import numpy as np

from .discrete import HalfLatticePoint, as_net, in_domain
from .errors import DomainError, GeometryError, ParameterError
from .geometry import PLANARITY_TOL, planarity_residual  # noqa: F401  (re-exported)


@dataclass
class QuadSurfaceMesh:
    vertices: list
    faces: list
    lattice: list
    layer: dict = field(default_factory=dict)
    planarity_bound: float = 0.0

    def __post_init__(self):
        nv = len(self.vertices)
        for face in self.faces:
            if len(face) != 4 or any(not 0 <= v < nv for v in face):
                raise GeometryError(f"bad face {face} for {nv} vertices")
        if len(self.lattice) != nv:
            raise GeometryError("one lattice record per vertex is required")

    def face_points(self, face):
        return np.array([self.vertices[v] for v in face], dtype=float)

    def planarity(self):
        return [planarity_residual(self.face_points(f)) for f in self.faces]


def reflect_orthants(points):
    """All sign copies of the given points, deduplicated (mirror points appear once)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    N = pts.shape[1]
    seen = {}
    for s in itertools.product((1.0, -1.0), repeat=N):
        for p in pts:
            q = tuple(float(v) + 0.0 for v in p * np.array(s))
            seen.setdefault(q, None)
    return np.array(list(seen))


def reflect_mesh(mesh):
    """Union of the 2^N sign copies; vertices on mirror planes are shared.

    Lattice records of the result are [*m, *signs] of the first copy that
    produced the vertex.
    """
    N = len(mesh.vertices[0])
    index = {}
    verts, lattice, faces = [], [], []
    for s in itertools.product((1, -1), repeat=N):
        local = []
        for v, m in zip(mesh.vertices, mesh.lattice):
            q = tuple(float(a) * sg + 0.0 for a, sg in zip(v, s))
            if q not in index:
                index[q] = len(verts)
                verts.append(list(q))
                lattice.append(list(m) + list(s))
            local.append(index[q])
        for f in mesh.faces:
            g = [local[v] for v in f]
            if len(set(g)) == 4:
                faces.append(g if np.prod(s) > 0 else g[::-1])
    # faces lying in a mirror plane are produced twice
    uniq, keys = [], set()
    for f in faces:
        key = frozenset(f)
        if key not in keys:
            keys.add(key)
            uniq.append(f)
    layer = dict(mesh.layer, reflected=True)
    return QuadSurfaceMesh(verts, uniq, lattice, layer, mesh.planarity_bound)


def _layer_points(params, fixed, level, window):
    """Doubled-coordinate grid of a layer: dict (a, b) -> HalfLatticePoint."""
    N = params.N
    lvl = 2 * float(level)
    if lvl != round(lvl):
        raise DomainError(f"level {level} is not a multiple of 1/2")
    lvl = int(round(lvl))
    par = lvl & 1
    free = [k for k in range(N) if k != fixed]
    if len(window) != len(free):
        raise DomainError(f"need {len(free)} window axes for the free directions")
    if any(float(v) != int(v) for w in window for v in w):
        raise DomainError(f"layer window bounds must be integers, got {window}")
    axes = [range(2 * int(lo) + par, 2 * int(hi) + 1, 2) for lo, hi in window]
    grid = {}
    for idx, ms in zip(itertools.product(*[range(len(a)) for a in axes]), itertools.product(*axes)):
        m = [0] * N
        m[fixed] = lvl
        for k, v in zip(free, ms):
            m[k] = v
        p = HalfLatticePoint(tuple(m))
        if in_domain(params, p):
            grid[idx] = p
    if not grid:
        raise DomainError("layer window contains no domain points")
    return grid


def surface_mesh(params, fixed, level, window, net=None):
    """Mesh of the layer n_fixed = level.  For N = 2 the layer is a polyline (no faces)."""
    net = as_net(params if net is None else net)
    grid = _layer_points(params, fixed, level, window)
    keys = sorted(grid)
    index = {k: v for v, k in enumerate(keys)}
    verts = [[float(c) for c in net(grid[k])] for k in keys]
    lattice = [list(grid[k].m) for k in keys]
    faces = []
    if params.N == 3:
        for (a, b) in keys:
            quad = [(a, b), (a + 1, b), (a + 1, b + 1), (a, b + 1)]
            if all(q in index for q in quad):
                faces.append([index[q] for q in quad])
    layer = {"alpha": list(params.alpha), "fixed": int(fixed), "level": float(level),
             "parity": int(grid[keys[0]].m[0] & 1), "window": [list(w) for w in window],
             "kind": "surface" if params.N == 3 else "polyline"}
    mesh = QuadSurfaceMesh(verts, faces, lattice, layer)
    vals = mesh.planarity()
    mesh.planarity_bound = max(vals) if vals else 0.0
    return mesh


def surface_with_dual_layers(params, fixed, level, window, net=None):
    """The layer at ``level`` and the two dual layers at level -/+ 1/2."""
    dual_window = [(lo - 1, hi + 1) for lo, hi in window]
    out = [surface_mesh(params, fixed, level, window, net)]
    for d in (-0.5, 0.5):
        try:
            out.append(surface_mesh(params, fixed, level + d, dual_window, net))
        except DomainError:
            pass
    return out


# --- orthogonality between edges and dual facets --------------------------------

def dual_facet_points(n, i):
    """Corners of the dual facet crossing the edge (n, n + e_i).

    For N = 3 and {j, k} the other directions these are n + f/2 - e_j - e_k,
    n + f/2 - e_j, n + f/2, n + f/2 - e_k.  In general: n + f/2 - sum_{S} e_s
    over subsets S of the directions other than i.
    """
    p = n if isinstance(n, HalfLatticePoint) else HalfLatticePoint.from_n(n)
    N = p.N
    centre = p.half_shift((1,) * N)
    others = [k for k in range(N) if k != i]
    pts = []
    for sub in itertools.product((1, 0), repeat=len(others)):
        q = centre
        for k, s in zip(others, sub):
            if s:
                q = q.shift(k, -1)
        pts.append(q)
    return pts


def edge_facet_angle(net, n, i):
    """Angle (rad) between the edge x(n)x(n+e_i) and the normal of the best-fit
    hyperplane through the dual facet."""
    net = as_net(net)
    p = n if isinstance(n, HalfLatticePoint) else HalfLatticePoint.from_n(n)
    e = net(p.shift(i)) - net(p)
    F = np.array([net(q) for q in dual_facet_points(p, i)])
    F = F - F.mean(axis=0)
    _, _, vt = np.linalg.svd(F)
    N = F.shape[1]
    span = vt[: N - 1]
    along = span.T @ (span @ e)
    normal_part = e - along
    return float(math.atan2(np.linalg.norm(along), np.linalg.norm(normal_part)))


def edge_facet_angles(net, points, directions=None):
    """Angles for every edge whose stencil lies inside the net's domain; returns (angles, skipped)."""
    net = as_net(net)
    out, skipped = [], 0
    for p in points:
        for i in (range(p.N) if directions is None else directions):
            stencil = [p, p.shift(i)] + dual_facet_points(p, i)
            if not all(net.contains(q) for q in stencil):
                skipped += 1
                continue
            out.append(edge_facet_angle(net, p, i))
    return out, skipped


# --- export / import ------------------------------------------------------------

def _v3(v):
    v = list(v) + [0.0] * (3 - len(v))
    return v


def export_obj(mesh):
    buf = io.StringIO()
    buf.write(f"# layer {json.dumps(mesh.layer, sort_keys=True)}\n")
    for v in mesh.vertices:
        buf.write("v " + " ".join(repr(float(c)) for c in _v3(v)) + "\n")
    for f in mesh.faces:
        buf.write("f " + " ".join(str(k + 1) for k in f) + "\n")
    return buf.getvalue()


def load_obj(text):
    """(vertices, faces) from OBJ text; faces are converted back to 0-based."""
    verts, faces = [], []
    for line in text.splitlines():
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "v":
            verts.append([float(c) for c in parts[1:]])
        elif parts[0] == "f":
            faces.append([int(c.split("/")[0]) - 1 for c in parts[1:]])
    return verts, faces


def export_json(mesh):
    doc = {"layer": mesh.layer, "vertices": [[float(c) for c in v] for v in mesh.vertices],
           "faces": [list(map(int, f)) for f in mesh.faces], "lattice": [list(map(int, m)) for m in mesh.lattice]}
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def import_json(text):
    try:
        doc = json.loads(text)
        mesh = QuadSurfaceMesh(doc["vertices"], doc["faces"], doc["lattice"], doc["layer"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParameterError(f"malformed mesh JSON: {exc}") from None
    vals = mesh.planarity()
    mesh.planarity_bound = max(vals) if vals else 0.0
    return mesh


def export_mesh(mesh, fmt="obj"):
    """Serialized mesh as bytes."""
    if fmt == "obj":
        return export_obj(mesh).encode()
    if fmt == "json":
        return export_json(mesh).encode()
    raise ParameterError(f"unknown mesh format {fmt!r}")
