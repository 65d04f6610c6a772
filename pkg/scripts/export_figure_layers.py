"""Write an ellipsoid layer, its two dual layers and both focal polylines as OBJ/JSON.

The output directory can be loaded straight into Blender or ParaView.
"""
import argparse
import os

from dconfocal import lowdim, mesh
from dconfocal.discrete import DiscreteParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alphas", type=int, nargs=3, default=[8, 4, 1])
    ap.add_argument("--level", type=float, default=2.0, help="n_3 of the ellipsoid layer")
    ap.add_argument("--outdir", default="figure_layers")
    ap.add_argument("--reflect", action="store_true", help="glue the 8 orthant copies")
    args = ap.parse_args()

    params = DiscreteParams(tuple(args.alphas))
    a, b, c = params.alpha
    window = [(-a, -b), (-b, -c)]
    os.makedirs(args.outdir, exist_ok=True)
    for m in mesh.surface_with_dual_layers(params, 2, args.level, window):
        if args.reflect:
            m = mesh.reflect_mesh(m)
        name = f"ellipsoid_n3_{m.layer['level']:g}.obj"
        with open(os.path.join(args.outdir, name), "wb") as fh:
            fh.write(mesh.export_mesh(m, "obj"))
        print(f"{name}: {len(m.vertices)} vertices, {len(m.faces)} faces, planarity {m.planarity_bound:.1e}")

    P = lowdim.Params3D(a, b, c)
    _, hyp = lowdim.umbilic_curve_ellipsoid(P, int(args.level) + 6)
    _, ell = lowdim.umbilic_curve_hyperboloid(P)
    for kind, pts in (("focal_hyperbola", hyp), ("focal_ellipse", ell)):
        with open(os.path.join(args.outdir, kind + ".json"), "w") as fh:
            fh.write(lowdim.polyline_json(kind, pts))
        print(f"{kind}: {len(pts)} points")


if __name__ == "__main__":
    main()
