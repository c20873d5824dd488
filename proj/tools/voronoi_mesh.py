#!/usr/bin/env python3
"""Centroidal Voronoi meshes of a rectangle, written in the tpdg text mesh format.

Seeds are mirrored across the four sides so that the Voronoi cells of the
original seeds are clipped exactly to the box; Lloyd iterations move each seed
to the centroid of its cell.

    voronoi_mesh.py 300 -o voronoi_300.mesh
    voronoi_mesh.py --from-polymesher nodes.txt elements.txt -o mesh.mesh
"""

import argparse
import sys

import numpy as np
from scipy.spatial import Voronoi


def mirrored(points, box):
    x0, x1, y0, y1 = box
    px, py = points[:, 0], points[:, 1]
    return np.vstack([
        points,
        np.column_stack([2 * x0 - px, py]),
        np.column_stack([2 * x1 - px, py]),
        np.column_stack([px, 2 * y0 - py]),
        np.column_stack([px, 2 * y1 - py]),
    ])


def polygon_area_centroid(poly):
    x, y = poly[:, 0], poly[:, 1]
    xs, ys = np.roll(x, -1), np.roll(y, -1)
    cross = x * ys - xs * y
    area = 0.5 * cross.sum()
    cx = ((x + xs) * cross).sum() / (6 * area)
    cy = ((y + ys) * cross).sum() / (6 * area)
    return area, np.array([cx, cy])


def voronoi_cells(seeds, box):
    vor = Voronoi(mirrored(seeds, box))
    cells = []
    for i in range(len(seeds)):
        region = vor.regions[vor.point_region[i]]
        if -1 in region or not region:
            raise RuntimeError("unbounded cell for seed %d" % i)
        cells.append(region)
    return vor.vertices, cells


def lloyd(seeds, box, iterations):
    for _ in range(iterations):
        verts, cells = voronoi_cells(seeds, box)
        seeds = np.array([polygon_area_centroid(verts[c])[1] for c in cells])
    return seeds


def deduplicate(verts, cells, box, tol):
    x0, x1, y0, y1 = box
    scale = max(x1 - x0, y1 - y0)
    snapped = verts.copy()
    # pin vertices that should sit on the boundary
    for col, lo, hi in ((0, x0, x1), (1, y0, y1)):
        snapped[np.abs(snapped[:, col] - lo) < tol * scale, col] = lo
        snapped[np.abs(snapped[:, col] - hi) < tol * scale, col] = hi
    keys = {}
    index = np.empty(len(snapped), dtype=int)
    out = []
    for i, p in enumerate(snapped):
        key = (round(p[0] / (tol * scale)), round(p[1] / (tol * scale)))
        if key not in keys:
            keys[key] = len(out)
            out.append(p)
        index[i] = keys[key]
    new_cells = []
    for c in cells:
        ring = [int(index[v]) for v in c]
        ring = [v for j, v in enumerate(ring) if v != ring[j - 1]]
        new_cells.append(ring)
    return np.array(out), new_cells


def orient_ccw(verts, cells):
    out = []
    for c in cells:
        area, _ = polygon_area_centroid(verts[c])
        out.append(c if area > 0 else c[::-1])
    return out


def compact(verts, cells):
    used = sorted({v for c in cells for v in c})
    remap = {v: i for i, v in enumerate(used)}
    return verts[used], [[remap[v] for v in c] for c in cells]


def write_mesh(stream, verts, cells, regions=None):
    stream.write("vertices %d\n" % len(verts))
    for x, y in verts:
        stream.write("%.17g %.17g\n" % (x, y))
    stream.write("cells %d\n" % len(cells))
    for c in cells:
        stream.write("%d %s\n" % (len(c), " ".join(str(v) for v in c)))
    stream.write("regions\n")
    for r in regions if regions is not None else [1] * len(cells):
        stream.write("%d\n" % r)


def read_polymesher(node_path, element_path):
    """PolyMesher's Node (n x 2) and Element (1-based, one polygon per row) arrays
    dumped as whitespace-separated text, e.g. with dlmwrite."""
    verts = np.loadtxt(node_path, ndmin=2)
    cells = []
    with open(element_path) as f:
        for line in f:
            ids = [int(float(t)) for t in line.replace(",", " ").split()]
            ids = [i - 1 for i in ids if i > 0]
            if ids:
                cells.append(ids)
    return verts, cells


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("cells", nargs="?", type=int, help="number of Voronoi cells")
    ap.add_argument("--box", nargs=4, type=float, default=[0.0, 1.0, 0.0, 1.0],
                    metavar=("X0", "X1", "Y0", "Y1"))
    ap.add_argument("--iterations", type=int, default=50, help="Lloyd iterations")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--tol", type=float, default=1e-9, help="relative vertex merge tolerance")
    ap.add_argument("--from-polymesher", nargs=2, metavar=("NODES", "ELEMENTS"))
    ap.add_argument("-o", "--output", default="-")
    args = ap.parse_args(argv)

    box = tuple(args.box)
    if args.from_polymesher:
        verts, cells = read_polymesher(*args.from_polymesher)
    else:
        if not args.cells or args.cells < 1:
            ap.error("give a positive cell count or --from-polymesher")
        rng = np.random.default_rng(args.seed)
        seeds = np.column_stack([rng.uniform(box[0], box[1], args.cells),
                                 rng.uniform(box[2], box[3], args.cells)])
        seeds = lloyd(seeds, box, args.iterations)
        verts, cells = voronoi_cells(seeds, box)
    verts, cells = deduplicate(np.asarray(verts, dtype=float), cells, box, args.tol)
    cells = orient_ccw(verts, cells)
    verts, cells = compact(verts, cells)

    if args.output == "-":
        write_mesh(sys.stdout, verts, cells)
    else:
        with open(args.output, "w") as f:
            write_mesh(f, verts, cells)
    return 0


if __name__ == "__main__":
    sys.exit(main())
