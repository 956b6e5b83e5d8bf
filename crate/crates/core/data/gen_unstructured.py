"""Irregular Delaunay mesh of the 2 m x 1 m notched plate.

Writes plate_unstructured.mesh next to this script. The notch is a row of
vertices on y = 0.5 for x <= 0.5; load it with the phase-field notch model.
Needs numpy and scipy.
"""

from pathlib import Path

import numpy as np
from scipy.spatial import Delaunay

TARGET = 2464
W, H, NOTCH = 2.0, 1.0, 0.5


def boundary():
    s = 1 / 16
    pts = []
    for x in np.arange(0, W, s):
        pts.append((x, 0.0))
    for y in np.arange(0, H, s):
        pts.append((W, y))
    for x in np.arange(W, 0, -s):
        pts.append((x, H))
    for y in np.arange(H, 0, -s):
        pts.append((0.0, y))
    return np.array(pts)


def main():
    rng = np.random.default_rng(2464)
    bnd = boundary()
    # Delaunay of a convex point set with nb hull points has 2 ni + nb - 2 triangles
    n_inner = (TARGET + 2 - len(bnd)) // 2
    notch = [(x, 0.5 * H) for x in np.linspace(0.04, NOTCH, 13)]
    inner = list(notch)
    while len(inner) < n_inner:
        p = rng.uniform([0.01, 0.01], [W - 0.01, H - 0.01])
        if p[0] < NOTCH + 0.03 and abs(p[1] - 0.5 * H) < 0.02:
            continue
        if min(np.hypot(*(p - q)) for q in inner[-400:] + notch) < 0.02:
            continue
        inner.append(tuple(p))
    pts = np.vstack([bnd, np.array(inner)])
    tri = Delaunay(pts).simplices
    assert len(tri) == TARGET, len(tri)

    a, b, c = pts[tri[:, 0]], pts[tri[:, 1]], pts[tri[:, 2]]
    area = 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
    tri[area < 0] = tri[area < 0][:, [0, 2, 1]]
    assert np.abs(area).min() > 1e-8

    nb = len(bnd)
    lines = [f"vertices {len(pts)}"]
    lines += [f"{x:.12g} {y:.12g}" for x, y in pts]
    lines.append(f"triangles {len(tri)}")
    lines += [f"{i} {j} {k}" for i, j, k in tri]
    edges = []
    for i in range(nb):
        j = (i + 1) % nb
        horizontal = pts[i][1] == pts[j][1] and pts[i][1] in (0.0, H)
        edges.append(f"{i} {j} {'neumann' if horizontal else 'free'}")
    lines.append(f"boundary {len(edges)}")
    lines += edges
    Path(__file__).with_name("plate_unstructured.mesh").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
