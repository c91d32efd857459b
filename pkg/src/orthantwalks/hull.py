"""Incremental 3D convex hull for small point sets.

Point sets here are tens of points (simultaneous walk positions), so a
plain incremental construction with an epsilon on signed volumes is
enough; exact predicates are deliberately out of scope.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import DegenerateHullError

EPS = 1e-9


@dataclass
class HullMesh:
    vertices: list  # 3D points actually on the hull, in input coordinates
    faces: list  # triangles as vertex-index triples, oriented outward


def _sub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _cross(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _signed_volume(a, b, c, d):
    return _dot(_cross(_sub(b, a), _sub(c, a)), _sub(d, a))


def _initial_tetrahedron(pts):
    n = len(pts)
    p0 = 0
    p1 = None
    for i in range(1, n):
        if _dot(_sub(pts[i], pts[p0]), _sub(pts[i], pts[p0])) > EPS:
            p1 = i
            break
    if p1 is None:
        return None
    p2 = None
    best = EPS
    for i in range(n):
        c = _cross(_sub(pts[p1], pts[p0]), _sub(pts[i], pts[p0]))
        area2 = _dot(c, c)
        if area2 > best:
            best = area2
            p2 = i
    if p2 is None:
        return None
    p3 = None
    best = EPS
    for i in range(n):
        v = abs(_signed_volume(pts[p0], pts[p1], pts[p2], pts[i]))
        if v > best:
            best = v
            p3 = i
    if p3 is None:
        return None
    return p0, p1, p2, p3


def convex_hull_3d(points) -> HullMesh:
    """Hull of a full-dimensional point set.

    Raises DegenerateHullError (carrying the input points) when all
    points are coplanar or collinear.  Faces come out consistently
    oriented outward; every hull vertex is an input point.
    """
    pts = [tuple(float(c) for c in p) for p in points]
    if len(pts) < 4:
        raise DegenerateHullError(pts)
    tet = _initial_tetrahedron(pts)
    if tet is None:
        raise DegenerateHullError(pts)
    a, b, c, d = tet
    if _signed_volume(pts[a], pts[b], pts[c], pts[d]) > 0:
        # ensure d lies on the negative side so the first faces face out
        a, b = b, a
    faces = [(a, b, c), (a, c, d), (a, d, b), (b, d, c)]

    def outward(face, p):
        i, j, k = face
        return _signed_volume(pts[i], pts[j], pts[k], p)

    for idx in range(len(pts)):
        if idx in tet:
            continue
        p = pts[idx]
        visible = [f for f in faces if outward(f, p) > EPS]
        if not visible:
            continue
        visible_set = set(visible)
        horizon = []
        for f in visible:
            i, j, k = f
            for e in ((i, j), (j, k), (k, i)):
                # an edge is on the horizon if its mirrored face is kept
                mirrored = False
                for g in visible_set:
                    if g is f:
                        continue
                    gi, gj, gk = g
                    if (e[1], e[0]) in ((gi, gj), (gj, gk), (gk, gi)):
                        mirrored = True
                        break
                if not mirrored:
                    horizon.append(e)
        faces = [f for f in faces if f not in visible_set]
        for e in horizon:
            faces.append((e[0], e[1], idx))
    used = sorted({i for f in faces for i in f})
    remap = {i: k for k, i in enumerate(used)}
    return HullMesh(
        vertices=[pts[i] for i in used],
        faces=[(remap[i], remap[j], remap[k]) for i, j, k in faces],
    )


def point_in_hull(mesh: HullMesh, p, eps: float = EPS) -> bool:
    """True when p is inside or on every face plane of the mesh."""
    q = tuple(float(c) for c in p)
    scale = 1.0 + max(abs(c) for v in mesh.vertices for c in v)
    for i, j, k in mesh.faces:
        if _signed_volume(mesh.vertices[i], mesh.vertices[j], mesh.vertices[k], q) > eps * scale:
            return False
    return True
