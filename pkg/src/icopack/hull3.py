"""Small exact convex-hull utilities in three dimensions.

Point counts here are tiny (tens of vertices), so everything runs on
brute-force exact predicates over Q[tau] rather than an incremental hull.
Library hulls work in floats and cannot certify ties on quadratic
irrationals, which is exactly where these polytopes live.
"""

from __future__ import annotations

import functools
from math import gcd
from typing import Sequence

from icopack.feasy import IntRow, int_feasible
from icopack.icosa import Vec3
from icopack.qfield import GoldenNumber


def _cross(a: Vec3, b: Vec3) -> Vec3:
    return Vec3(
        a.y * b.z - a.z * b.y,
        a.z * b.x - a.x * b.z,
        a.x * b.y - a.y * b.x,
    )


def _separation_rows(p: Vec3, points: Sequence[Vec3]) -> list[IntRow]:
    """<c, q - p> <= -1 for all q != p, as integer rows in c."""
    rows: list[IntRow] = []
    for q in points:
        d = q - p
        if d.is_zero():
            continue
        scale = 1
        for c in d:
            scale = scale * c.q // gcd(scale, c.q)
        coeffs = tuple(
            (c.a * (scale // c.q), c.b * (scale // c.q)) for c in d
        )
        rows.append((coeffs, (-scale, 0), False))
    return rows


def extreme_points(points: Sequence[Vec3]) -> list[Vec3]:
    """The vertices of the convex hull, by exact separation feasibility.

    p is a vertex iff some linear functional is strictly larger at p than
    at every other point; after normalization that is feasibility of
    <c, q - p> <= -1 over all q.
    """
    unique = sorted(set(points))
    return [
        p for p in unique if int_feasible(_separation_rows(p, unique), 3)
    ]


def in_hull(p: Vec3, points: Sequence[Vec3]) -> bool:
    """Exact convex-hull membership: no functional separates p strictly."""
    return not int_feasible(_separation_rows(p, points), 3)


def _plane_key(normal: Vec3, c: GoldenNumber) -> tuple:
    comps = list(normal) + [c]
    lead = next(x for x in comps if x.sign() != 0)
    inv = lead.inverse()
    return tuple(x * inv for x in comps)


def hull_facets(points: Sequence[Vec3]) -> list[list[int]]:
    """Facets of a full-dimensional hull as index cycles into ``points``.

    Every non-collinear triple proposes a plane; planes supporting the
    whole set are kept, deduplicated exactly, and their incident points
    ordered counterclockwise as seen from outside (outward normals).
    """
    pts = list(points)
    n = len(pts)
    planes: dict[tuple, tuple[Vec3, GoldenNumber]] = {}
    for i in range(n):
        for j in range(i + 1, n):
            dij = pts[j] - pts[i]
            for l in range(j + 1, n):
                normal = _cross(dij, pts[l] - pts[i])
                if normal.is_zero():
                    continue
                c = normal.dot(pts[i])
                low = high = False
                for q in pts:
                    s = (normal.dot(q) - c).sign()
                    if s > 0:
                        high = True
                    elif s < 0:
                        low = True
                    if low and high:
                        break
                if low and high:
                    continue
                if not low and not high:
                    raise ValueError("points are not full-dimensional")
                if high:  # flip so the hull sits on the <= side
                    normal = -normal
                    c = -c
                planes.setdefault(_plane_key(normal, c), (normal, c))
    if not planes:
        raise ValueError("points are not full-dimensional")

    faces = []
    for normal, c in planes.values():
        members = [
            idx for idx, q in enumerate(pts) if (normal.dot(q) - c).sign() == 0
        ]
        if len(members) < 3:
            continue
        faces.append(_order_cycle(pts, members, normal))
    faces.sort()
    return faces


def _order_cycle(
    pts: list[Vec3], members: list[int], normal: Vec3
) -> list[int]:
    """Order coplanar points counterclockwise around their centroid.

    Cyclic order of rays is preserved by any orientation-preserving linear
    map, so comparing exact 2-D shadows (dots with two in-plane axes) gives
    the true order without square roots; (u, n x u) is right-handed about
    the outward normal, making the result counterclockwise from outside.
    """
    k = len(members)
    center = pts[members[0]]
    for idx in members[1:]:
        center = center + pts[idx]
    scaled = [pts[idx].scale(GoldenNumber(k)) - center for idx in members]
    u = next(v for v in scaled if not v.is_zero())
    w = _cross(normal, u)

    def half(v: Vec3) -> int:
        y = v.dot(w).sign()
        if y > 0 or (y == 0 and v.dot(u).sign() > 0):
            return 0
        return 1

    def compare(ia: int, ib: int) -> int:
        a, b = scaled[ia], scaled[ib]
        ha, hb = half(a), half(b)
        if ha != hb:
            return -1 if ha < hb else 1
        cross = a.dot(u) * b.dot(w) - a.dot(w) * b.dot(u)
        return -cross.sign()  # positive cross: a precedes b

    order = sorted(range(k), key=functools.cmp_to_key(compare))
    start = min(range(k), key=lambda pos: members[order[pos]])
    rotated = order[start:] + order[:start]
    return [members[pos] for pos in rotated]
