"""Seeded random instance builders used by tests, campaigns and the CLI.

Everything is deterministic given (params, seed); circle instances draw
angles from a dyadic grid so the fast angle machinery applies.
"""
from __future__ import annotations

import functools
import random
from fractions import Fraction

from .errors import InvalidInstance, NotConvex
from .geometry import (
    BLUE,
    BNM,
    CIRCLE,
    CONVEX,
    GENERAL,
    MNM,
    RED,
    Instance,
    circle_point,
    plane_point,
)

_ANGLE_BITS = 20


def random_circle_instance(n: int, kind: str, seed: int) -> Instance:
    """2n points at distinct dyadic angles, in random arrival order."""
    rng = random.Random(seed)
    grid = 1 << _ANGLE_BITS
    ticks = rng.sample(range(grid), 2 * n)
    points = []
    for idx, t in enumerate(ticks, start=1):
        color = (BLUE if idx <= n else RED) if kind == BNM else None
        points.append(circle_point(Fraction(t, grid), idx, color))
    return Instance.build(points, kind, CIRCLE)


def random_convex_polygon_instance(n: int, kind: str, seed: int) -> Instance:
    """2n integer points in strictly convex position, random arrival order.

    Edge vectors come from two shuffled coordinate chains (Valtr's
    construction) and are sorted exactly by direction; draws with parallel
    vectors would create collinear hull edges and are retried.
    """
    rng = random.Random(seed)
    m = 2 * n
    if m == 2:
        x1, y1 = rng.randrange(100), rng.randrange(100)
        x2, y2 = x1 + 1 + rng.randrange(100), y1 + rng.randrange(100)
        pts = [
            plane_point(x1, y1, 1, BLUE if kind == BNM else None),
            plane_point(x2, y2, 2, RED if kind == BNM else None),
        ]
        return Instance.build(pts, kind, CONVEX)
    for _ in range(64):
        vecs = _polygon_vectors(rng, m)
        if vecs is None:
            continue
        verts = []
        x = y = 0
        for dx, dy in vecs:
            verts.append((x, y))
            x += dx
            y += dy
        order = list(range(m))
        rng.shuffle(order)
        points = []
        for arrival, t in enumerate(order, start=1):
            color = (BLUE if arrival <= n else RED) if kind == BNM else None
            points.append(plane_point(verts[t][0], verts[t][1], arrival, color))
        try:
            return Instance.build(points, kind, CONVEX)
        except (NotConvex, InvalidInstance):
            continue
    raise NotConvex(f"could not build a strict convex polygon for n={n}, seed={seed}")


def _polygon_vectors(rng: random.Random, m: int) -> list[tuple[int, int]] | None:
    """m nonzero integer vectors summing to zero, sorted by direction."""
    span = 6 * m + 12

    def deltas() -> list[int]:
        vals = sorted(rng.sample(range(span), m))
        lo, hi = vals[0], vals[-1]
        mask = [rng.getrandbits(1) for _ in range(m - 2)]
        chain_a = [lo] + [v for v, s in zip(vals[1:-1], mask) if s] + [hi]
        chain_b = [lo] + [v for v, s in zip(vals[1:-1], mask) if not s] + [hi]
        out = [b - a for a, b in zip(chain_a, chain_a[1:])]
        out += [a - b for a, b in zip(chain_b, chain_b[1:])]
        return out

    dxs = deltas()
    dys = deltas()
    rng.shuffle(dys)
    vecs = list(zip(dxs, dys))

    def half(v) -> int:
        dx, dy = v
        return 0 if dy > 0 or (dy == 0 and dx > 0) else 1

    def cross(a, b) -> int:
        return a[0] * b[1] - a[1] * b[0]

    def cmp(a, b) -> int:
        if half(a) != half(b):
            return half(a) - half(b)
        c = cross(a, b)
        return -1 if c > 0 else (1 if c < 0 else 0)

    vecs.sort(key=functools.cmp_to_key(cmp))
    for a, b in zip(vecs, vecs[1:]):
        if cross(a, b) == 0:
            return None  # parallel edges would be collinear
    return vecs


def random_convex_instance(n: int, kind: str, seed: int) -> Instance:
    """Alternate between circle and polygon realizations of convex position."""
    if seed % 2 == 0:
        return random_circle_instance(n, kind, seed)
    return random_convex_polygon_instance(n, kind, seed)


def random_general_instance(n: int, seed: int, span: int = 10**6) -> Instance:
    """2n integer points in general position with pairwise distinct x.

    On a span this wide a collinear triple among a random draw is rare, so
    the whole batch is drawn at once and redrawn on the odd failure.
    """
    rng = random.Random(seed)
    m = 2 * n
    for _ in range(64):
        xs = rng.sample(range(span), m)
        ys = [rng.randrange(span) for _ in range(m)]
        pts = list(zip(xs, ys))
        if _has_collinear_triple(pts):
            continue
        points = [plane_point(x, y, i + 1) for i, (x, y) in enumerate(pts)]
        return Instance.build(points, MNM, GENERAL, validate=False)
    raise InvalidInstance("could not reach general position; widen the span")


def _has_collinear_triple(pts: list[tuple[int, int]]) -> bool:
    m = len(pts)
    for i in range(m - 2):
        ax, ay = pts[i]
        for j in range(i + 1, m - 1):
            dx, dy = pts[j][0] - ax, pts[j][1] - ay
            for k in range(j + 1, m):
                if dx * (pts[k][1] - ay) == dy * (pts[k][0] - ax):
                    return True
    return False
