"""Exact planar geometry: points, instances, matchings, and the predicates
everything else is built on.

Coordinates are exact rationals.  A point on the unit circle additionally
carries an exact turn-fraction angle in [0, 1), measured counterclockwise
from the positive x axis; every predicate whose operands all lie on the
circle is decided from angle order alone.  The x/y stored for circle points
are display placeholders (nearest representable position) and never reach
a predicate.  Clockwise means decreasing angle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .errors import (
    Degenerate,
    InvalidInstance,
    NotConvex,
    SharedEndpoint,
)

Rational = Fraction

BLUE = "blue"
RED = "red"

LEFT = "left"
RIGHT = "right"
COLLINEAR = "collinear"

MNM = "MNM"
BNM = "BNM"

CIRCLE = "circle"
CONVEX = "convex"
GENERAL = "general"

KINDS = (MNM, BNM)
GEOMETRIES = (CIRCLE, CONVEX, GENERAL)


@dataclass(frozen=True, slots=True)
class Point:
    """A planar point with its arrival position in the online sequence.

    ``angle`` is present exactly when the point is declared to lie on the
    unit circle; in that case x/y are placeholders for rendering only.
    """

    x: Fraction
    y: Fraction
    arrival_index: int
    color: str | None = None
    angle: Fraction | None = None

    def position(self) -> tuple:
        """Hashable exact position: the angle on circles, else coordinates."""
        if self.angle is not None:
            return ("angle", self.angle)
        return ("xy", self.x, self.y)


def _raw_fraction(num: int, den: int) -> Fraction:
    """Fraction from an already-coprime pair, skipping the gcd pass.

    Instance generators build millions of exact dyadics; the public
    constructor's normalization dominates their runtime otherwise.
    """
    f = Fraction.__new__(Fraction)
    f._numerator = num
    f._denominator = den
    return f


def _float_fraction(v: float) -> Fraction:
    return _raw_fraction(*v.as_integer_ratio())


def circle_point(angle: Fraction | int, arrival_index: int, color: str | None = None) -> Point:
    """Point on the unit circle at an exact turn fraction.

    The rational x/y are derived from the float cosine/sine once, here, and
    are only ever used by renderers and length surrogates.
    """
    if not isinstance(angle, Fraction):
        angle = Fraction(angle) % 1
    num, den = angle.numerator, angle.denominator
    if not 0 <= num < den:
        angle = angle % 1
        num, den = angle.numerator, angle.denominator
    rad = 2.0 * math.pi * (num / den)
    return Point(
        x=_float_fraction(math.cos(rad)),
        y=_float_fraction(math.sin(rad)),
        arrival_index=arrival_index,
        color=color,
        angle=angle,
    )


def plane_point(x, y, arrival_index: int, color: str | None = None) -> Point:
    return Point(Fraction(x), Fraction(y), arrival_index, color, None)


def same_position(a: Point, b: Point) -> bool:
    if a.angle is not None:
        return b.angle is not None and a.angle == b.angle
    return b.angle is None and a.x == b.x and a.y == b.y


def angle_sort_keys(pts: Sequence[Point]) -> list:
    """Exact sort keys for circle points: plain ints when every angle
    denominator is a power of two (true of all at-scale generators here),
    else the Fractions themselves."""
    denoms = [p.angle.denominator for p in pts]
    if all(d & (d - 1) == 0 for d in denoms):
        kmax = max(d.bit_length() - 1 for d in denoms)
        return [
            p.angle.numerator << (kmax - (p.angle.denominator.bit_length() - 1))
            for p in pts
        ]
    return [p.angle for p in pts]


# ---------------------------------------------------------------------------
# predicates


def _cross_sign(a: Point, b: Point, c: Point) -> int:
    """Sign of (b-a) x (c-a), computed over the integers.

    Clearing denominators instead of doing Fraction arithmetic skips the
    gcd normalization that otherwise dominates every predicate.
    """
    ax, ay, bx, by, cx, cy = a.x, a.y, b.x, b.y, c.x, c.y
    n1 = bx.numerator * ax.denominator - ax.numerator * bx.denominator
    n2 = cy.numerator * ay.denominator - ay.numerator * cy.denominator
    n3 = by.numerator * ay.denominator - ay.numerator * by.denominator
    n4 = cx.numerator * ax.denominator - ax.numerator * cx.denominator
    lhs = n1 * n2 * by.denominator * cx.denominator
    rhs = n3 * n4 * bx.denominator * cy.denominator
    if lhs > rhs:
        return 1
    if lhs < rhs:
        return -1
    return 0


def orientation(a: Point, b: Point, c: Point) -> str:
    """Sign of the exact cross product (b-a) x (c-a).

    "left" means c is strictly counterclockwise of the ray a->b.  When all
    three points carry angles the answer comes from cyclic angle order
    (three distinct circle points are never collinear).
    """
    if a.angle is not None and b.angle is not None and c.angle is not None:
        db = (b.angle - a.angle) % 1
        dc = (c.angle - a.angle) % 1
        if db == 0 or dc == 0 or db == dc:
            raise Degenerate("coincident circle points in orientation test")
        return LEFT if db < dc else RIGHT
    sign = _cross_sign(a, b, c)
    if sign > 0:
        return LEFT
    if sign < 0:
        return RIGHT
    return COLLINEAR


def _in_open_ccw_arc(a: Fraction, b: Fraction, x: Fraction) -> bool:
    """True iff angle x lies strictly inside the ccw arc from a to b."""
    dx = (x - a) % 1
    return 0 < dx < (b - a) % 1


def _on_segment(a: Point, b: Point, x: Point) -> bool:
    """x assumed collinear with a-b; is it inside the closed bounding box?"""
    return (
        min(a.x, b.x) <= x.x <= max(a.x, b.x)
        and min(a.y, b.y) <= x.y <= max(a.y, b.y)
    )


def segments_cross(e1: tuple[Point, Point], e2: tuple[Point, Point]) -> bool:
    """True iff the closed segments intersect.

    Endpoints must be four distinct points; a shared endpoint is an error
    because matched points are never reused.
    """
    p1, p2 = e1
    q1, q2 = e2
    for u in (p1, p2):
        for v in (q1, q2):
            if same_position(u, v):
                raise SharedEndpoint(
                    f"segments share endpoint at arrival {u.arrival_index}/{v.arrival_index}"
                )
    if (
        p1.angle is not None
        and p2.angle is not None
        and q1.angle is not None
        and q2.angle is not None
    ):
        # chords of a circle cross iff their endpoints interleave
        c_in = _in_open_ccw_arc(p1.angle, p2.angle, q1.angle)
        d_in = _in_open_ccw_arc(p1.angle, p2.angle, q2.angle)
        return c_in != d_in
    s1 = orientation(q1, q2, p1)
    s2 = orientation(q1, q2, p2)
    s3 = orientation(p1, p2, q1)
    s4 = orientation(p1, p2, q2)
    if COLLINEAR not in (s1, s2, s3, s4):
        return s1 != s2 and s3 != s4
    if s1 == COLLINEAR and _on_segment(q1, q2, p1):
        return True
    if s2 == COLLINEAR and _on_segment(q1, q2, p2):
        return True
    if s3 == COLLINEAR and _on_segment(p1, p2, q1):
        return True
    if s4 == COLLINEAR and _on_segment(p1, p2, q2):
        return True
    return False


def half_plane_side(edge: tuple[Point, Point], p: Point) -> str:
    """Which side of the directed edge (from, to) the point p lies on.

    "left" is the half-plane swept by counterclockwise angles in (0, pi)
    from the edge direction.
    """
    a, b = edge
    side = orientation(a, b, p)
    if side == COLLINEAR:
        raise Degenerate(
            f"point {p.arrival_index} is collinear with edge "
            f"({a.arrival_index}, {b.arrival_index})"
        )
    return side


# ---------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class Instance:
    """An ordered point sequence for one online matching problem.

    For BNM the first n points are blue (offline batch) and the last n red.
    Construct through :meth:`build` so invariants are checked; internal
    generators that guarantee them may pass ``validate=False``.
    """

    points: tuple[Point, ...]
    kind: str
    geometry: str

    @classmethod
    def build(
        cls,
        points: Sequence[Point],
        kind: str,
        geometry: str,
        validate: bool = True,
    ) -> "Instance":
        inst = cls(tuple(points), kind, geometry)
        if validate:
            validate_instance(inst)
        return inst

    @property
    def n(self) -> int:
        return len(self.points) // 2

    @property
    def size(self) -> int:
        return len(self.points)

    def point(self, arrival_index: int) -> Point:
        return self.points[arrival_index - 1]

    def blues(self) -> tuple[Point, ...]:
        return self.points[: self.n]

    def reds(self) -> tuple[Point, ...]:
        return self.points[self.n :]


def validate_instance(inst: Instance) -> Instance:
    pts = inst.points
    m = len(pts)
    if m == 0 or m % 2 != 0:
        raise InvalidInstance("instances need a positive even number of points")
    if inst.kind not in KINDS:
        raise InvalidInstance(f"unknown kind {inst.kind!r}")
    if inst.geometry not in GEOMETRIES:
        raise InvalidInstance(f"unknown geometry {inst.geometry!r}")
    for i, p in enumerate(pts):
        if p.arrival_index != i + 1:
            raise InvalidInstance(
                f"point at position {i} has arrival_index {p.arrival_index}"
            )
    n = m // 2
    if inst.kind == BNM:
        if any(p.color != BLUE for p in pts[:n]) or any(p.color != RED for p in pts[n:]):
            raise InvalidInstance("BNM requires n blue points then n red points")
    else:
        if any(p.color is not None for p in pts):
            raise InvalidInstance("MNM points must be uncolored")

    if inst.geometry == CIRCLE:
        angles = []
        for p in pts:
            if p.angle is None:
                raise InvalidInstance("circle instances need an angle on every point")
            if not (0 <= p.angle < 1):
                raise InvalidInstance("angles must be turn fractions in [0, 1)")
            angles.append(p.angle)
        if len(set(angles)) != m:
            raise InvalidInstance("duplicate circle points")
        return inst

    if any(p.angle is not None for p in pts):
        raise InvalidInstance("only circle instances may carry angles")
    if len({(p.x, p.y) for p in pts}) != m:
        raise InvalidInstance("duplicate points")
    if inst.geometry == CONVEX:
        hull = _convex_hull_ccw(pts)
        if len(hull) != m:
            raise NotConvex("convex instances require every point on the hull")
    else:
        for a, b, c in combinations(pts, 3):
            if orientation(a, b, c) == COLLINEAR:
                raise InvalidInstance(
                    f"collinear triple {a.arrival_index}, {b.arrival_index}, {c.arrival_index}"
                )
    return inst


def _convex_hull_ccw(pts: Sequence[Point]) -> list[Point]:
    """Monotone chain with strict turns: collinear points are not vertices."""
    ordered = sorted(pts, key=lambda p: (p.x, p.y))
    if len(ordered) <= 2:
        return list(ordered)

    def build(seq):
        out: list[Point] = []
        for p in seq:
            while len(out) >= 2 and orientation(out[-2], out[-1], p) != LEFT:
                out.pop()
            out.append(p)
        return out

    lower = build(ordered)
    upper = build(reversed(ordered))
    return lower[:-1] + upper[:-1]


def hull_order(instance: Instance) -> list[int]:
    """Clockwise cyclic hull order of all points, starting at p_1.

    Returns arrival indices.  Circle instances are ordered purely by angle.
    """
    pts = instance.points
    if instance.geometry == CIRCLE:
        start = pts[0].angle
        return [
            p.arrival_index
            for p in sorted(pts, key=lambda p: (start - p.angle) % 1)
        ]
    if instance.geometry != CONVEX:
        raise NotConvex("hull order needs circle or convex geometry")
    hull = _convex_hull_ccw(pts)
    if len(hull) != len(pts):
        raise NotConvex("some point is strictly inside the hull")
    hull.reverse()  # clockwise
    k = next(i for i, p in enumerate(hull) if p.arrival_index == 1)
    return [p.arrival_index for p in hull[k:] + hull[:k]]


def parity(instance: Instance) -> list[int]:
    """Hull rank mod 2 for every point, in arrival order; parity of p_1 is 0."""
    order = hull_order(instance)
    bits = [0] * len(order)
    for pos, arr in enumerate(order):
        bits[arr - 1] = pos % 2
    return bits


# ---------------------------------------------------------------------------
# matchings


@dataclass(frozen=True)
class Matching:
    """A partial matching as a set of unordered arrival-index pairs.

    Structural invariants (disjoint endpoints, i != j) are enforced here;
    geometric validity is the job of offline.validate_matching.
    """

    edges: frozenset = frozenset()

    def __post_init__(self):
        seen = set()
        for e in self.edges:
            i, j = e
            if i == j:
                raise InvalidInstance("self-loop edge")
            if i > j:
                raise InvalidInstance("edges must be stored as (min, max)")
            if i in seen or j in seen:
                raise InvalidInstance(f"index reused by edge {e}")
            seen.add(i)
            seen.add(j)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> "Matching":
        return cls(frozenset((min(i, j), max(i, j)) for i, j in pairs))

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(sorted(self.edges))

    def matched_indices(self) -> set[int]:
        return {i for e in self.edges for i in e}

    def partner(self, i: int) -> int | None:
        for a, b in self.edges:
            if a == i:
                return b
            if b == i:
                return a
        return None

    def with_edge(self, i: int, j: int) -> "Matching":
        return Matching(self.edges | {(min(i, j), max(i, j))})


# ---------------------------------------------------------------------------
# availability


def available_set(instance: Instance, current: Matching, i: int) -> set[int]:
    """Arrival indices of earlier unmatched points that p_i can legally match.

    Brute force over crossing tests; the simulation engine keeps a faster
    equivalent for circle instances, cross-checked against this one.
    """
    pts = instance.points
    edge_points = [(pts[a - 1], pts[b - 1]) for a, b in current.edges]
    matched = current.matched_indices()
    return set(_available(pts, edge_points, matched, i, instance.kind))


def _available(
    pts: Sequence[Point],
    edge_points: list[tuple[Point, Point]],
    matched: set[int],
    i: int,
    kind: str,
) -> list[int]:
    p = pts[i - 1]
    out = []
    for j in range(1, i):
        if j in matched:
            continue
        q = pts[j - 1]
        if kind == BNM and q.color == p.color:
            continue
        if all(not segments_cross((p, q), e) for e in edge_points):
            out.append(j)
    return out
