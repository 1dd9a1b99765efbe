"""Offline matching oracles: brute-force minimum-length matching, the
convex divide-and-conquer constructor, the matching-to-tree transform the
tree-advice algorithm ships over the tape, and matching validation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Iterator, Sequence

from . import geometry
from .codecs import BinaryTree
from .errors import (
    CapExceeded,
    CrossingDetected,
    NotConvex,
    NotPerfect,
)
from .geometry import BNM, CIRCLE, CONVEX, LEFT, Instance, Matching, Point

BRUTE_FORCE_CAP = 12


# ---------------------------------------------------------------------------
# exact-enough length comparison
#
# Totals are sums of square roots of rationals.  We bracket each total in a
# decimal interval and refine until the intervals separate; persistent
# overlap at the precision cap is treated as a tie and broken by the
# lexicographic edge list, which is all the downstream checks need.

_PRECISIONS = (40, 80, 160, 320)


def _sqrt_interval(value: Fraction, digits: int) -> tuple[int, int]:
    """Integers (lo, hi) with lo <= sqrt(value) * 10^digits < hi."""
    scaled = value.numerator * 10 ** (2 * digits) // value.denominator
    lo = isqrt(scaled)
    return lo, lo + 1

def _sum_interval(values: Sequence[Fraction], digits: int) -> tuple[int, int]:
    lo = hi = 0
    for v in values:
        a, b = _sqrt_interval(v, digits)
        lo += a
        hi += b
    return lo, hi


def compare_length_sums(sq_a: Sequence[Fraction], sq_b: Sequence[Fraction]) -> int:
    """-1, 0 or 1 comparing sum(sqrt(sq_a)) with sum(sqrt(sq_b)).

    0 means indistinguishable at the precision cap (an exact tie for every
    input this package produces, e.g. the symmetric square).
    """
    for digits in _PRECISIONS:
        alo, ahi = _sum_interval(sq_a, digits)
        blo, bhi = _sum_interval(sq_b, digits)
        if ahi <= blo:
            return -1
        if bhi <= alo:
            return 1
    return 0


def squared_length(p: Point, q: Point) -> Fraction:
    return (p.x - q.x) ** 2 + (p.y - q.y) ** 2


# ---------------------------------------------------------------------------
# brute-force oracles


def _noncrossing_pairings(
    instance: Instance, cap: int
) -> Iterator[list[tuple[int, int]]]:
    """DFS over perfect pairings, pruning any branch that creates a crossing.

    Yields edge lists; (2n-1)!! leaves at worst, far fewer after pruning.
    """
    pts = instance.points
    m = len(pts)
    if m > cap:
        raise CapExceeded(f"brute force capped at {cap} points, got {m}")
    is_bnm = instance.kind == BNM

    def rec(unmatched: list[int], chosen: list[tuple[int, int]]):
        if not unmatched:
            yield list(chosen)
            return
        i = unmatched[0]
        rest = unmatched[1:]
        for pos, j in enumerate(rest):
            if is_bnm and pts[i - 1].color == pts[j - 1].color:
                continue
            seg = (pts[i - 1], pts[j - 1])
            if any(
                geometry.segments_cross(seg, (pts[a - 1], pts[b - 1]))
                for a, b in chosen
            ):
                continue
            chosen.append((i, j))
            yield from rec(rest[:pos] + rest[pos + 1 :], chosen)
            chosen.pop()

    yield from rec(list(range(1, m + 1)), [])


def enumerate_perfect_noncrossing(
    instance: Instance, cap: int = BRUTE_FORCE_CAP
) -> Iterator[Matching]:
    """Every perfect non-crossing matching of a small instance."""
    for edges in _noncrossing_pairings(instance, cap):
        yield Matching.from_pairs(edges)


def min_length_pm(instance: Instance, cap: int = BRUTE_FORCE_CAP) -> Matching:
    """A minimum-total-length perfect matching, found by brute force.

    Only non-crossing pairings are searched: a crossing pair of edges can
    always be exchanged for a strictly shorter non-crossing pair, so the
    global minimum is attained on a non-crossing matching and the output is
    non-crossing by construction.
    """
    pts = instance.points
    best_edges: list[tuple[int, int]] | None = None
    best_sq: list[Fraction] | None = None
    for edges in _noncrossing_pairings(instance, cap):
        sq = [squared_length(pts[a - 1], pts[b - 1]) for a, b in edges]
        if best_edges is None:
            best_edges, best_sq = edges, sq
            continue
        cmp = compare_length_sums(sq, best_sq)
        if cmp < 0 or (cmp == 0 and sorted(edges) < sorted(best_edges)):
            best_edges, best_sq = edges, sq
    if best_edges is None:
        raise NotPerfect("no perfect non-crossing matching exists")
    return Matching.from_pairs(best_edges)


# ---------------------------------------------------------------------------
# convex divide and conquer


def convex_noncrossing_pm(instance: Instance) -> Matching:
    """A perfect non-crossing matching on points in convex position.

    Walks the hull clockwise from the segment's first point to the first
    partner (opposite color for BNM, opposite hull parity otherwise) whose
    two arcs are balanced, then recurses on the arcs.  Deterministic, so
    golden tests can pin its output.  O(n^2).
    """
    if instance.geometry not in (CIRCLE, CONVEX):
        raise NotConvex("convex matching construction needs convex position")
    pts = instance.points
    order = geometry.hull_order(instance)
    is_bnm = instance.kind == BNM

    def balance_unit(arr: int) -> int:
        if not is_bnm:
            return 1  # parity alternates along the hull: odd gaps balance
        return 1 if pts[arr - 1].color == geometry.BLUE else -1

    edges: list[tuple[int, int]] = []

    def solve(segment: list[int]) -> None:
        if not segment:
            return
        a = segment[0]
        bal = 0
        for t in range(1, len(segment)):
            q = segment[t]
            opposite = (
                pts[q - 1].color != pts[a - 1].color
                if is_bnm
                else t % 2 == 1
            )
            if opposite and bal == 0:
                edges.append((a, q))
                solve(segment[1:t])
                solve(segment[t + 1 :])
                return
            bal += balance_unit(q)
        raise NotPerfect(f"no balanced partner for point {a}")

    solve(order)
    return Matching.from_pairs(edges)


# ---------------------------------------------------------------------------
# matching -> tree


def matching_to_bt(
    blues: Sequence[Point], reds: Sequence[Point], matching: Matching
) -> BinaryTree:
    """Recursive tree of a perfect non-crossing red-blue matching.

    The root is the first red's edge; the left/right subtrees are built
    from the edges lying in the left/right half-plane of that directed
    edge (red towards blue).  The tree has one node per edge.
    """
    if len(matching) != len(reds) or len(blues) != len(reds) or not reds:
        raise NotPerfect("matching_to_bt needs a perfect red-blue matching")
    blue_by_index = {p.arrival_index: p for p in blues}
    red_by_index = {p.arrival_index: p for p in reds}
    pairs = []
    for a, b in matching:
        if a in red_by_index and b in blue_by_index:
            pairs.append((red_by_index[a], blue_by_index[b]))
        elif b in red_by_index and a in blue_by_index:
            pairs.append((red_by_index[b], blue_by_index[a]))
        else:
            raise NotPerfect(f"edge {(a, b)} is not red-blue")

    def rec(bs: list[Point], rs: list[Point], m: list[tuple[Point, Point]]) -> BinaryTree:
        r1 = rs[0]
        edge = next((e for e in m if e[0] is r1), None)
        if edge is None:
            raise NotPerfect(f"red point {r1.arrival_index} is unmatched")
        if len(rs) == 1:
            return BinaryTree()
        b_l, b_r, r_l, r_r, m_l, m_r = [], [], [], [], [], []
        for b in bs:
            if b is edge[1]:
                continue
            (b_l if geometry.half_plane_side(edge, b) == LEFT else b_r).append(b)
        for r in rs[1:]:
            (r_l if geometry.half_plane_side(edge, r) == LEFT else r_r).append(r)
        for e in m:
            if e is edge:
                continue
            side_r = geometry.half_plane_side(edge, e[0])
            side_b = geometry.half_plane_side(edge, e[1])
            if side_r != side_b:
                raise CrossingDetected(
                    f"edge {e[0].arrival_index}-{e[1].arrival_index} straddles "
                    f"{edge[0].arrival_index}-{edge[1].arrival_index}"
                )
            (m_l if side_r == LEFT else m_r).append(e)
        left = rec(b_l, r_l, m_l) if r_l else None
        right = rec(b_r, r_r, m_r) if r_r else None
        if len(b_l) != len(r_l) or len(b_r) != len(r_r):
            raise CrossingDetected("half-planes are not balanced")
        return BinaryTree(left, right)

    return rec(list(blues), list(reds), pairs)


# ---------------------------------------------------------------------------
# validation


@dataclass
class MatchingReport:
    """Everything a caller needs to judge a matching; violations are data,
    not exceptions."""

    matched_count: int
    crossings: list[tuple[tuple[int, int], tuple[int, int]]] = field(default_factory=list)
    color_violations: list[tuple[int, int]] = field(default_factory=list)
    duplicate_endpoints: list[int] = field(default_factory=list)
    out_of_range: list[tuple[int, int]] = field(default_factory=list)
    perfect: bool = False
    required_perfect: bool = False

    @property
    def valid(self) -> bool:
        return not (
            self.crossings
            or self.color_violations
            or self.duplicate_endpoints
            or self.out_of_range
        )

    @property
    def ok(self) -> bool:
        """Valid, and perfect too when perfection was demanded."""
        return self.valid and (self.perfect or not self.required_perfect)


def _circle_noncrossing_ok(instance: Instance, edges: list[tuple[int, int]]) -> bool:
    """O(m) stack check: chords are non-crossing iff, along the circular
    order, they close like balanced parentheses."""
    pts = instance.points
    keys = geometry.angle_sort_keys(pts)
    order = sorted(range(len(pts)), key=keys.__getitem__)
    rank = {pts[i].arrival_index: pos for pos, i in enumerate(order)}
    partner: dict[int, tuple[int, int]] = {}
    for e in edges:
        a, b = e
        partner[rank[a]] = (rank[b], id(e))
        partner[rank[b]] = (rank[a], id(e))
    stack: list[int] = []
    for pos in range(len(pts)):
        if pos not in partner:
            continue
        other, eid = partner[pos]
        if other > pos:
            stack.append(eid)
        else:
            if not stack or stack[-1] != eid:
                return False
            stack.pop()
    return True


def validate_matching(
    instance: Instance,
    matching: Matching | Sequence[tuple[int, int]],
    require_perfect: bool = False,
) -> MatchingReport:
    """Report crossings, color violations, endpoint reuse and coverage."""
    pts = instance.points
    m = len(pts)
    if isinstance(matching, Matching):
        edges = sorted(matching.edges)
    else:
        edges = [(min(a, b), max(a, b)) for a, b in matching]
    report = MatchingReport(matched_count=0, required_perfect=require_perfect)

    seen: set[int] = set()
    usable: list[tuple[int, int]] = []
    for e in edges:
        a, b = e
        if not (1 <= a <= m and 1 <= b <= m) or a == b:
            report.out_of_range.append(e)
            continue
        for idx in e:
            if idx in seen:
                report.duplicate_endpoints.append(idx)
            seen.add(idx)
        usable.append(e)
        if instance.kind == BNM and pts[a - 1].color == pts[b - 1].color:
            report.color_violations.append(e)
    report.matched_count = len(seen)

    clean = not report.duplicate_endpoints
    if clean and instance.geometry == CIRCLE and _circle_noncrossing_ok(instance, usable):
        pass  # fast path: provably no crossing pair
    else:
        for x in range(len(usable)):
            for y in range(x + 1, len(usable)):
                a, b = usable[x]
                c, d = usable[y]
                if len({a, b, c, d}) < 4:
                    continue  # endpoint reuse already reported
                if geometry.segments_cross(
                    (pts[a - 1], pts[b - 1]), (pts[c - 1], pts[d - 1])
                ):
                    report.crossings.append((usable[x], usable[y]))
    report.perfect = report.valid and report.matched_count == m
    return report
