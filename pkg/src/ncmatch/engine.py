"""Online simulation harness and the advice algorithms that run in it.

The harness threads an advice tape from an oracle phase (full instance
visible) into a player phase (points revealed one at a time).  Players only
ever see revealed points plus an availability view; the harness rejects any
attempted match that is not available, so no simulation can commit a
crossing edge.

Two interchangeable availability engines back the harness: a brute-force
one that calls geometry.available_set, and a laminar-region tracker for
circle instances that answers the same queries in near-constant time per
step (two points on a circle can be joined without a crossing iff no
committed chord separates them, so region identity is availability).
"""
from __future__ import annotations

from bisect import bisect_left, insort
from dataclasses import dataclass, field
from heapq import heappop, heappush
from typing import Any, Callable, Sequence

from . import geometry, offline
from .codecs import (
    AdviceTape,
    DyckWord,
    catalan,
    dyck_rank,
    dyck_unrank,
    elias_delta_decode,
    elias_delta_encode,
    read_ranked,
    tree_unrank,
    tree_rank,
    write_ranked,
)
from .errors import DuplicateX, IllegalMatch, InvalidInstance, NotConvex
from .geometry import BNM, CIRCLE, CONVEX, LEFT, MNM, Instance, Matching, Point
from .offline import MatchingReport


# ---------------------------------------------------------------------------
# availability engines


def _seg_cross_int(px, py, qx, qy, rx, ry, sx, sy) -> bool:
    """Closed-segment intersection over integer coordinates, endpoints
    known distinct.  Mirrors geometry.segments_cross without its guards."""
    d1 = (sx - rx) * (py - ry) - (sy - ry) * (px - rx)
    d2 = (sx - rx) * (qy - ry) - (sy - ry) * (qx - rx)
    d3 = (qx - px) * (ry - py) - (qy - py) * (rx - px)
    d4 = (qx - px) * (sy - py) - (qy - py) * (sx - px)
    if d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
        return (d1 > 0) != (d2 > 0) and (d3 > 0) != (d4 > 0)
    if d1 == 0 and min(rx, sx) <= px <= max(rx, sx) and min(ry, sy) <= py <= max(ry, sy):
        return True
    if d2 == 0 and min(rx, sx) <= qx <= max(rx, sx) and min(ry, sy) <= qy <= max(ry, sy):
        return True
    if d3 == 0 and min(px, qx) <= rx <= max(px, qx) and min(py, qy) <= ry <= max(py, qy):
        return True
    if d4 == 0 and min(px, qx) <= sx <= max(px, qx) and min(py, qy) <= sy <= max(py, qy):
        return True
    return False


class _BruteEngine:
    """Availability by direct crossing tests; the reference engine.

    Instances with purely integer coordinates (every generator here) get a
    plain-int crossing routine; anything else falls back to the generic
    exact predicates.
    """

    def __init__(self, instance: Instance):
        self.instance = instance
        self.pts = instance.points
        self.edge_points: list[tuple[Point, Point]] = []
        self.matched: set[int] = set()
        self.cur: tuple[int, list[int]] | None = None
        self.int_xy: list[tuple[int, int]] | None = None
        if instance.geometry != CIRCLE and all(
            p.x.denominator == 1 and p.y.denominator == 1 for p in instance.points
        ):
            self.int_xy = [(int(p.x), int(p.y)) for p in instance.points]
        self.int_edges: list[tuple[int, int, int, int]] = []

    def _available_int(self, i: int) -> list[int]:
        xy = self.int_xy
        px, py = xy[i - 1]
        p_color = self.pts[i - 1].color
        is_bnm = self.instance.kind == BNM
        out = []
        for j in range(1, i):
            if j in self.matched:
                continue
            if is_bnm and self.pts[j - 1].color == p_color:
                continue
            qx, qy = xy[j - 1]
            if all(
                not _seg_cross_int(px, py, qx, qy, e0, e1, e2, e3)
                for e0, e1, e2, e3 in self.int_edges
            ):
                out.append(j)
        return out

    def on_arrival(self, i: int) -> int:
        if self.int_xy is not None:
            av = self._available_int(i)
        else:
            av = geometry._available(
                self.pts, self.edge_points, self.matched, i, self.instance.kind
            )
        self.cur = (i, av)
        return len(av)

    def avail_count(self) -> int:
        return len(self.cur[1])

    def available_indices(self) -> list[int]:
        return list(self.cur[1])

    def min_available(self) -> int | None:
        return min(self.cur[1], default=None)

    def max_available(self) -> int | None:
        return max(self.cur[1], default=None)

    def is_available(self, j: int) -> bool:
        return j in self.cur[1]

    def commit_skip(self) -> None:
        self.cur = None

    def commit_match(self, j: int) -> tuple[int, int]:
        i, av = self.cur
        p, q = self.pts[i - 1], self.pts[j - 1]
        left = right = 0
        for t in av:
            if t == j:
                continue
            if geometry.half_plane_side((p, q), self.pts[t - 1]) == LEFT:
                left += 1
            else:
                right += 1
        self.matched.add(i)
        self.matched.add(j)
        self.edge_points.append((p, q))
        if self.int_xy is not None:
            self.int_edges.append((*self.int_xy[i - 1], *self.int_xy[j - 1]))
        self.cur = None
        return left, right


class _RegionEngine:
    """Laminar-region availability tracker for circle instances.

    Committed chords partition the disk; two points can be joined iff they
    sit in the same region.  Regions are tracked as integer labels on the
    arrived points and on the arcs between circular neighbors; a match
    relabels the smaller side of the new chord, so the total relabeling
    work is O(m log m) per simulation.
    """

    def __init__(self, instance: Instance):
        pts = instance.points
        m = len(pts)
        self.pts = pts
        self.kind = instance.kind
        keys = geometry.angle_sort_keys(pts)
        order = sorted(range(m), key=keys.__getitem__)  # ccw by angle
        self.rank_of = [0] * m
        for pos, pi in enumerate(order):
            self.rank_of[pi] = pos
        self.arrival_at_rank = [order[pos] + 1 for pos in range(m)]
        self.arrived = [False] * m
        self.matched = [False] * m
        self.reg_pt = [-1] * m
        self.arc_reg = [-1] * m
        self.nxt = [-1] * m
        self.prv = [-1] * m
        self.ranks_sorted: list[int] = []
        self.cnt: dict[int, int] = {0: 0}
        self.heaps: dict[int, list] = {0: []}
        self._next_reg = 1
        self.cur: tuple[int, int, int, int] | None = None

    def on_arrival(self, i: int) -> int:
        r = self.rank_of[i - 1]
        rs = self.ranks_sorted
        if not rs:
            rs.append(r)
            self.nxt[r] = r
            self.prv[r] = r
            self.arc_reg[r] = 0
            reg = 0
        else:
            pos = bisect_left(rs, r)
            left = rs[pos - 1] if pos else rs[-1]
            rs.insert(pos, r)
            right = self.nxt[left]
            self.nxt[left] = r
            self.prv[r] = left
            self.nxt[r] = right
            self.prv[right] = r
            reg = self.arc_reg[left]
            self.arc_reg[r] = reg
        self.arrived[r] = True
        if self.kind == MNM:
            cnt = self.cnt.get(reg, 0)
        else:
            cnt = len(self._scan_available(reg, i))
        self.cur = (i, r, reg, cnt)
        return cnt

    def avail_count(self) -> int:
        return self.cur[3]

    def _scan_available(self, reg: int, i: int) -> list[int]:
        color = self.pts[i - 1].color
        out = []
        for r in self.ranks_sorted:
            if self.matched[r] or self.reg_pt[r] != reg:
                continue
            arr = self.arrival_at_rank[r]
            if self.kind == BNM and self.pts[arr - 1].color == color:
                continue
            out.append(arr)
        out.sort()
        return out

    def available_indices(self) -> list[int]:
        i, _r, reg, _c = self.cur
        return self._scan_available(reg, i)

    def min_available(self) -> int | None:
        i, _r, reg, cnt = self.cur
        if cnt == 0:
            return None
        if self.kind == BNM:
            av = self._scan_available(reg, i)
            return av[0] if av else None
        heap = self.heaps.get(reg, [])
        while heap:
            ai, rk = heap[0]
            if not self.matched[rk] and self.reg_pt[rk] == reg:
                return ai
            heappop(heap)
        return None

    def max_available(self) -> int | None:
        return max(self.available_indices(), default=None)

    def is_available(self, j: int) -> bool:
        i, _r, reg, _c = self.cur
        if not 1 <= j < i:
            return False
        rq = self.rank_of[j - 1]
        if not self.arrived[rq] or self.matched[rq] or self.reg_pt[rq] != reg:
            return False
        if self.kind == BNM and self.pts[j - 1].color == self.pts[i - 1].color:
            return False
        return True

    def commit_skip(self) -> None:
        i, r, reg, _c = self.cur
        self.reg_pt[r] = reg
        self.cnt[reg] = self.cnt.get(reg, 0) + 1
        heappush(self.heaps.setdefault(reg, []), (i, r))
        self.cur = None

    def commit_match(self, j: int) -> tuple[int, int]:
        i, r, reg, cnt_at_arrival = self.cur
        rq = self.rank_of[j - 1]
        nxt, prv = self.nxt, self.prv

        # walk both ways at once; the side that closes first is relabeled
        ccw_side: list[int] = []
        cw_side: list[int] = []
        u = nxt[r]
        v = prv[r]
        while u != rq and v != rq:
            ccw_side.append(u)
            u = nxt[u]
            cw_side.append(v)
            v = prv[v]
        if u == rq:
            walked, walked_is_ccw = ccw_side, True
        else:
            walked, walked_is_ccw = cw_side, False

        is_mnm = self.kind == MNM
        my_color = self.pts[i - 1].color
        walked_avail = 0
        for rk in walked:
            if self.matched[rk] or self.reg_pt[rk] != reg:
                continue
            if is_mnm or self.pts[self.arrival_at_rank[rk] - 1].color != my_color:
                walked_avail += 1
        other_avail = cnt_at_arrival - 1 - walked_avail
        # the clockwise side of the directed chord (arrival -> partner) is
        # its left half-plane; the ccw walk covers the right side
        if walked_is_ccw:
            left_count, right_count = other_avail, walked_avail
        else:
            left_count, right_count = walked_avail, other_avail

        g1 = self._next_reg
        self._next_reg += 1
        h1 = self.heaps.setdefault(g1, [])
        moved = 0
        for rk in walked:
            if not self.matched[rk] and self.reg_pt[rk] == reg:
                self.reg_pt[rk] = g1
                moved += 1
                heappush(h1, (self.arrival_at_rank[rk], rk))
        self.cnt[g1] = moved
        arc_nodes = [r] + walked if walked_is_ccw else walked + [rq]
        for rk in arc_nodes:
            if self.arc_reg[rk] == reg:
                self.arc_reg[rk] = g1

        self.matched[r] = True
        self.matched[rq] = True
        self.cnt[reg] = self.cnt.get(reg, 0) - 1 - moved
        self.cur = None
        return left_count, right_count


def make_engine(instance: Instance, mode: str = "auto"):
    if mode == "auto":
        mode = "region" if instance.geometry == CIRCLE else "brute"
    if mode == "region":
        if instance.geometry != CIRCLE:
            raise InvalidInstance("region engine requires a circle instance")
        return _RegionEngine(instance)
    if mode == "brute":
        return _BruteEngine(instance)
    raise ValueError(f"unknown engine mode {mode!r}")


class AvailabilityView:
    """The only availability interface a player gets."""

    def __init__(self, engine):
        self._engine = engine

    def count(self) -> int:
        return self._engine.avail_count()

    def indices(self) -> list[int]:
        return self._engine.available_indices()

    def min_arrival(self) -> int | None:
        return self._engine.min_available()

    def max_arrival(self) -> int | None:
        return self._engine.max_available()

    def has(self, j: int) -> bool:
        return self._engine.is_available(j)


# ---------------------------------------------------------------------------
# harness


@dataclass
class BeginContext:
    """What a player is allowed to know before the first online arrival."""

    n: int | None = None
    blues: tuple[Point, ...] | None = None


@dataclass
class MatchEvent:
    """One committed match and how the rest of the available set split
    around the new chord (left/right of the directed arrival->partner edge)."""

    arrival: int
    partner: int
    left_available: int
    right_available: int


@dataclass
class SimulationResult:
    matching: Matching
    bits_written: int
    bits_read: int
    per_step_log: list[tuple[int, int | None, int]]
    violations: MatchingReport
    match_events: list[MatchEvent] = field(default_factory=list)


@dataclass
class OnlineAlgorithm:
    """An oracle writing advice plus a player consuming it online."""

    name: str
    oracle: Callable[[Instance], list[int]] | None
    make_player: Callable[[], Any]
    check: Callable[[Instance], None]
    needs_n: bool = False


def simulate(alg: OnlineAlgorithm, instance: Instance, engine: str = "auto") -> SimulationResult:
    """Run oracle then player over an instance and audit every decision.

    Raises IllegalMatch the moment a player names an unavailable partner,
    so a committed crossing is impossible by construction.  For BNM the
    blue batch is delivered to the player up front and the per-step log
    covers the red (decision) arrivals only.
    """
    alg.check(instance)
    bits = list(alg.oracle(instance)) if alg.oracle is not None else []
    tape = AdviceTape(bits)
    eng = make_engine(instance, engine)
    view = AvailabilityView(eng)
    player = alg.make_player()

    n = instance.n
    is_bnm = instance.kind == BNM
    if is_bnm:
        for i in range(1, n + 1):
            eng.on_arrival(i)
            eng.commit_skip()
        ctx = BeginContext(n=n, blues=instance.blues())
        arrivals = range(n + 1, 2 * n + 1)
    else:
        ctx = BeginContext(n=n if alg.needs_n else None, blues=None)
        arrivals = range(1, 2 * n + 1)
    player.begin(ctx, tape)

    log: list[tuple[int, int | None, int]] = []
    edges: list[tuple[int, int]] = []
    events: list[MatchEvent] = []
    for i in arrivals:
        cnt = eng.on_arrival(i)
        decision = player.decide(i, instance.point(i), view, tape)
        if decision is None:
            eng.commit_skip()
            log.append((i, None, cnt))
            continue
        j = int(decision)
        if not eng.is_available(j):
            raise IllegalMatch(f"arrival {i} tried to match unavailable point {j}")
        left, right = eng.commit_match(j)
        edges.append((j, i))
        events.append(MatchEvent(i, j, left, right))
        log.append((i, j, cnt))

    matching = Matching.from_pairs(edges)
    violations = offline.validate_matching(instance, matching)
    return SimulationResult(
        matching=matching,
        bits_written=tape.bits_written,
        bits_read=tape.cursor,
        per_step_log=log,
        violations=violations,
        match_events=events,
    )


# ---------------------------------------------------------------------------
# players


def _clockwise_from(anchor: Point, others: Sequence[Point]) -> list[Point]:
    """Points of a convex-position set in clockwise order starting just
    after the anchor."""
    if anchor.angle is not None and all(p.angle is not None for p in others):
        return sorted(others, key=lambda p: (anchor.angle - p.angle) % 1)
    hull = geometry._convex_hull_ccw([anchor, *others])
    if len(hull) != len(others) + 1:
        raise NotConvex("clockwise ordering needs convex position")
    hull.reverse()
    k = hull.index(anchor)
    return hull[k + 1 :] + hull[:k]


class _LabeledNode:
    __slots__ = ("left", "right", "size", "label")

    def __init__(self, left, right, size):
        self.left = left
        self.right = right
        self.size = size
        self.label: tuple[Point, Point] | None = None


def _labeled_copy(t) -> _LabeledNode | None:
    if t is None:
        return None
    left = _labeled_copy(t.left)
    right = _labeled_copy(t.right)
    size = 1 + (left.size if left else 0) + (right.size if right else 0)
    return _LabeledNode(left, right, size)


class _BTPlayer:
    """Replays a perfect matching from its tree encoding.

    Each red descends the tree by half-plane tests against labeled edges;
    at the first unlabeled node the left-subtree size says which available
    blue (clockwise from the red) is its partner.
    """

    def begin(self, ctx: BeginContext, tape: AdviceTape) -> None:
        self.blue_by_index = {p.arrival_index: p for p in ctx.blues}
        n = len(ctx.blues)
        rank = read_ranked(tape, catalan(n))
        self.root = _labeled_copy(tree_unrank(n, rank))

    def decide(self, i, point, view, tape):
        node = self.root
        while node is not None and node.label is not None:
            side = geometry.half_plane_side(node.label, point)
            node = node.left if side == LEFT else node.right
        if node is None:
            raise IllegalMatch(f"tree descent fell off at red {i}")
        k = (node.left.size if node.left else 0) + 1
        avail = [self.blue_by_index[j] for j in view.indices()]
        ordered = _clockwise_from(point, avail)
        if k > len(ordered):
            raise IllegalMatch(f"red {i} wants blue #{k} but only {len(ordered)} available")
        partner = ordered[k - 1]
        node.label = (point, partner)
        return partner.arrival_index


def _check_bnm_convex(instance: Instance) -> None:
    if instance.kind != BNM:
        raise InvalidInstance("this algorithm runs on BNM instances")
    if instance.geometry not in (CIRCLE, CONVEX):
        raise NotConvex("this algorithm needs points in convex position")


def _bt_oracle(instance: Instance) -> list[int]:
    _check_bnm_convex(instance)
    m = offline.convex_noncrossing_pm(instance)
    tree = offline.matching_to_bt(instance.blues(), instance.reds(), m)
    tape = AdviceTape()
    write_ranked(tape, tree_rank(tree), catalan(instance.n))
    return list(tape.bits)


def bt_matching() -> OnlineAlgorithm:
    """Tree-advice matching for BNM in convex position; ceil(log2 C_n) bits."""
    return OnlineAlgorithm(
        name="bt",
        oracle=_bt_oracle,
        make_player=_BTPlayer,
        check=_check_bnm_convex,
    )


class _SortedPlayer:
    """Decodes per-point codes 0 / 10 / 11: skip, match nearest unmatched x
    on the left, or on the right."""

    def begin(self, ctx, tape) -> None:
        self.unmatched: list[tuple] = []  # (x, arrival), sorted

    def decide(self, i, point, view, tape):
        if tape.read_bit() == 0:
            insort(self.unmatched, (point.x, i))
            return None
        go_right = tape.read_bit()
        pos = bisect_left(self.unmatched, (point.x, i))
        if go_right:
            if pos >= len(self.unmatched):
                raise IllegalMatch(f"arrival {i}: advice points right of every unmatched x")
            entry = self.unmatched[pos]
        else:
            if pos == 0:
                raise IllegalMatch(f"arrival {i}: advice points left of every unmatched x")
            entry = self.unmatched[pos - 1]
        self.unmatched.remove(entry)
        return entry[1]


def _check_sorted(instance: Instance) -> None:
    if instance.kind != MNM:
        raise InvalidInstance("x-sorted matching runs on MNM instances")
    xs = [p.x for p in instance.points]
    if len(set(xs)) != len(xs):
        raise DuplicateX("x-sorted matching needs globally distinct x-coordinates")


def _sorted_oracle(instance: Instance) -> list[int]:
    _check_sorted(instance)
    pts = instance.points
    order = sorted(range(len(pts)), key=lambda t: pts[t].x)
    partner = {}
    for t in range(0, len(order), 2):
        a, b = order[t], order[t + 1]
        partner[a] = b
        partner[b] = a
    bits: list[int] = []
    for t in range(len(pts)):
        j = partner[t]
        if j > t:
            bits.append(0)
        elif pts[j].x < pts[t].x:
            bits.extend((1, 0))
        else:
            bits.extend((1, 1))
    return bits


def sorted_matching() -> OnlineAlgorithm:
    """Pair x-consecutive points; exactly 3n advice bits on any MNM input
    with pairwise distinct x-coordinates."""
    return OnlineAlgorithm(
        name="sorted",
        oracle=_sorted_oracle,
        make_player=_SortedPlayer,
        check=_check_sorted,
    )


def _check_mnm_convex(instance: Instance) -> None:
    if instance.kind != MNM:
        raise InvalidInstance("this algorithm runs on MNM instances")
    if instance.geometry not in (CIRCLE, CONVEX):
        raise NotConvex("this algorithm needs points in convex position")


def _asap_word(instance: Instance, tie_break: str) -> DyckWord:
    """Replay the player's availability evolution with full knowledge of
    parities: bit i says whether an opposite-parity point is available at
    arrival i.  The oracle mirrors the player's tie-break exactly so both
    sides see identical available sets."""
    chi = geometry.parity(instance)
    eng = make_engine(instance)
    bits = []
    for i in range(1, instance.size + 1):
        cnt = eng.on_arrival(i)
        matched = False
        if cnt:
            idxs = eng.available_indices()
            if any(chi[j - 1] != chi[i - 1] for j in idxs):
                bits.append(1)
                j = min(idxs) if tie_break == "min" else max(idxs)
                eng.commit_match(j)
                matched = True
        if not matched:
            bits.append(0)
            eng.commit_skip()
    return DyckWord(tuple(bits))


class _ASAPPlayer:
    def __init__(self, known_n: bool, tie_break: str):
        self.known_n = known_n
        self.tie_break = tie_break

    def begin(self, ctx, tape) -> None:
        n = ctx.n if self.known_n else elias_delta_decode(tape)
        rank = read_ranked(tape, catalan(n))
        self.word = dyck_unrank(n, rank).bits
        self.step = 0

    def decide(self, i, point, view, tape):
        bit = self.word[self.step]
        self.step += 1
        if bit == 0:
            return None
        j = view.min_arrival() if self.tie_break == "min" else view.max_arrival()
        if j is None:
            raise IllegalMatch(f"advice says match at arrival {i} but nothing is available")
        return j


def asap_matching(known_n: bool = True, tie_break: str = "min") -> OnlineAlgorithm:
    """Match-as-soon-as-possible with a balanced-word advice string.

    known_n uses exactly ceil(log2 C_n) bits; otherwise an Elias delta
    prefix carries n.  tie_break in {"min", "max"} picks which available
    point gets matched; correctness is tie-break independent.
    """
    if tie_break not in ("min", "max"):
        raise ValueError("tie_break must be 'min' or 'max'")

    def oracle(instance: Instance) -> list[int]:
        _check_mnm_convex(instance)
        word = _asap_word(instance, tie_break)
        tape = AdviceTape()
        if not known_n:
            tape.write_bits(elias_delta_encode(instance.n))
        write_ranked(tape, dyck_rank(word), catalan(instance.n))
        return list(tape.bits)

    return OnlineAlgorithm(
        name="asap",
        oracle=oracle,
        make_player=lambda: _ASAPPlayer(known_n, tie_break),
        check=_check_mnm_convex,
        needs_n=known_n,
    )


class _GreedyPlayer:
    def begin(self, ctx, tape) -> None:
        pass

    def decide(self, i, point, view, tape):
        return view.min_arrival()


def greedy() -> OnlineAlgorithm:
    """No advice: match each arrival to the available point that arrived
    first, whenever anything is available."""
    return OnlineAlgorithm(
        name="greedy",
        oracle=None,
        make_player=_GreedyPlayer,
        check=lambda instance: None,
    )


ALGORITHMS: dict[str, Callable[[], OnlineAlgorithm]] = {
    "bt": bt_matching,
    "sorted": sorted_matching,
    "asap": asap_matching,
    "greedy": greedy,
}
