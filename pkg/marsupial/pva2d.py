# -*- coding: utf-8 -*-
#
# Copyright (C) 2024 The marsupial authors.
# License: MIT License (http://www.opensource.org/licenses/mit-license.php)

"""\
Exact take-off visibility inside one vertical half-plane.

A take-off point ``Y`` on the line ``z = h - r`` is visible when a taut
tether, modelled as a collision-free increasing convex polygonal chain
(CICP), joins it to the target ``T = (0, z_T)`` with length at most ``L``.
Chains only bend at lower corners of rectangles ("supports"), so
the work splits into:

- :func:`support_lengths`: shortest chain length from every support to ``T``.
- :func:`left_endpoints`: for every upper-left corner, the take-off point
  where the steepest admissible chain grazes that corner.
- :func:`right_endpoints`: for every support, the take-off point whose
  chain through it has length exactly ``L``.
- :func:`assemble`: pairs the end-points into non-visible intervals and
  returns their complement in ``[0, d_Q]``.

Module usage:

    table = support_lengths(scene, L)
    intervals = pva2d(scene, L, table)
    chain = min_taut_chain((d, scene.take_off_z), scene, table, L)

Orientation: ``d`` grows away from ``T``; a chain walks towards ``T`` with
``d`` non-increasing and ``z`` non-decreasing, and it is convex when its
direction turns counter-clockwise (seen with ``x = -d``) at every vertex.
"""

import bisect
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from marsupial.geometry import EPS, PlanarScene, PlaneFrame, segments_clear

logger = logging.getLogger("marsupial.pva2d")

Point2 = Tuple[float, float]

TARGET = "target"
LOWER_RIGHT = "lower_right"
LOWER_LEFT = "lower_left"
UPPER_LEFT = "upper_left"


@dataclass(frozen=True)
class CriticalVertex:
    pos: Point2
    kind: str
    owner: Optional[int] = None


@dataclass(frozen=True)
class Chain:
    """Taut tether from the take-off point (first vertex) to ``T`` (last vertex)."""

    vertices: Tuple[Point2, ...]
    length: float

    @classmethod
    def through(cls, vertices: Sequence[Point2]) -> "Chain":
        vertices = tuple((float(d), float(z)) for d, z in vertices)
        length = sum(math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(vertices, vertices[1:]))
        return cls(vertices, length)

    def violations(self, scene: PlanarScene) -> List[str]:
        """Lists every broken chain invariant; empty for a valid CICP."""
        problems = []
        pts = self.vertices
        for a, b in zip(pts, pts[1:]):
            if not _rises(a, b):
                problems.append("edge %r -> %r is not increasing" % (a, b))
        for a, b, c in zip(pts, pts[1:], pts[2:]):
            if not _turns_left(a, b, c):
                problems.append("vertex %r is not convex" % (b,))
        clear = segments_clear(pts[:-1], pts[1:], scene) if len(pts) > 1 else []
        for (a, b), ok in zip(zip(pts, pts[1:]), clear):
            if not ok:
                problems.append("edge %r -> %r collides" % (a, b))
        if abs(Chain.through(pts).length - self.length) > 1e-9:
            problems.append("stored length %.12g differs from edge sum" % self.length)
        return problems


@dataclass(frozen=True)
class VisIntervals:
    """
    Maximal visible intervals of ``d`` on the take-off line, sorted and
    disjoint, within ``[0, q_reach]``.  ``q_reach`` is ``None`` when the
    tether cannot reach the take-off line at all.
    """

    visible: Tuple[Tuple[float, float], ...]
    q_reach: Optional[float]

    @property
    def total_length(self) -> float:
        return sum(hi - lo for lo, hi in self.visible)

    def contains(self, d: float, tol: float = 0.0) -> bool:
        """
        Point query by binary search over the interval starts.

        >>> VisIntervals(((0.0, 2.0), (5.0, 7.0)), 9.0).contains(6.0)
        True
        >>> VisIntervals(((0.0, 2.0), (5.0, 7.0)), 9.0).contains(3.0)
        False
        """
        starts = [lo for lo, _ in self.visible]
        k = bisect.bisect_right(starts, d + tol) - 1
        return k >= 0 and d <= self.visible[k][1] + tol

    def non_visible(self) -> Tuple[Tuple[float, float], ...]:
        if self.q_reach is None:
            return ()
        gaps, cursor = [], 0.0
        for lo, hi in self.visible:
            if lo > cursor + EPS:
                gaps.append((cursor, lo))
            cursor = hi
        if self.q_reach > cursor + EPS:
            gaps.append((cursor, self.q_reach))
        return tuple(gaps)


@dataclass(frozen=True, eq=False)
class SupportTable:
    """
    Supports sorted by decreasing ``z`` (ties by increasing ``d``) with
    ``T`` at index 0, the shortest chain length from each (``lengths``) and
    the next vertex on that chain (``hooks``, -1 for ``T`` or no chain).
    """

    vertices: Tuple[CriticalVertex, ...]
    points: np.ndarray
    lengths: np.ndarray
    hooks: np.ndarray

    def chain_from(self, j: int) -> List[Point2]:
        pts = [tuple(self.points[j])]
        while j != 0:
            j = int(self.hooks[j])
            pts.append(tuple(self.points[j]))
        return pts


#---- orientation predicates

def _rises(p: Point2, q: Point2) -> bool:
    """True iff stepping from ``p`` to ``q`` moves towards ``T`` without descending."""
    if q[0] > p[0] + EPS or q[1] < p[1] - EPS:
        return False
    return (p[0] - q[0]) > EPS or (q[1] - p[1]) > EPS


def _turns_left(a: Point2, b: Point2, c: Point2) -> bool:
    v1x, v1z = a[0] - b[0], b[1] - a[1]
    v2x, v2z = b[0] - c[0], c[1] - b[1]
    cross = v1x * v2z - v1z * v2x
    return cross >= -EPS * math.hypot(v1x, v1z) * math.hypot(v2x, v2z)


def reach(scene: PlanarScene, L: float) -> Optional[float]:
    """Distance ``d_Q`` of the farthest take-off point within ``L`` of ``T``."""
    rise = scene.target_2d[1] - scene.take_off_z
    if L < rise:
        return None
    return math.sqrt(L * L - rise * rise)


def critical_vertices(scene: PlanarScene) -> Tuple[List[CriticalVertex], List[CriticalVertex]]:
    """
    Returns ``(supports, uppers)``: ``T`` followed by the lower corners of
    non-central rectangles lying above the take-off line, sorted by
    decreasing ``z``; and the upper-left corners above the take-off line.
    """
    supports = []
    uppers = []
    for i, rect in enumerate(scene.rects):
        if rect.aerial_support_lr:
            supports.append(CriticalVertex(rect.lower_right, LOWER_RIGHT, i))
        if rect.aerial_support_ll:
            supports.append(CriticalVertex(rect.lower_left, LOWER_LEFT, i))
        if rect.z_max > scene.take_off_z + EPS:
            uppers.append(CriticalVertex(rect.upper_left, UPPER_LEFT, i))
    supports.sort(key=lambda v: (-v.pos[1], v.pos[0], v.kind))
    target = CriticalVertex(tuple(scene.target_2d), TARGET, None)
    return [target] + supports, uppers


#---- support lengths

def support_lengths(scene: PlanarScene, L: float) -> SupportTable:
    """
    Shortest chain from every support to ``T``.  A support ``j`` extends the
    chain of an earlier support ``i`` when the step ``j -> i`` rises, keeps
    the junction convex and is obstacle free; the cheapest extension wins.
    """
    supports, _ = critical_vertices(scene)
    points = np.array([v.pos for v in supports], dtype=float).reshape(-1, 2)
    n = len(points)
    lengths = np.full(n, np.inf)
    hooks = np.full(n, -1, dtype=int)
    lengths[0] = 0.0
    for j in range(1, n):
        pj = tuple(points[j])
        earlier = points[:j]
        totals = np.hypot(earlier[:, 0] - pj[0], earlier[:, 1] - pj[1]) + lengths[:j]
        for i in np.argsort(totals, kind="stable"):
            if not np.isfinite(totals[i]):
                break
            pi = tuple(points[i])
            if not _rises(pj, pi):
                continue
            if i != 0 and not _turns_left(pj, pi, tuple(points[hooks[i]])):
                continue
            if not scene.segment_clear(pj, pi):
                continue
            lengths[j] = totals[i]
            hooks[j] = i
            break
    logger.debug("support lengths: %d supports, %d with a chain",
                 n - 1, int(np.isfinite(lengths[1:]).sum()))
    return SupportTable(tuple(supports), points, lengths, hooks)


def _first_hops(Y: Point2, table: SupportTable) -> List[Tuple[float, int]]:
    """
    Admissible first vertices for a chain leaving ``Y``, cheapest first, as
    ``(total length, support index)``; collisions are not checked here.
    """
    pts = table.points
    totals = np.hypot(pts[:, 0] - Y[0], pts[:, 1] - Y[1]) + table.lengths
    order = np.argsort(totals, kind="stable")
    hops = []
    for k in order:
        if not np.isfinite(totals[k]):
            break
        pk = tuple(pts[k])
        if not _rises(Y, pk):
            continue
        if k != 0 and not _turns_left(Y, pk, tuple(pts[table.hooks[k]])):
            continue
        hops.append((float(totals[k]), int(k)))
    return hops


def min_taut_chain(Y: Point2, scene: PlanarScene, table: SupportTable, L: float) -> Optional["Chain"]:
    """
    Shortest CICP from ``Y`` to ``T`` with length at most ``L``, or ``None``.

    :param Y:
        Take-off point ``(d, z)``.
    :param scene:
        The half-plane the table was computed for.
    :param table:
        Output of :func:`support_lengths`.
    :param L:
        Tether length.
    """
    for total, k in _first_hops(Y, table):
        if total > L + EPS:
            return None
        if scene.segment_clear(Y, tuple(table.points[k])):
            return Chain.through([Y] + table.chain_from(k))
    return None


#---- left end-points

def _continuations(u: Point2, table: SupportTable):
    """
    Supports ``k`` admitting a CICP ``u -> k -> ... -> T``, steepest first
    (ties by shorter chain), without the collision test.
    """
    pts = table.points
    dz = pts[:, 1] - u[1]
    dd = u[0] - pts[:, 0]
    ok = np.isfinite(table.lengths) & (dz > EPS) & (dd >= -EPS)
    keys = []
    for k in np.flatnonzero(ok):
        pk = tuple(pts[k])
        if k != 0 and not _turns_left(u, pk, tuple(pts[table.hooks[k]])):
            continue
        keys.append((-math.atan2(dz[k], max(dd[k], 0.0)), float(table.lengths[k]), int(k)))
    keys.sort()
    return [k for _, _, k in keys]


def _grazing_point(u: Point2, l: Point2, z0: float) -> float:
    """``d`` where the line through ``l`` and ``u`` meets the take-off line."""
    run = max(u[0] - l[0], 0.0)
    return u[0] + (u[1] - z0) * run / (l[1] - u[1])


def left_endpoints(scene: PlanarScene, table: SupportTable, L: float):
    """
    For each upper-left corner ``u_i``, picks the support ``l*`` that
    maximises the slope of ``u_i -> l*`` among CICP continuations and keeps
    the take-off point ``A`` on that line when ``|A l*| + len(l*) <= L`` and
    ``A -> l*`` is obstacle free.

    :return:
        ``(A, U)``: lists aligned with the upper-left corners holding ``d_A``
        and the chosen support index, ``None`` where no end-point exists.
    """
    _, uppers = critical_vertices(scene)
    z0 = scene.take_off_z
    d_q = reach(scene, L)
    A, U = [], []
    for vertex in uppers:
        u = vertex.pos
        best = None
        for k in _continuations(u, table):
            if scene.segment_clear(u, tuple(table.points[k])):
                best = k
                break
        U.append(best)
        if best is None or d_q is None:
            A.append(None)
            continue
        lk = tuple(table.points[best])
        d_a = _grazing_point(u, lk, z0)
        within = math.hypot(d_a - lk[0], z0 - lk[1]) + table.lengths[best] <= L + EPS
        if within and d_a <= d_q + EPS and scene.segment_clear((d_a, z0), lk):
            A.append(d_a)
        else:
            A.append(None)
    return A, U


def _left_endpoint_events(scene: PlanarScene, table: SupportTable, L: float, d_q: float) -> List[float]:
    """
    Every grazing point of an upper-left corner, over all continuations that
    respect the length bound and are obstacle free.
    """
    _, uppers = critical_vertices(scene)
    z0 = scene.take_off_z
    events = []
    for vertex in uppers:
        u = vertex.pos
        ks = _continuations(u, table)
        if not ks:
            continue
        ends = np.array([tuple(table.points[k]) for k in ks])
        d_a = np.array([_grazing_point(u, tuple(e), z0) for e in ends])
        within = np.hypot(d_a - ends[:, 0], z0 - ends[:, 1]) + table.lengths[ks] <= L + EPS
        within &= d_a <= d_q + EPS
        if not within.any():
            continue
        starts = np.column_stack((d_a, np.full(len(d_a), z0)))
        clear = segments_clear(starts[within], ends[within], scene)
        events.extend(float(d) for d in d_a[within][clear])
    return events


#---- right end-points

def right_endpoints(scene: PlanarScene, table: SupportTable, L: float) -> List[Optional[float]]:
    """
    For every support ``l_j`` with a chain, the take-off point ``B_j`` at
    distance ``L - len(l_j)`` beyond it.  ``B_j`` is kept when (a) the chain
    ``B_j -> l_j -> ... -> T`` is a CICP and (b) no support, ``T`` included,
    offers ``B_j`` a CICP shorter than ``L``.

    :return:
        List aligned with ``table.points``; entry 0 (``T``) is always ``None``.
    """
    z0 = scene.take_off_z
    B = [None]
    for j in range(1, len(table.points)):
        B.append(None)
        rest = L - table.lengths[j]
        lj = tuple(table.points[j])
        rise = lj[1] - z0
        if not np.isfinite(rest) or rest < rise:
            continue
        b = (lj[0] + math.sqrt(max(rest * rest - rise * rise, 0.0)), z0)
        if not _rises(b, lj):
            continue
        if table.hooks[j] >= 0 and not _turns_left(b, lj, tuple(table.points[table.hooks[j]])):
            continue
        if not scene.segment_clear(b, lj):
            continue
        shorter = False
        for total, k in _first_hops(b, table):
            if total >= L - 1e-9:
                break
            if scene.segment_clear(b, tuple(table.points[k])):
                shorter = True
                break
        if not shorter:
            B[j] = b[0]
    return B


#---- assembly

def assemble(A: Sequence[Optional[float]], B: Sequence[Optional[float]], d_q: Optional[float],
             query: Optional[Callable[[float], bool]] = None,
             extra: Sequence[float] = ()) -> VisIntervals:
    """
    Turns end-points into visible intervals.

    Without ``query`` the end-points are sorted from ``Q`` towards ``T``: an
    ``A`` followed by a ``B`` bounds a non-visible interval, an ``A``
    followed by another ``A`` is dropped, a leading ``B`` pairs with ``Q``,
    a ``B`` after a ``B`` changes nothing and a trailing ``A`` is unpaired.

    With ``query`` (a point test) the end-points, plus ``extra`` ones, split
    ``[0, d_Q]`` into elementary gaps and each gap is classified by testing
    its midpoint.

    Usage:

        >>> assemble([], [], 10.0).visible
        ((0.0, 10.0),)
        >>> assemble([], [6.0], 10.0).visible
        ((0.0, 6.0),)
        >>> assemble([8.0], [3.0], 10.0).visible
        ((0.0, 3.0), (8.0, 10.0))
        >>> assemble([], [], None).visible
        ()
    """
    if d_q is None:
        return VisIntervals((), None)
    marks = [(d, "A") for d in A if d is not None and -EPS <= d <= d_q + EPS]
    marks += [(d, "B") for d in B if d is not None and -EPS <= d <= d_q + EPS]

    if query is None:
        marks.sort(key=lambda m: -m[0])
        hidden, pending = [], None
        for position, (d, kind) in enumerate(marks):
            if kind == "A":
                pending = d
            elif pending is not None:
                hidden.append((d, pending))
                pending = None
            elif position == 0:
                hidden.append((d, d_q))
        return _complement(hidden, d_q)

    cuts = sorted({0.0, float(d_q)} | {min(max(float(d), 0.0), d_q) for d, _ in marks}
                  | {float(d) for d in extra if 0.0 < d < d_q})
    merged = []
    for lo, hi in zip(cuts, cuts[1:]):
        if hi - lo <= EPS:
            continue
        if query(0.5 * (lo + hi)):
            if merged and lo - merged[-1][1] <= EPS:
                merged[-1] = (merged[-1][0], hi)
            else:
                merged.append((lo, hi))
    if len(cuts) == 1 and query(0.0):
        merged.append((0.0, 0.0))
    return VisIntervals(tuple(merged), float(d_q))


def _complement(hidden, d_q) -> VisIntervals:
    visible, cursor = [], 0.0
    for lo, hi in sorted(hidden):
        lo, hi = max(lo, 0.0), min(hi, d_q)
        if lo > cursor + EPS:
            visible.append((cursor, lo))
        cursor = max(cursor, hi)
    if d_q > cursor + EPS:
        visible.append((cursor, float(d_q)))
    return VisIntervals(tuple(visible), float(d_q))


def pva2d(scene: PlanarScene, L: float, table: Optional[SupportTable] = None) -> VisIntervals:
    """
    Visible take-off intervals of one half-plane.

    Runs the end-point passes, then settles every elementary gap between
    end-points with one :func:`min_taut_chain` query.  Besides those
    end-points the gaps are also cut at every admissible grazing point, at
    the ``d``-edges of rectangles straddling the take-off line and at the
    far edge of central rectangles, where visibility may change as well.
    """
    d_q = reach(scene, L)
    if d_q is None:
        return VisIntervals((), None)
    if table is None:
        table = support_lengths(scene, L)
    A, _ = left_endpoints(scene, table, L)
    B = right_endpoints(scene, table, L)
    z0 = scene.take_off_z
    extra = _left_endpoint_events(scene, table, L, d_q)
    for rect in scene.rects:
        if rect.central:
            extra.append(rect.d_max)
        if rect.z_min < z0 < rect.z_max:
            extra.extend((rect.d_min, rect.d_max))

    def query(d):
        return min_taut_chain((d, z0), scene, table, L) is not None

    intervals = assemble(A, B, d_q, query=query, extra=extra)
    logger.debug("pva2d: %d rects, %d end-points, %d visible intervals",
                 len(scene.rects), len(extra) + sum(a is not None for a in A) + sum(b is not None for b in B),
                 len(intervals.visible))
    return intervals


def intervals_to_rows(frame: Optional[PlaneFrame], intervals: VisIntervals):
    """CSV debug rows ``(plane_azimuth, side, d_lo, d_hi)``."""
    azimuth = frame.azimuth if frame is not None else 0.0
    side = frame.side if frame is not None else 0
    return [(azimuth, side, lo, hi) for lo, hi in intervals.visible]
