# -*- coding: utf-8 -*-
#
# Copyright (C) 2024 The marsupial authors.
# License: MIT License (http://www.opensource.org/licenses/mit-license.php)

"""\
Loose tether model.

A slack tether hanging between the take-off point and the target follows a
catenary ``z = z_v + a (cosh((d - d_v) / a) - 1)`` in the plane of the two
anchors.  The curve is convex and lies below the anchor chord, which lets
:func:`catenary_clear` decide collisions against a rectangle from three
curve evaluations.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import root_scalar

from marsupial.errors import ShorterThanChord, VerticalAnchors
from marsupial.geometry import EPS, _as_boxes, segment_clear

logger = logging.getLogger("marsupial.catenary")

# Below this slack the parameter ``a`` diverges and the curve is a chord.
DEGENERATE_SLACK = 1e-7

Point2 = Tuple[float, float]


@dataclass(frozen=True)
class Catenary:
    a: float
    d_v: float
    z_v: float
    anchors: Tuple[Point2, Point2]
    arc_length: float
    degenerate: bool = False

    @property
    def d_lo(self) -> float:
        return min(self.anchors[0][0], self.anchors[1][0])

    @property
    def d_hi(self) -> float:
        return max(self.anchors[0][0], self.anchors[1][0])

    @property
    def chord(self) -> float:
        (d1, z1), (d2, z2) = self.anchors
        return math.hypot(d2 - d1, z2 - z1)

    def z_at(self, d):
        d = np.asarray(d, dtype=float)
        if self.degenerate:
            (d1, z1), (d2, z2) = sorted(self.anchors)
            if d2 - d1 <= EPS:
                return np.full_like(d, max(z1, z2))
            return z1 + (z2 - z1) * (d - d1) / (d2 - d1)
        half = np.sinh((d - self.d_v) / (2.0 * self.a))
        return self.z_v + 2.0 * self.a * half * half

    def length_between(self, d0: float, d1: float) -> float:
        if self.degenerate:
            return self.arc_length * abs(d1 - d0) / max(self.d_hi - self.d_lo, EPS)
        return self.a * (math.sinh((d1 - self.d_v) / self.a) - math.sinh((d0 - self.d_v) / self.a))

    def sample(self, n: int = 128) -> np.ndarray:
        """Polyline of ``n`` points from the first anchor to the second."""
        (d1, z1), (d2, z2) = self.anchors
        if self.degenerate:
            t = np.linspace(0.0, 1.0, n)
            return np.column_stack((d1 + t * (d2 - d1), z1 + t * (z2 - z1)))
        ds = np.linspace(d1, d2, n)
        pts = np.column_stack((ds, self.z_at(ds)))
        pts[0], pts[-1] = (d1, z1), (d2, z2)
        return pts


def _straight(p1, p2, s) -> Catenary:
    (d1, z1), (d2, z2) = p1, p2
    low = p1 if z1 <= z2 else p2
    return Catenary(a=math.inf, d_v=low[0], z_v=low[1], anchors=(tuple(p1), tuple(p2)),
                    arc_length=float(s), degenerate=True)


def solve_catenary(p1: Point2, p2: Point2, s: float) -> Catenary:
    """
    Builds the catenary of arc length ``s`` through two anchors.

    :param p1:
        First anchor ``(d, z)``.
    :param p2:
        Second anchor ``(d, z)``.
    :param s:
        Arc length, at least the anchor chord.
    :return:
        A :class:`Catenary`; a straight degenerate curve when the slack is
        below ``DEGENERATE_SLACK``.
    :raises ShorterThanChord:
        When ``s`` is shorter than the chord.
    :raises VerticalAnchors:
        When the anchors share ``d`` and the tether is slack.

    Usage:

        >>> solve_catenary((0, 0), (10, 0), 10).degenerate
        True
        >>> round(solve_catenary((0, 0), (10, 0), 12).a, 2)
        4.7
    """
    p1 = (float(p1[0]), float(p1[1]))
    p2 = (float(p2[0]), float(p2[1]))
    (d1, z1), (d2, z2) = sorted((p1, p2))
    span, rise = d2 - d1, z2 - z1
    chord = math.hypot(span, rise)
    if s < chord - EPS:
        raise ShorterThanChord("arc length %.9g is shorter than the chord %.9g" % (s, chord))
    if span <= EPS:
        if s > abs(rise) + EPS:
            raise VerticalAnchors("slack tether between vertically aligned anchors")
        return _straight(p1, p2, s)
    if s - chord < DEGENERATE_SLACK:
        return _straight(p1, p2, s)

    # 2a sinh(span / 2a) = sqrt(s^2 - rise^2), solved for t = span / 2a
    ratio = math.sqrt(s * s - rise * rise) / span

    def excess(t):
        return math.sinh(t) / t - ratio

    hi = 1.0
    while excess(hi) < 0.0:
        hi *= 2.0
    solution = root_scalar(excess, bracket=[1e-12, hi], method="bisect", xtol=1e-15, rtol=1e-15)
    t = solution.root
    a = span / (2.0 * t)
    m = a * math.asinh(rise / math.sqrt(s * s - rise * rise))
    d_v = 0.5 * (d1 + d2) - m
    half = math.sinh((d1 - d_v) / (2.0 * a))
    z_v = z1 - 2.0 * a * half * half
    return Catenary(a=a, d_v=d_v, z_v=z_v, anchors=(p1, p2), arc_length=float(s))


def lowest_point(c: Catenary) -> float:
    """
    Lowest ``z`` of the curve between its anchors.

    >>> round(lowest_point(solve_catenary((0, 10), (10, 10), 12)), 2)
    7.08
    """
    if c.degenerate:
        return min(c.anchors[0][1], c.anchors[1][1])
    return float(c.z_at(min(max(c.d_v, c.d_lo), c.d_hi)))


def catenary_clear(c: Catenary, rects, floor: Optional[float] = None) -> bool:
    """
    True iff the curve misses every open rectangle interior and, when
    ``floor`` is given, never sags below it.

    Per rectangle the curve is restricted to the shared ``d`` range; being
    convex its lowest point there is at the clamped vertex and its highest at
    one of the range ends.
    """
    if floor is not None and lowest_point(c) < floor - EPS:
        return False
    boxes = _as_boxes(rects)
    if len(boxes) == 0:
        return True
    if c.degenerate:
        return segment_clear(c.anchors, boxes)
    lo_d = np.maximum(boxes.lo[:, 0] + EPS, c.d_lo)
    hi_d = np.minimum(boxes.hi[:, 0] - EPS, c.d_hi)
    overlap = lo_d < hi_d
    if not overlap.any():
        return True
    z_lo = c.z_at(lo_d)
    z_hi = c.z_at(hi_d)
    z_bottom = c.z_at(np.clip(c.d_v, lo_d, hi_d))
    z_top = np.maximum(z_lo, z_hi)
    hits = overlap & (z_bottom < boxes.hi[:, 1] - EPS) & (z_top > boxes.lo[:, 1] + EPS)
    return not hits.any()


def length_error_bound(chord: float, L: float, c: int) -> float:
    """
    Worst-case excess of the scanned tether length over the true minimum.

    >>> length_error_bound(20.0, 30.0, 5)
    1.0
    """
    return (L - chord) / (2.0 * c)


def min_catenary(Y: Point2, T: Point2, L: float, c: int, rects,
                 floor: Optional[float] = None, shortest: Optional[float] = None) -> Optional[Catenary]:
    """
    Scans ``c`` lengths spread uniformly over ``[|YT|, L]`` from the shortest
    and returns the first collision-free catenary, or ``None``.

    :param floor:
        Lowest admissible ``z``; the planners pass the take-off line, below
        which lie the UGV and the ground.
    :param shortest:
        Known lower bound on any clearing length; shorter lengths of the
        scan are skipped without being solved.
    """
    chord = math.hypot(T[0] - Y[0], T[1] - Y[1])
    if chord > L + EPS:
        return None
    boxes = _as_boxes(rects)
    for s in np.linspace(chord, max(L, chord), max(int(c), 1)):
        if shortest is not None and s < shortest:
            continue
        try:
            curve = solve_catenary(Y, T, float(s))
        except VerticalAnchors:
            continue
        if catenary_clear(curve, boxes, floor):
            return curve
    return None


def min_catenary_length(Y: Point2, T: Point2, L: float, c: int, rects,
                        floor: Optional[float] = None) -> Optional[float]:
    curve = min_catenary(Y, T, L, c, rects, floor)
    return None if curve is None else curve.arc_length
