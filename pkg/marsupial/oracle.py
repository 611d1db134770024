# -*- coding: utf-8 -*-
#
# Copyright (C) 2024 The marsupial authors.
# License: MIT License (http://www.opensource.org/licenses/mit-license.php)

"""\
Brute-force reference answers for tests.

These functions trade speed for simplicity and share nothing with the
modules they check apart from the geometry primitives:

* :func:`oracle_p_visible` enumerates every increasing convex chain over all
  rectangle corners by depth-first search;
* :func:`oracle_c_visible` scans ten times more catenary lengths than the
  planner and checks each curve on a dense sample;
* :func:`oracle_plan` grids the ground, runs Dijkstra over the grid and
  evaluates the aerial part at every grid node.

Keep scenes small (a handful of rectangles or obstacles).
"""

import logging
import math
from typing import Optional, Tuple

import networkx as nx
import numpy as np
from scipy.optimize import brentq

from marsupial.errors import Unreachable
from marsupial.geometry import EPS, PlaneFrame, segment_clear, slice_scene, ugv_sweep_clear

logger = logging.getLogger("marsupial.oracle")

SAMPLES = 1000


#---- taut tether

def _rising(p, q) -> bool:
    dd, dz = p[0] - q[0], q[1] - p[1]
    return dd >= -EPS and dz >= -EPS and (dd > EPS or dz > EPS)


def _convex(a, b, c) -> bool:
    # in x = -d the slope may only grow along the chain
    ax, bx, cx = -a[0], -b[0], -c[0]
    u = (bx - ax, b[1] - a[1])
    v = (cx - bx, c[1] - b[1])
    cross = u[0] * v[1] - u[1] * v[0]
    return cross >= -EPS * math.hypot(*u) * math.hypot(*v)


def oracle_p_visible(Y, scene, L) -> Tuple[bool, Optional[float]]:
    """
    Exhaustive search for the shortest increasing convex collision-free chain
    from ``Y`` to ``T``.

    :return:
        ``(visible, length)``; ``length`` is ``None`` when no chain of length
        at most ``L`` exists.
    """
    Y = (float(Y[0]), float(Y[1]))
    T = (float(scene.target_2d[0]), float(scene.target_2d[1]))
    corners = {c for rect in scene.rects for c in rect.corners}
    nodes = [c for c in corners if c[1] >= Y[1] - EPS] + [T]
    best = [math.inf]

    def dfs(prev, here, so_far):
        if so_far + math.dist(here, T) >= min(best[0], L + EPS) + 1e-12:
            return
        for nxt in nodes:
            if not _rising(here, nxt):
                continue
            if prev is not None and not _convex(prev, here, nxt):
                continue
            if not segment_clear((here, nxt), scene):
                continue
            total = so_far + math.dist(here, nxt)
            if nxt == T:
                best[0] = min(best[0], total)
            else:
                dfs(here, nxt, total)

    dfs(None, Y, 0.0)
    if best[0] <= L + EPS:
        return True, best[0]
    return False, None


#---- loose tether

def _sag_parameter(span: float, rise: float, s: float) -> float:
    # log form of sinh(t)/t = ratio keeps large t finite
    target = 0.5 * math.log(s * s - rise * rise) - math.log(span)

    def f(t):
        log_sinh = t + math.log1p(-math.exp(-2.0 * t)) - math.log(2.0)
        return log_sinh - math.log(t) - target

    hi = 1.0
    while f(hi) < 0.0:
        hi *= 2.0
    return brentq(f, 1e-9, hi, xtol=1e-14, rtol=1e-14, maxiter=500)


def _curve_points(p1, p2, s) -> Optional[np.ndarray]:
    (d1, z1), (d2, z2) = sorted((tuple(p1), tuple(p2)))
    span, rise = d2 - d1, z2 - z1
    chord = math.hypot(span, rise)
    if span <= EPS or s - chord < 1e-7:
        if span <= EPS and s > abs(rise) + EPS:
            return None
        t = np.linspace(0.0, 1.0, SAMPLES)
        return np.column_stack((d1 + t * span, z1 + t * rise))
    t = _sag_parameter(span, rise, s)
    a = span / (2.0 * t)
    shift = a * math.asinh(rise / math.sqrt(s * s - rise * rise))
    centre = 0.5 * (d1 + d2) - shift
    ds = np.linspace(d1, d2, SAMPLES)
    zs = z1 + a * (np.cosh((ds - centre) / a) - math.cosh((d1 - centre) / a))
    return np.column_stack((ds, zs))


def _points_clear(points, rects, floor=None) -> bool:
    if floor is not None and points[:, 1].min() < floor - EPS:
        return False
    for rect in rects:
        inside = ((points[:, 0] > rect.d_min + EPS) & (points[:, 0] < rect.d_max - EPS)
                  & (points[:, 1] > rect.z_min + EPS) & (points[:, 1] < rect.z_max - EPS))
        if inside.any():
            return False
    return True


def oracle_c_length(Y, T, L, rects, c=26, floor=None) -> Optional[float]:
    """
    Shortest of ``10 * c`` scanned catenary lengths clearing ``rects`` and
    staying above ``floor``.
    """
    chord = math.dist(tuple(Y), tuple(T))
    if chord > L + EPS:
        return None
    rects = list(rects)
    for s in np.linspace(chord, max(L, chord), 10 * int(c)):
        points = _curve_points(Y, T, float(s))
        if points is not None and _points_clear(points, rects, floor):
            return float(s)
    return None


def oracle_c_visible(Y, T, L, rects, c=26, floor=None) -> bool:
    return oracle_c_length(Y, T, L, rects, c, floor) is not None


#---- end to end

def oracle_plan(scene, target_index: int = 0, grid_step: float = 0.5, mode: str = "catenary",
                c: int = 26) -> float:
    """
    Best total length over a ground grid of spacing ``grid_step``.

    Ground distances come from Dijkstra over the grid with every node linked
    to its neighbours within three steps.  The aerial part at each grid node
    is checked in the half-plane through that node.

    :raises Unreachable:
        When no grid node admits a feasible tether.
    """
    target = scene.targets[target_index]
    lo, hi = scene.bounds.min_corner, scene.bounds.max_corner
    xs = np.arange(lo.x, hi.x + EPS, grid_step)
    ys = np.arange(lo.y, hi.y + EPS, grid_step)

    graph = nx.Graph()
    start = (scene.start.x, scene.start.y)
    graph.add_node(start)
    nodes = [start]
    index = {}
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            if scene.ground_free(x, y):
                index[(i, j)] = (float(x), float(y))
                nodes.append(index[(i, j)])
    reach = 3
    offsets = [(di, dj) for di in range(-reach, reach + 1) for dj in range(0, reach + 1)
               if (dj > 0 or di > 0) and math.gcd(abs(di), dj) == 1]
    for (i, j), p in index.items():
        for di, dj in offsets:
            q = index.get((i + di, j + dj))
            if q is not None and ugv_sweep_clear(p, q, scene):
                graph.add_edge(p, q, weight=math.dist(p, q))
        si, sj = (start[0] - lo.x) / grid_step, (start[1] - lo.y) / grid_step
        if abs(i - si) <= reach and abs(j - sj) <= reach and ugv_sweep_clear(start, p, scene):
            graph.add_edge(start, p, weight=math.dist(start, p))

    ground = nx.single_source_dijkstra_path_length(graph, start)
    z0 = scene.params.take_off_z
    L = scene.params.L
    best = math.inf
    for node, g in sorted(ground.items(), key=lambda item: item[1]):
        dx, dy = node[0] - target.x, node[1] - target.y
        d = math.hypot(dx, dy)
        if g + math.hypot(d, target.z - z0) >= best:
            continue
        azimuth = math.atan2(dy, dx) if d > EPS else 0.0
        frame = PlaneFrame(azimuth, (target.x, target.y), (0.0, target.z))
        plane = slice_scene(scene, frame)
        if mode == "taut":
            ok, aerial = oracle_p_visible((d, z0), plane, L)
        else:
            aerial = oracle_c_length((d, z0), plane.target_2d, L, plane.rects, c, floor=z0)
            ok = aerial is not None
        if ok:
            best = min(best, g + aerial)
    if not math.isfinite(best):
        raise Unreachable("no grid node reaches the target", target_index=target_index)
    logger.debug("oracle plan: %d grid nodes, best total length %.4f", len(nodes), best)
    return best
