# -*- coding: utf-8 -*-
#
# Copyright (C) 2024 The marsupial authors.
# License: MIT License (http://www.opensource.org/licenses/mit-license.php)

"""\
SVG figures of scenes and plans.

``top_view`` draws the blocking footprints, other obstacles, the start,
the targets and every ground path seen from above.  ``plane_view`` draws
one half-plane of a target's beam: the sliced rectangles, the take-off
line, its visible intervals and the aerial path when it lies in that
half-plane.  Output is deterministic for fixed inputs.
"""

import logging

import svgwrite

from marsupial.errors import MarsupialError
from marsupial.geometry import EPS, slice_scene
from marsupial.planner import aerial_catenary
from marsupial.pva2d import pva2d
from marsupial.pva3d import CATENARY, beam_phase, plane_beam

logger = logging.getLogger("marsupial.export")

SCALE = 10.0
MARGIN = 10.0
SAMPLES = 128


def aerial_points(plan, samples: int = SAMPLES):
    """
    World polyline of the aerial path.  Loose tethers are rebuilt and
    sampled at ``samples`` points; anything else is drawn as recorded.
    """
    if plan.mode != CATENARY:
        return list(plan.aerial_path)
    try:
        frame, _, curve = aerial_catenary(plan)
    except MarsupialError:
        return list(plan.aerial_path)
    return [frame.to_world(float(d), float(z)) for d, z in curve.sample(samples)]


class _Canvas(object):
    """Maps metres to SVG pixels with the vertical axis pointing up."""

    def __init__(self, lo, hi, size=None):
        self.lo, self.hi = lo, hi
        width = (hi[0] - lo[0]) * SCALE + 2 * MARGIN
        height = (hi[1] - lo[1]) * SCALE + 2 * MARGIN
        self.drawing = svgwrite.Drawing(size=(round(width, 3), round(height, 3)), profile="full", debug=False)

    def point(self, u, v):
        return (round(MARGIN + (u - self.lo[0]) * SCALE, 3),
                round(MARGIN + (self.hi[1] - v) * SCALE, 3))

    def box(self, u0, v0, u1, v1, **style):
        x, y = self.point(u0, v1)
        self.drawing.add(self.drawing.rect((x, y), (round((u1 - u0) * SCALE, 3), round((v1 - v0) * SCALE, 3)),
                                           **style))

    def polyline(self, points, **style):
        if len(points) > 1:
            self.drawing.add(self.drawing.polyline([self.point(u, v) for u, v in points], fill="none", **style))

    def dot(self, u, v, colour):
        self.drawing.add(self.drawing.circle(self.point(u, v), r=3, fill=colour))

    def tostring(self):
        return self.drawing.tostring()


def top_view(scene, plans=(), samples: int = SAMPLES):
    """SVG text of the scene seen from above."""
    lo, hi = scene.bounds.min_corner, scene.bounds.max_corner
    canvas = _Canvas((lo.x, lo.y), (hi.x, hi.y))
    canvas.box(lo.x, lo.y, hi.x, hi.y, fill="white", stroke="black")
    for cube, blocks in zip(scene.inflated, scene.blocking):
        style = {"fill": "dimgray"} if blocks else {"fill": "none", "stroke": "gray", "stroke_dasharray": "4,2"}
        canvas.box(cube.min_corner.x, cube.min_corner.y, cube.max_corner.x, cube.max_corner.y, **style)
    for plan in plans:
        canvas.polyline([(p[0], p[1]) for p in plan.ground_path], stroke="blue", stroke_width=2)
        canvas.polyline([(p[0], p[1]) for p in aerial_points(plan, samples)], stroke="orange", stroke_width=1)
    canvas.dot(scene.start.x, scene.start.y, "green")
    for target in scene.targets:
        canvas.dot(target.x, target.y, "red")
    return canvas.tostring()


def plane_view(scene, target_index=0, half_plane=0, p=16, plans=(), start=None, samples: int = SAMPLES):
    """
    SVG text of one half-plane of the beam around a target.

    :param half_plane:
        Index ``k`` in ``[0, 2p)`` of the half-plane.
    """
    target = scene.targets[target_index]
    start = scene.start if start is None else start
    frames = plane_beam(target, p, beam_phase(start, target))
    if not 0 <= half_plane < len(frames):
        raise ValueError("half-plane index must lie in [0, %d), got %d" % (len(frames), half_plane))
    frame = frames[half_plane]
    plane = slice_scene(scene, frame)
    intervals = pva2d(plane, scene.params.L)

    reach = intervals.q_reach or 0.0
    d_max = max([reach] + [r.d_max for r in plane.rects] + [1.0])
    z_max = max(scene.bounds.max_corner.z, target.z)
    canvas = _Canvas((0.0, 0.0), (d_max, z_max))
    for rect in plane.rects:
        fill = "dimgray" if rect.blocks_ugv else "lightgray"
        canvas.box(rect.d_min, rect.z_min, rect.d_max, rect.z_max, fill=fill, stroke="black")
    z0 = plane.take_off_z
    canvas.polyline([(0.0, z0), (d_max, z0)], stroke="gray", stroke_width=1)
    for d_lo, d_hi in intervals.visible:
        canvas.polyline([(d_lo, z0), (d_hi, z0)], stroke="green", stroke_width=4)
    for plan in plans:
        if plan.target_index != target_index:
            continue
        local = [frame.to_plane(pt[0], pt[1]) + (pt[2],) for pt in aerial_points(plan, samples)]
        if all(abs(w) <= 1e-6 and d >= -EPS for d, w, _ in local):
            canvas.polyline([(d, z) for d, _, z in local], stroke="orange", stroke_width=2)
    canvas.dot(0.0, target.z, "red")
    logger.debug("plane view %d of target %d: %d rects, %d intervals", half_plane, target_index,
                 len(plane.rects), len(intervals.visible))
    return canvas.tostring()
