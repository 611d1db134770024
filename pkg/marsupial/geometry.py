# -*- coding: utf-8 -*-
#
# Copyright (C) 2024 The marsupial authors.
# License: MIT License (http://www.opensource.org/licenses/mit-license.php)

"""\
World-space primitives shared by every planner module.

Coordinates are metres, ``z`` points up and the ground is ``z = 0``.  The
marsupial system (a UGV carrying a tethered UAV) is reduced to a vertical
segment of height ``h - r`` once every obstacle has been inflated by the UAV
radius ``r``; the UAV takes off from the top of that segment.

A vertical half-plane through the ground projection ``T'`` of a target is
described by a :class:`PlaneFrame`.  Inside it points are written ``(d, z)``
where ``d >= 0`` is the horizontal distance from ``T'``, so the target sits
at ``d = 0`` and obstacles at ``d > 0``.

Tangency is collision free: every predicate shrinks obstacle interiors by
``EPS`` before testing.
"""

import json
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from marsupial.errors import SceneError

logger = logging.getLogger("marsupial.geometry")

EPS = 1e-9

Point2 = Tuple[float, float]


class Point3(NamedTuple):
    x: float
    y: float
    z: float


@dataclass(frozen=True)
class MarsupialParams:
    """
    System constants.

    :param h:
        Height of the marsupial system (UGV plus docked UAV).
    :param r:
        Radius of the sphere enclosing the UAV.
    :param L:
        Maximum tether length.

    The UAV takes off at height ``h - r``.  The tether is tied to the UGV at
    ``h - 2r``, which no planning step uses.
    """

    h: float
    r: float
    L: float

    def __post_init__(self):
        if not (self.r > 0 and self.L > 0):
            raise SceneError("r and L must be positive (r=%g, L=%g)" % (self.r, self.L))
        if not self.h > 2 * self.r:
            raise SceneError("h must exceed 2r (h=%g, r=%g)" % (self.h, self.r))

    @property
    def take_off_z(self) -> float:
        return self.h - self.r

    @property
    def tie_z(self) -> float:
        return self.h - 2 * self.r


@dataclass(frozen=True)
class Cuboid:
    """Axis-aligned solid box given by two opposite corners."""

    min_corner: Point3
    max_corner: Point3

    def __post_init__(self):
        lo = Point3(*map(float, self.min_corner))
        hi = Point3(*map(float, self.max_corner))
        if not all(a < b for a, b in zip(lo, hi)):
            raise SceneError("cuboid corners must satisfy min < max componentwise: %r, %r" % (lo, hi))
        object.__setattr__(self, "min_corner", lo)
        object.__setattr__(self, "max_corner", hi)

    @property
    def volume(self) -> float:
        return float(np.prod(np.subtract(self.max_corner, self.min_corner)))

    def as_array(self) -> np.ndarray:
        return np.array(self.min_corner + self.max_corner, dtype=float)

    def contains(self, point, eps: float = EPS) -> bool:
        """Strict interior membership, boundary excluded."""
        return all(lo + eps < c < hi - eps
                   for lo, c, hi in zip(self.min_corner, point, self.max_corner))


def inflate(obstacle: Cuboid, r: float) -> Cuboid:
    """
    Expands a cuboid by ``r`` on all six faces, the smallest axis-aligned box
    containing its Minkowski sum with a sphere of radius ``r``.

    :param obstacle:
        The obstacle to grow.
    :param r:
        Non-negative inflation radius.
    :return:
        A new :class:`Cuboid`.

    Usage:

        >>> inflate(Cuboid((0, 0, 0), (5, 5, 5)), 0.5).min_corner
        Point3(x=-0.5, y=-0.5, z=-0.5)
        >>> inflate(Cuboid((0, 0, 0), (1, 1, 1)), 1.0).volume
        27.0
    """
    if r < 0:
        raise SceneError("inflation radius must be non-negative, got %g" % r)
    lo = Point3(*(c - r for c in obstacle.min_corner))
    hi = Point3(*(c + r for c in obstacle.max_corner))
    return Cuboid(lo, hi)


#---- vectorised slab predicates

def _slab_hits_many(p, qs, lo, hi, eps: float = EPS) -> np.ndarray:
    """
    Tests segments ``p -> qs[i]`` against the open boxes ``(lo + eps, hi - eps)``.
    ``p`` is either one shared start point or one start point per segment.

    :return:
        Boolean array of shape ``(len(qs), len(lo))``, true where the open
        segment enters the open box.
    """
    qs = np.atleast_2d(np.asarray(qs, dtype=float))
    p = np.broadcast_to(np.asarray(p, dtype=float), qs.shape)
    m, n = len(qs), len(lo)
    if n == 0 or m == 0:
        return np.zeros((m, n), dtype=bool)
    lo = np.asarray(lo, dtype=float) + eps
    hi = np.asarray(hi, dtype=float) - eps
    delta = qs - p
    t0 = np.zeros((m, n))
    t1 = np.ones((m, n))
    hits = np.ones((m, n), dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        for axis in range(qs.shape[1]):
            lo_a = lo[None, :, axis]
            hi_a = hi[None, :, axis]
            p_a = p[:, axis][:, None]
            dv = delta[:, axis][:, None]
            flat = np.abs(dv) < 1e-15
            ta = (lo_a - p_a) / dv
            tb = (hi_a - p_a) / dv
            hits &= lo_a < hi_a
            hits &= ~flat | ((p_a > lo_a) & (p_a < hi_a))
            t0 = np.maximum(t0, np.where(flat, -np.inf, np.minimum(ta, tb)))
            t1 = np.minimum(t1, np.where(flat, np.inf, np.maximum(ta, tb)))
    return hits & (t0 < t1)


def _slab_hits(p, q, lo, hi, eps: float = EPS) -> np.ndarray:
    return _slab_hits_many(p, [q], lo, hi, eps)[0]


def segments_clear(ps, qs, rects) -> np.ndarray:
    """Batched :func:`segment_clear` over paired end-points ``ps[i] -> qs[i]``."""
    boxes = _as_boxes(rects)
    qs = np.asarray(qs, dtype=float).reshape(-1, 2)
    return ~_slab_hits_many(np.asarray(ps, dtype=float).reshape(-1, 2), qs, boxes.lo, boxes.hi).any(axis=1)


@dataclass(frozen=True, eq=False)
class Boxes:
    """Packed lower/upper corners of a set of axis-aligned boxes."""

    lo: np.ndarray
    hi: np.ndarray

    def __len__(self):
        return len(self.lo)

    @classmethod
    def from_rects(cls, rects: Sequence["Rect2"]) -> "Boxes":
        lo = np.array([(r.d_min, r.z_min) for r in rects], dtype=float).reshape(-1, 2)
        hi = np.array([(r.d_max, r.z_max) for r in rects], dtype=float).reshape(-1, 2)
        return cls(lo, hi)

    def contains_point(self, point, eps: float = EPS) -> np.ndarray:
        point = np.asarray(point, dtype=float)
        return np.all((self.lo + eps < point) & (point < self.hi - eps), axis=1)


def _as_boxes(rects) -> Boxes:
    if isinstance(rects, Boxes):
        return rects
    if isinstance(rects, PlanarScene):
        return rects.boxes
    return Boxes.from_rects(list(rects))


#---- planes

@dataclass(frozen=True)
class PlaneFrame:
    """
    A vertical half-plane leaving ``T'`` (``origin``) along ``azimuth``.

    ``plane_index`` and ``side`` locate the half-plane inside a beam: half-planes
    ``k`` and ``k + p`` belong to the same full plane.
    """

    azimuth: float
    origin: Point2
    target_2d: Point2
    plane_index: int = 0
    side: int = 0

    def __post_init__(self):
        object.__setattr__(self, "azimuth", float(self.azimuth) % (2 * math.pi))
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

    @property
    def direction(self) -> Point2:
        return math.cos(self.azimuth), math.sin(self.azimuth)

    def ground_point(self, d: float) -> Point2:
        ux, uy = self.direction
        return self.origin[0] + d * ux, self.origin[1] + d * uy

    def to_world(self, d: float, z: float) -> Point3:
        x, y = self.ground_point(d)
        return Point3(x, y, z)

    def to_plane(self, x: float, y: float) -> Tuple[float, float]:
        """Returns ``(d, w)``: distance along the half-plane and signed offset from it."""
        ux, uy = self.direction
        dx, dy = x - self.origin[0], y - self.origin[1]
        return dx * ux + dy * uy, -dx * uy + dy * ux


@dataclass(frozen=True)
class Rect2:
    """Slice of an inflated cuboid by a half-plane, with its classification."""

    d_min: float
    d_max: float
    z_min: float
    z_max: float
    blocks_ugv: bool = False
    aerial_support_lr: bool = False
    aerial_support_ll: bool = False
    central: bool = False
    source: Optional[int] = None

    def __post_init__(self):
        if not (self.d_min < self.d_max and self.z_min < self.z_max):
            raise SceneError("degenerate rectangle %r" % (self,))

    @property
    def lower_right(self) -> Point2:
        # lowest corner nearest T
        return self.d_min, self.z_min

    @property
    def lower_left(self) -> Point2:
        return self.d_max, self.z_min

    @property
    def upper_left(self) -> Point2:
        return self.d_max, self.z_max

    @property
    def corners(self) -> Tuple[Point2, ...]:
        return ((self.d_min, self.z_min), (self.d_max, self.z_min),
                (self.d_max, self.z_max), (self.d_min, self.z_max))


@dataclass(frozen=True)
class PlanarScene:
    rects: Tuple[Rect2, ...]
    target_2d: Point2
    take_off_z: float
    frame: Optional[PlaneFrame] = None

    def __post_init__(self):
        object.__setattr__(self, "rects", tuple(self.rects))
        if self.target_2d[0] != 0:
            raise SceneError("target must lie at d = 0, got %r" % (self.target_2d,))

    @cached_property
    def boxes(self) -> Boxes:
        return Boxes.from_rects(self.rects)

    def segment_clear(self, p: Point2, q: Point2) -> bool:
        return not _slab_hits(p, q, self.boxes.lo, self.boxes.hi).any()

    def without(self, index: int) -> "PlanarScene":
        rects = self.rects[:index] + self.rects[index + 1:]
        return PlanarScene(rects, self.target_2d, self.take_off_z, self.frame)


def segment_clear(seg, rects) -> bool:
    """
    True iff the open segment misses every open rectangle interior.

    :param seg:
        Pair of ``(d, z)`` end-points.
    :param rects:
        Sequence of :class:`Rect2`, a :class:`Boxes` pack or a :class:`PlanarScene`.

    Usage:

        >>> wall = [Rect2(4, 5, 2, 25)]
        >>> segment_clear(((4, 25), (6, 25)), wall)
        True
        >>> segment_clear(((3, 10), (6, 10)), wall)
        False
    """
    boxes = _as_boxes(rects)
    p, q = seg
    return not _slab_hits(p, q, boxes.lo, boxes.hi).any()


#---- scenes

@dataclass(frozen=True)
class Scene:
    obstacles: Tuple[Cuboid, ...]
    start: Point3
    targets: Tuple[Point3, ...]
    params: MarsupialParams
    bounds: Cuboid

    def __post_init__(self):
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        object.__setattr__(self, "start", Point3(*map(float, self.start)))
        object.__setattr__(self, "targets", tuple(Point3(*map(float, t)) for t in self.targets))

    @cached_property
    def inflated(self) -> Tuple[Cuboid, ...]:
        return tuple(inflate(o, self.params.r) for o in self.obstacles)

    @cached_property
    def inflated_array(self) -> np.ndarray:
        """Inflated obstacles as rows ``(xmin, ymin, zmin, xmax, ymax, zmax)``."""
        return np.array([c.as_array() for c in self.inflated], dtype=float).reshape(-1, 6)

    @cached_property
    def blocking(self) -> np.ndarray:
        """Mask of inflated obstacles whose z-range meets ``(0, h - r)``."""
        arr = self.inflated_array
        return (arr[:, 2] < self.params.take_off_z - EPS) & (arr[:, 5] > EPS)

    @cached_property
    def footprints(self) -> Boxes:
        arr = self.inflated_array[self.blocking]
        return Boxes(arr[:, 0:2], arr[:, 3:5])

    @cached_property
    def solids(self) -> Boxes:
        arr = self.inflated_array
        return Boxes(arr[:, 0:3], arr[:, 3:6])

    def target_ground(self, index: int) -> Point2:
        t = self.targets[index]
        return t.x, t.y

    def in_bounds_xy(self, x: float, y: float) -> bool:
        lo, hi = self.bounds.min_corner, self.bounds.max_corner
        return lo.x - EPS <= x <= hi.x + EPS and lo.y - EPS <= y <= hi.y + EPS

    def ground_free(self, x: float, y: float) -> bool:
        """False when ``(x, y)`` lies inside a UGV-blocking footprint."""
        return not self.footprints.contains_point((x, y)).any()

    def with_targets(self, targets) -> "Scene":
        return Scene(self.obstacles, self.start, tuple(targets), self.params, self.bounds)


def ugv_sweep_clear(x1, x2, scene: Scene) -> bool:
    """
    True iff the UGV segment can translate along the ground from ``x1`` to
    ``x2`` without entering an inflated obstacle.  Only the ``x, y``
    components of the points are read.
    """
    fp = scene.footprints
    return not _slab_hits(x1[:2], x2[:2], fp.lo, fp.hi).any()


def ugv_sweep_clear_many(x1, others, scene: Scene) -> np.ndarray:
    """Vectorised :func:`ugv_sweep_clear` from ``x1`` to each row of ``others``."""
    fp = scene.footprints
    others = np.asarray(others, dtype=float).reshape(-1, 2)
    return ~_slab_hits_many(np.asarray(x1[:2], dtype=float), others, fp.lo, fp.hi).any(axis=1)


def segment3_clear(p, q, scene: Scene) -> bool:
    """True iff the open 3D segment misses every inflated obstacle interior."""
    solids = scene.solids
    return not _slab_hits(p, q, solids.lo, solids.hi).any()


def slice_scene(scene: Scene, frame: PlaneFrame, indices=None) -> PlanarScene:
    """
    Intersects every inflated obstacle with the half-plane of ``frame``, or
    only those listed in ``indices`` when given.

    Rectangles wholly behind ``T'`` are dropped, planes grazing a face emit
    nothing.  Each rectangle is flagged as a UGV blocker, a support source
    (its lower corners lie above the take-off line) or central (its cuboid
    meets the vertical segment from ``T'`` up to ``T``).
    """
    arr = scene.inflated_array
    source = np.arange(len(arr)) if indices is None else np.asarray(indices, dtype=int)
    arr = arr[source]
    z0 = scene.params.take_off_z
    z_target = frame.target_2d[1]
    ox, oy = frame.origin
    ux, uy = frame.direction

    n = len(arr)
    t_enter = np.zeros(n)
    t_leave = np.full(n, np.inf)
    hit = np.ones(n, dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        for axis, (o, u) in enumerate(((ox, ux), (oy, uy))):
            lo, hi = arr[:, axis], arr[:, axis + 3]
            if abs(u) < 1e-15:
                hit &= (lo + EPS < o) & (o < hi - EPS)
                continue
            ta, tb = (lo - o) / u, (hi - o) / u
            t_enter = np.maximum(t_enter, np.minimum(ta, tb))
            t_leave = np.minimum(t_leave, np.maximum(ta, tb))
    hit &= t_leave - t_enter > EPS

    rects = []
    for i in np.flatnonzero(hit):
        xmin, ymin, zmin, xmax, ymax, zmax = arr[i]
        central = (xmin + EPS < ox < xmax - EPS and ymin + EPS < oy < ymax - EPS
                   and zmin < z_target and zmax > 0)
        support = bool(zmin > z0 + EPS) and not central
        rects.append(Rect2(
            d_min=float(t_enter[i]),
            d_max=float(t_leave[i]),
            z_min=float(zmin),
            z_max=float(zmax),
            blocks_ugv=bool(zmin < z0 - EPS and zmax > EPS),
            aerial_support_lr=support,
            aerial_support_ll=support,
            central=bool(central),
            source=int(source[i]),
        ))
    return PlanarScene(tuple(rects), (0.0, float(z_target)), z0, frame)


#---- validation and files

def validate_scene(scene: Scene) -> Scene:
    """
    Checks the scene invariants and returns the scene unchanged.

    :raises SceneError:
        Naming the first violated invariant.
    """
    params = scene.params
    if not scene.targets:
        raise SceneError("scene has no targets")
    if abs(scene.start.z) > EPS:
        raise SceneError("start must lie on the ground, got z=%g" % scene.start.z)
    bounds = scene.bounds
    for label, point in [("start", scene.start)] + [("target %d" % i, t) for i, t in enumerate(scene.targets)]:
        if not all(lo - EPS <= c <= hi + EPS
                   for lo, c, hi in zip(bounds.min_corner, point, bounds.max_corner)):
            raise SceneError("%s %r lies outside the bounds" % (label, tuple(point)))
        inside = scene.solids.contains_point(point)
        if inside.any():
            raise SceneError("%s %r lies inside inflated obstacle %d"
                             % (label, tuple(point), int(np.flatnonzero(inside)[0])))
    for i, t in enumerate(scene.targets):
        if not t.z > params.h:
            raise SceneError("target %d must be above h=%g, got z=%g" % (i, params.h, t.z))
    raw = np.array([o.as_array() for o in scene.obstacles], dtype=float).reshape(-1, 6)
    if len(raw) > 1:
        lo, hi = raw[:, :3], raw[:, 3:]
        overlap = np.all((lo[:, None, :] < hi[None, :, :] - EPS) & (lo[None, :, :] < hi[:, None, :] - EPS), axis=2)
        np.fill_diagonal(overlap, False)
        if overlap.any():
            i, j = np.argwhere(overlap)[0]
            raise SceneError("obstacles %d and %d overlap" % (i, j))
    return scene


def _check_keys(doc, allowed, where):
    if not isinstance(doc, dict):
        raise SceneError("%s must be an object" % where)
    unknown = sorted(set(doc) - set(allowed))
    if unknown:
        raise SceneError("unknown field(s) in %s: %s" % (where, ", ".join(unknown)))
    missing = sorted(set(allowed) - set(doc))
    if missing:
        raise SceneError("missing field(s) in %s: %s" % (where, ", ".join(missing)))


def _vector(value, size, where):
    if not isinstance(value, (list, tuple)) or len(value) != size:
        raise SceneError("%s must be a list of %d numbers" % (where, size))
    try:
        return tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise SceneError("%s must contain numbers" % where)


def scene_from_dict(doc) -> Scene:
    """Builds and validates a :class:`Scene` from its JSON document form."""
    _check_keys(doc, ("bounds", "obstacles", "start", "targets", "params"), "scene")
    _check_keys(doc["bounds"], ("min", "max"), "bounds")
    _check_keys(doc["params"], ("h", "r", "L"), "params")
    bounds = Cuboid(_vector(doc["bounds"]["min"], 3, "bounds.min"),
                    _vector(doc["bounds"]["max"], 3, "bounds.max"))
    obstacles = []
    for i, item in enumerate(doc["obstacles"]):
        _check_keys(item, ("min", "max"), "obstacles[%d]" % i)
        obstacles.append(Cuboid(_vector(item["min"], 3, "obstacles[%d].min" % i),
                                _vector(item["max"], 3, "obstacles[%d].max" % i)))
    sx, sy = _vector(doc["start"], 2, "start")
    targets = [_vector(t, 3, "targets[%d]" % i) for i, t in enumerate(doc["targets"])]
    try:
        params = MarsupialParams(float(doc["params"]["h"]), float(doc["params"]["r"]),
                                 float(doc["params"]["L"]))
    except (TypeError, ValueError):
        raise SceneError("params must be numbers")
    return validate_scene(Scene(obstacles, (sx, sy, 0.0), targets, params, bounds))


def scene_to_dict(scene: Scene) -> dict:
    return {
        "bounds": {"min": list(scene.bounds.min_corner), "max": list(scene.bounds.max_corner)},
        "obstacles": [{"min": list(o.min_corner), "max": list(o.max_corner)} for o in scene.obstacles],
        "start": [scene.start.x, scene.start.y],
        "targets": [list(t) for t in scene.targets],
        "params": {"h": scene.params.h, "r": scene.params.r, "L": scene.params.L},
    }


def load_scene(path) -> Scene:
    try:
        with open(path, "r") as scene_file:
            doc = json.load(scene_file)
    except ValueError as ex:
        raise SceneError("not valid JSON: %s" % ex, context=str(path))
    try:
        return scene_from_dict(doc)
    except SceneError as ex:
        raise SceneError(ex.error_message, context=str(path))
