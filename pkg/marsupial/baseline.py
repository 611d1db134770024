# -*- coding: utf-8 -*-
#
# Copyright (C) 2024 The marsupial authors.
# License: MIT License (http://www.opensource.org/licenses/mit-license.php)

"""\
Sampling-based comparison planner.

An RRT* tree grows over free ground from the start.  Every node is scored by
its tree cost plus the shortest clearing catenary from the take-off point
above it to the target, checked in the vertical half-plane through the
node.  The best scored node when the time budget runs out gives the plan.
"""

import logging
import math
import time
from collections import deque
from dataclasses import asdict, dataclass
from typing import List, Optional

import numpy as np

from marsupial.catenary import Catenary, min_catenary
from marsupial.errors import ConfigError, Unreachable
from marsupial.geometry import EPS, PlaneFrame, Point3, Scene, slice_scene, ugv_sweep_clear
from marsupial.planner import PlanResult, _polyline_length

logger = logging.getLogger("marsupial.baseline")

# azimuth buckets for the per-node slice memo
BUCKET = math.radians(0.5)


@dataclass(frozen=True)
class RrtParams:
    """
    :param budget_s:
        Wall-clock budget for tree growth.
    :param step:
        Maximum extension per iteration.
    :param rewire_gamma:
        Rewiring radius coefficient; ``2 * sqrt(free_area / pi)`` when ``None``.
    :param seed:
        Sampler seed.
    :param c:
        Catenary lengths scanned per node.
    :param max_iterations:
        Optional iteration cap, which makes runs independent of machine speed.
    """

    budget_s: float = 20.0
    step: float = 2.0
    rewire_gamma: Optional[float] = None
    seed: int = 0
    c: int = 26
    max_iterations: Optional[int] = None

    def __post_init__(self):
        if not self.budget_s > 0:
            raise ConfigError("rrt budget_s must be positive, got %r" % (self.budget_s,))
        if not self.step > 0:
            raise ConfigError("rrt step must be positive, got %r" % (self.step,))
        if self.c < 1:
            raise ConfigError("rrt c must be at least 1, got %r" % (self.c,))


@dataclass
class RrtNode:
    point: tuple
    parent: int
    cost: float
    aerial: Optional[Catenary] = None
    frame: Optional[PlaneFrame] = None

    @property
    def aerial_length(self) -> Optional[float]:
        return None if self.aerial is None else self.aerial.arc_length

    @property
    def score(self) -> float:
        return math.inf if self.aerial is None else self.cost + self.aerial.arc_length


def _free_area(scene: Scene) -> float:
    lo, hi = scene.bounds.min_corner, scene.bounds.max_corner
    fp = scene.footprints
    width = np.clip(np.minimum(fp.hi[:, 0], hi.x) - np.maximum(fp.lo[:, 0], lo.x), 0.0, None)
    depth = np.clip(np.minimum(fp.hi[:, 1], hi.y) - np.maximum(fp.lo[:, 1], lo.y), 0.0, None)
    return max((hi.x - lo.x) * (hi.y - lo.y) - float(np.sum(width * depth)), EPS)


def wedge_members(scene: Scene, T, bucket: int) -> np.ndarray:
    """
    Indices of the inflated obstacles whose footprint meets the azimuth
    wedge ``[bucket, bucket + 1) * BUCKET`` around ``T'``; a node whose
    half-plane lies in that wedge only needs these sliced.
    """
    arr = scene.inflated_array
    if len(arr) == 0:
        return np.empty(0, dtype=int)
    xs = np.column_stack((arr[:, 0], arr[:, 3], arr[:, 3], arr[:, 0])) - T[0]
    ys = np.column_stack((arr[:, 1], arr[:, 1], arr[:, 4], arr[:, 4])) - T[1]
    around = ((arr[:, 0] <= T[0] + EPS) & (T[0] <= arr[:, 3] + EPS)
              & (arr[:, 1] <= T[1] + EPS) & (T[1] <= arr[:, 4] + EPS))
    ref = np.arctan2(ys.mean(axis=1), xs.mean(axis=1))
    rel = np.angle(np.exp(1j * (np.arctan2(ys, xs) - ref[:, None])))
    half = 0.5 * BUCKET
    offset = np.angle(np.exp(1j * ((bucket + 0.5) * BUCKET - ref)))
    meets = (offset >= rel.min(axis=1) - half - 1e-9) & (offset <= rel.max(axis=1) + half + 1e-9)
    return np.flatnonzero(around | meets)


class RrtStar:
    """Tree state of one run; use :func:`rrt_star_plan`."""

    def __init__(self, scene: Scene, target_index: int, params: RrtParams):
        self.scene = scene
        self.target_index = target_index
        self.target = scene.targets[target_index]
        self.params = params
        self.rng = np.random.default_rng(params.seed)
        self.gamma = params.rewire_gamma
        if self.gamma is None:
            self.gamma = 2.0 * math.sqrt(_free_area(scene) / math.pi)
        self.nodes: List[RrtNode] = []
        self.children: List[set] = []
        self.points = np.empty((64, 2))
        self.best = -1
        self.best_score = math.inf
        self.history = []
        self.wedges = {}
        self.aerial_time = 0.0

    def _evaluate(self, node: RrtNode):
        t = time.perf_counter()
        T = self.target
        dx, dy = node.point[0] - T.x, node.point[1] - T.y
        d = math.hypot(dx, dy)
        azimuth = math.atan2(dy, dx) if d > EPS else 0.0
        frame = PlaneFrame(azimuth, (T.x, T.y), (0.0, T.z))
        bucket = math.floor(azimuth / BUCKET)
        if bucket not in self.wedges:
            self.wedges[bucket] = wedge_members(self.scene, T, bucket)
        plane = slice_scene(self.scene, frame, self.wedges[bucket])
        node.frame = frame
        z0 = plane.take_off_z
        node.aerial = min_catenary((d, z0), plane.target_2d, self.scene.params.L, self.params.c, plane, floor=z0)
        self.aerial_time += time.perf_counter() - t

    def _add(self, point, parent: int, cost: float) -> int:
        k = len(self.nodes)
        if k == len(self.points):
            self.points = np.vstack([self.points, np.empty_like(self.points)])
        self.points[k] = point
        self.nodes.append(RrtNode(tuple(point), parent, cost))
        self.children.append(set())
        if parent >= 0:
            self.children[parent].add(k)
        self._evaluate(self.nodes[k])
        return k

    def _offer(self, k: int, elapsed: float):
        # also fires when rewiring shortens the best node itself
        score = self.nodes[k].score
        if score < self.best_score:
            self.best, self.best_score = k, score
            self.history.append((elapsed, score))

    def _propagate(self, root: int, elapsed: float):
        queue = deque([root])
        while queue:
            k = queue.popleft()
            for child in self.children[k]:
                step = float(np.hypot(*(self.points[child] - self.points[k])))
                self.nodes[child].cost = self.nodes[k].cost + step
                self._offer(child, elapsed)
                queue.append(child)

    def grow(self, started: float):
        params, scene = self.params, self.scene
        lo, hi = scene.bounds.min_corner, scene.bounds.max_corner
        root = self._add(np.array([scene.start.x, scene.start.y]), -1, 0.0)
        self._offer(root, 0.0)
        iterations = 0
        while True:
            elapsed = time.perf_counter() - started
            if elapsed >= params.budget_s:
                break
            if params.max_iterations is not None and iterations >= params.max_iterations:
                break
            iterations += 1
            sample = self.rng.uniform((lo.x, lo.y), (hi.x, hi.y))
            if not scene.ground_free(*sample):
                continue
            n = len(self.nodes)
            pts = self.points[:n]
            dist = np.hypot(pts[:, 0] - sample[0], pts[:, 1] - sample[1])
            near = int(np.argmin(dist))
            if dist[near] <= EPS:
                continue
            new = pts[near] + (sample - pts[near]) * min(1.0, params.step / dist[near])
            if not scene.ground_free(*new) or not ugv_sweep_clear(pts[near], new, scene):
                continue

            radius = min(4.0 * params.step, self.gamma * math.sqrt(math.log(n + 1) / (n + 1)))
            gaps = np.hypot(pts[:, 0] - new[0], pts[:, 1] - new[1])
            around = [int(k) for k in np.flatnonzero(gaps <= radius)]
            parent, cost = near, self.nodes[near].cost + float(gaps[near])
            for k in sorted(around, key=lambda k: self.nodes[k].cost + gaps[k]):
                if self.nodes[k].cost + gaps[k] >= cost:
                    break
                if ugv_sweep_clear(pts[k], new, scene):
                    parent, cost = k, self.nodes[k].cost + float(gaps[k])
                    break
            k_new = self._add(new, parent, cost)
            self._offer(k_new, elapsed)

            for k in around:
                if k == parent:
                    continue
                through = cost + float(gaps[k])
                if through < self.nodes[k].cost - EPS and ugv_sweep_clear(new, self.points[k], scene):
                    node = self.nodes[k]
                    self.children[node.parent].discard(k)
                    self.children[k_new].add(k)
                    node.parent, node.cost = k_new, through
                    self._offer(k, elapsed)
                    self._propagate(k, elapsed)
        return iterations

    def path_to(self, k: int) -> List[Point3]:
        out = []
        while k >= 0:
            x, y = self.nodes[k].point
            out.append(Point3(float(x), float(y), 0.0))
            k = self.nodes[k].parent
        return out[::-1]


def rrt_star_plan(scene: Scene, target_index: int = 0, params: Optional[RrtParams] = None) -> PlanResult:
    """
    Grows the tree until the budget (or iteration cap) is exhausted and
    returns the plan through the best scored node.

    :raises Unreachable:
        When no tree node admits a clearing catenary within ``L``.
    """
    params = params or RrtParams()
    started = time.perf_counter()
    tree = RrtStar(scene, target_index, params)
    iterations = tree.grow(started)
    elapsed = time.perf_counter() - started
    logger.debug("rrt*: %d iterations, %d nodes, %d score improvements",
                 iterations, len(tree.nodes), len(tree.history))
    if tree.best < 0:
        raise Unreachable("no tree node reaches the target with a clearing tether",
                          target_index=target_index)
    node = tree.nodes[tree.best]
    ground_path = tuple(tree.path_to(tree.best))
    pts = node.aerial.sample(128)
    aerial_path = tuple(node.frame.to_world(float(d), float(z)) for d, z in pts)
    result = PlanResult(
        target_index=target_index,
        target=tree.target,
        ground_path=ground_path,
        aerial_path=aerial_path,
        mode="catenary",
        aerial_length=node.aerial_length,
        total_length=_polyline_length(ground_path) + node.aerial_length,
        timings={"tree": elapsed - tree.aerial_time, "aerial": tree.aerial_time},
        planner="rrt_star",
        metadata={
            "iterations": iterations,
            "nodes": len(tree.nodes),
            "history": [list(h) for h in tree.history],
            "rewire_gamma": tree.gamma,
            "params": asdict(params),
        },
    )
    logger.info("target %d: rrt_star total length %.3f m after %d iterations",
                target_index, result.total_length, iterations)
    return result
