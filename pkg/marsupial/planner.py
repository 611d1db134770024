# -*- coding: utf-8 -*-
#
# Copyright (C) 2024 The marsupial authors.
# License: MIT License (http://www.opensource.org/licenses/mit-license.php)

"""\
Ground and aerial path planning for one or more targets.

The UGV moves on a visibility graph over the corners of blocking
footprints.  Take-off candidates join that graph as extra vertices, each
linked to a virtual vertex ``T'`` by an edge weighted with its aerial
tether length, so a single shortest-path search from ``S`` to ``T'``
returns the ground path, the take-off point and the aerial path together.

Module usage:

    plan = maspa_plan(scene, 0, PlannerParams(p=16, q=30))
    plans = plan_sequential(scene, PlannerParams())
    assert not validate_plan(scene, plan)
"""

import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from marsupial.catenary import catenary_clear, lowest_point, solve_catenary
from marsupial.errors import ConfigError, MarsupialError, NoCandidates, Unreachable
from marsupial.geometry import (EPS, PlaneFrame, Point3, Scene, scene_from_dict, scene_to_dict,
                                segment3_clear, slice_scene, ugv_sweep_clear, ugv_sweep_clear_many)
from marsupial.pva3d import (CATENARY, MODES, TAUT, CandidateTakeoff, beam_phase, densify, plane_beam, pva3d,
                             refine_beam, sample_candidates, slice_beam, uniform_candidates)

logger = logging.getLogger("marsupial.planner")

STAGES = ("slice", "pva", "cand", "graph", "search")

# relative slack when matching Dijkstra distances along tight edges
TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class PlannerParams:
    """
    :param p:
        Number of full vertical planes through the target (``2p`` half-planes).
    :param q:
        Take-off candidates per half-plane.
    :param c:
        Catenary lengths scanned per candidate.
    :param mode:
        ``"taut"`` or ``"catenary"``.
    :param use_pva:
        False samples the whole reachable segment of every half-plane
        without visibility filtering.
    :param refine:
        Extra half-planes on each side of the winning one, splitting the
        gaps to its beam neighbours; 0 plans on the beam alone.
    """

    p: int = 16
    q: int = 30
    c: int = 26
    mode: str = CATENARY
    use_pva: bool = True
    refine: int = 4

    def __post_init__(self):
        for name in ("p", "q", "c", "refine"):
            value = getattr(self, name)
            least = 0 if name == "refine" else 1
            if not isinstance(value, int) or isinstance(value, bool) or value < least:
                raise ConfigError("planner %s must be an integer of at least %d, got %r" % (name, least, value))
        if self.mode not in MODES:
            raise ConfigError("planner mode must be one of %s, got %r" % (", ".join(MODES), self.mode))

    @property
    def planner_id(self) -> str:
        return "maspa" if self.use_pva else "maspa-minus"


@dataclass(frozen=True, eq=False)
class GroundSkeleton:
    """Blocking footprint corners and the clear corner-to-corner edges."""

    corners: np.ndarray
    edges: Tuple[Tuple[int, int], ...]


@dataclass(eq=False)
class GroundGraph:
    """
    Node ``0`` is the start, then the corners, then the candidates; the last
    node is the virtual target vertex.
    """

    graph: nx.Graph
    points: np.ndarray
    candidates: List[CandidateTakeoff]
    n_corners: int

    @property
    def source(self) -> int:
        return 0

    @property
    def sink(self) -> int:
        return len(self.points)

    def candidate_node(self, k: int) -> int:
        return 1 + self.n_corners + k

    def candidate_at(self, node: int) -> Optional[CandidateTakeoff]:
        k = node - 1 - self.n_corners
        return self.candidates[k] if 0 <= k < len(self.candidates) else None


@dataclass
class PlanResult:
    """
    One planned mission: ground path from the start to the take-off ground
    point ``X`` and aerial path from ``Y`` (above ``X``) to the target.
    """

    target_index: int
    target: Point3
    ground_path: Tuple[Point3, ...]
    aerial_path: Tuple[Point3, ...]
    mode: str
    aerial_length: float
    total_length: float
    timings: Dict[str, float] = field(default_factory=dict)
    planner: str = "maspa"
    takeoff: Optional[CandidateTakeoff] = None
    metadata: dict = field(default_factory=dict)

    @property
    def X(self) -> Point3:
        return self.ground_path[-1]

    @property
    def Y(self) -> Point3:
        return self.aerial_path[0]

    @property
    def ground_length(self) -> float:
        return _polyline_length(self.ground_path)

    @property
    def elapsed(self) -> float:
        return sum(self.timings.values())

    def to_dict(self) -> dict:
        return {
            "planner": self.planner,
            "target_index": self.target_index,
            "target": list(self.target),
            "ground_path": [list(p) for p in self.ground_path],
            "aerial_path": [list(p) for p in self.aerial_path],
            "takeoff": {"X": list(self.X), "Y": list(self.Y)} if self.takeoff is None
            else self.takeoff.to_dict(),
            "mode": self.mode,
            "aerial_length": self.aerial_length,
            "tl_m": self.total_length,
            "timings_s": dict(self.timings),
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "PlanResult":
        try:
            return cls(
                target_index=int(doc["target_index"]),
                target=Point3(*doc["target"]),
                ground_path=tuple(Point3(*p) for p in doc["ground_path"]),
                aerial_path=tuple(Point3(*p) for p in doc["aerial_path"]),
                mode=doc["mode"],
                aerial_length=float(doc["aerial_length"]),
                total_length=float(doc["tl_m"]),
                timings={k: float(v) for k, v in doc.get("timings_s", {}).items()},
                planner=doc.get("planner", "maspa"),
                metadata=dict(doc.get("metadata", {})),
            )
        except (KeyError, TypeError, ValueError) as ex:
            raise MarsupialError("malformed plan record: %s" % ex)


def _polyline_length(points) -> float:
    return sum(math.dist(a, b) for a, b in zip(points, points[1:]))


#---- ground graph

def ground_skeleton(scene: Scene) -> GroundSkeleton:
    """
    Corners of the blocking footprints that lie on free ground inside the
    bounds, with every pair of them the UGV can drive between.
    """
    fp = scene.footprints
    corners = np.concatenate([
        fp.lo,
        np.column_stack((fp.hi[:, 0], fp.lo[:, 1])),
        fp.hi,
        np.column_stack((fp.lo[:, 0], fp.hi[:, 1])),
    ]).reshape(-1, 2)
    keep = [i for i, (x, y) in enumerate(corners)
            if scene.in_bounds_xy(x, y) and scene.ground_free(x, y)]
    corners = corners[keep]
    edges = []
    for i in range(len(corners) - 1):
        clear = ugv_sweep_clear_many(corners[i], corners[i + 1:], scene)
        edges.extend((i, i + 1 + j) for j in np.flatnonzero(clear))
    logger.debug("ground skeleton: %d corners, %d edges", len(corners), len(edges))
    return GroundSkeleton(corners, tuple(edges))


def build_ground_graph(scene: Scene, S, candidates: Sequence[CandidateTakeoff],
                       skeleton: Optional[GroundSkeleton] = None) -> GroundGraph:
    """
    Visibility graph over ``S``, the footprint corners and the candidate
    ground points, plus the virtual target vertex.

    A shortest ground path only bends at footprint corners, so candidates
    are linked to ``S`` and the corners but not to each other.

    :raises NoCandidates:
        When ``candidates`` is empty.
    """
    if not candidates:
        raise NoCandidates("no take-off candidates to connect")
    if skeleton is None:
        skeleton = ground_skeleton(scene)
    n_corners = len(skeleton.corners)
    cand_points = np.array([(c.X.x, c.X.y) for c in candidates], dtype=float)
    points = np.vstack([np.array([[S[0], S[1]]], dtype=float), skeleton.corners.reshape(-1, 2), cand_points])
    graph = nx.Graph()
    graph.add_nodes_from(range(len(points) + 1))

    def link(i, others):
        clear = ugv_sweep_clear_many(points[i], points[others], scene)
        for j in np.asarray(others, dtype=int)[clear]:
            graph.add_edge(i, int(j), weight=float(math.dist(points[i], points[j])))

    for a, b in skeleton.edges:
        graph.add_edge(a + 1, b + 1, weight=float(math.dist(skeleton.corners[a], skeleton.corners[b])))
    first_cand = 1 + n_corners
    link(0, list(range(1, len(points))))
    if n_corners:
        corners = list(range(1, first_cand))
        for i in range(first_cand, len(points)):
            link(i, corners)
    sink = len(points)
    for k, cand in enumerate(candidates):
        graph.add_edge(first_cand + k, sink, weight=float(cand.aerial_length))
    return GroundGraph(graph, points, list(candidates), n_corners)


def shortest_path(ground: GroundGraph) -> Tuple[List[int], float]:
    """
    Dijkstra from the start to the virtual target vertex.  Among equally
    short paths the one whose vertices, read back from the target, have the
    smallest keys wins.

    :raises Unreachable:
        When the two are disconnected.
    """
    graph = ground.graph
    try:
        dist = nx.single_source_dijkstra_path_length(graph, ground.source)
    except nx.NodeNotFound:
        raise Unreachable("no ground path reaches a take-off candidate")
    if ground.sink not in dist:
        raise Unreachable("no ground path reaches a take-off candidate")
    path = [ground.sink]
    seen = {ground.sink}
    v = ground.sink
    while v != ground.source:
        tol = TIE_TOLERANCE * max(1.0, dist[v])
        tight = [u for u, attrs in graph[v].items()
                 if u in dist and u not in seen and dist[u] + attrs["weight"] <= dist[v] + tol]
        if not tight:
            raise MarsupialError("shortest path tree is inconsistent at vertex %d" % v)
        v = min(tight)
        seen.add(v)
        path.append(v)
    return path[::-1], float(dist[ground.sink])


#---- planning

def _candidates_on(scene: Scene, frames, params: PlannerParams, threads, timings) -> List[CandidateTakeoff]:
    clock = time.perf_counter
    t = clock()
    planes = slice_beam(scene, frames)
    timings["slice"] += clock() - t
    t = clock()
    if params.use_pva:
        halves = pva3d(scene, None, params.p, planes=planes, threads=threads)
        timings["pva"] += clock() - t
        t = clock()
        candidates = sample_candidates(halves, scene, params.q, params.mode, params.c)
    else:
        candidates = uniform_candidates(planes, scene, params.q, params.mode, params.c)
    timings["cand"] += clock() - t
    return candidates


def _search(scene: Scene, start, candidates, skeleton, target_index: int, timings):
    clock = time.perf_counter
    t = clock()
    try:
        ground = build_ground_graph(scene, start, candidates, skeleton)
    except NoCandidates as ex:
        raise Unreachable(ex.error_message, target_index=target_index)
    timings["graph"] += clock() - t
    t = clock()
    try:
        path, _ = shortest_path(ground)
    except Unreachable as ex:
        raise Unreachable(ex.error_message, target_index=target_index)
    timings["search"] += clock() - t
    return ground, path


def maspa_plan(scene: Scene, target_index: int = 0, params: Optional[PlannerParams] = None,
               start=None, skeleton: Optional[GroundSkeleton] = None,
               threads: Optional[int] = None) -> PlanResult:
    """
    Plans the ground and aerial path to one target.  With
    ``params.refine`` set, half-planes added around the winning candidate
    contribute more candidates, as do points around it on its own
    half-plane, and the search runs again.

    :param scene:
        A validated scene.
    :param target_index:
        Index into ``scene.targets``.
    :param params:
        Planner settings, defaults when omitted.
    :param start:
        Ground start ``(x, y)``, the scene start when omitted.
    :param skeleton:
        Precomputed :func:`ground_skeleton` of the scene.
    :return:
        A :class:`PlanResult` with per-stage timings.
    :raises Unreachable:
        When no feasible plan exists.
    :raises NoCandidates:
        Re-raised as :class:`Unreachable` carrying the target index.
    """
    params = params or PlannerParams()
    target = scene.targets[target_index]
    start = scene.start if start is None else Point3(float(start[0]), float(start[1]), 0.0)
    timings = dict.fromkeys(STAGES, 0.0)
    if skeleton is None:
        t = time.perf_counter()
        skeleton = ground_skeleton(scene)
        timings["graph"] += time.perf_counter() - t

    frames = plane_beam(target, params.p, beam_phase(start, target))
    candidates = _candidates_on(scene, frames, params, threads, timings)
    ground, path = _search(scene, start, candidates, skeleton, target_index, timings)
    if params.refine:
        winner = ground.candidate_at(path[-2])
        extra = _candidates_on(scene, refine_beam(winner.frame, params.p, params.refine), params, threads, timings)
        t = time.perf_counter()
        extra += densify(scene, winner.frame, winner.d, params.q, params.refine, params.mode, params.c,
                         params.use_pva)
        timings["cand"] += time.perf_counter() - t
        if extra:
            candidates = candidates + extra
            ground, path = _search(scene, start, candidates, skeleton, target_index, timings)

    cand = ground.candidate_at(path[-2])
    ground_path = tuple(Point3(float(ground.points[n][0]), float(ground.points[n][1]), 0.0) for n in path[:-1])
    ground_path = (start,) + ground_path[1:]
    aerial_path = tuple(cand.aerial_path())
    result = PlanResult(
        target_index=target_index,
        target=target,
        ground_path=ground_path,
        aerial_path=aerial_path,
        mode=params.mode,
        aerial_length=cand.aerial_length,
        total_length=_polyline_length(ground_path) + cand.aerial_length,
        timings=timings,
        planner=params.planner_id,
        takeoff=cand,
        metadata={
            "half_planes": 2 * params.p,
            "refined_half_planes": 2 * params.refine,
            "candidates": len(candidates),
            "vertices": ground.graph.number_of_nodes(),
            "params": asdict(params),
        },
    )
    logger.info("target %d: %s total length %.3f m (ground %.3f, aerial %.3f) over %d candidates",
                target_index, result.planner, result.total_length, result.ground_length,
                result.aerial_length, len(candidates))
    logger.debug("target %d stage timings: %s", target_index,
                 ", ".join("%s=%.4fs" % (k, v) for k, v in timings.items()))
    return result


def plan_sequential(scene: Scene, params: Optional[PlannerParams] = None,
                    threads: Optional[int] = None) -> List[PlanResult]:
    """
    Plans every target in order.  Each plan starts where the previous one
    took off; the UAV retrace between targets is not counted.
    """
    skeleton = ground_skeleton(scene)
    plans = []
    start = scene.start
    for index in range(len(scene.targets)):
        plan = maspa_plan(scene, index, params, start=start, skeleton=skeleton, threads=threads)
        plans.append(plan)
        start = plan.X
    return plans


#---- validation and documents

def aerial_catenary(plan: PlanResult):
    """
    Rebuilds the catenary of a loose-tether plan in the half-plane through
    its take-off point.  Returns ``(frame, d, curve)``.

    :raises MarsupialError:
        When no catenary of the recorded length joins the anchors.
    """
    T, Y = plan.target, plan.Y
    dx, dy = Y.x - T.x, Y.y - T.y
    d = math.hypot(dx, dy)
    frame = PlaneFrame(math.atan2(dy, dx) if d > EPS else 0.0, (T.x, T.y), (0.0, T.z))
    return frame, d, solve_catenary((d, Y.z), (0.0, T.z), plan.aerial_length)


def _catenary_violations(scene: Scene, plan: PlanResult) -> List[str]:
    try:
        frame, _, curve = aerial_catenary(plan)
    except MarsupialError as ex:
        return ["aerial catenary cannot be rebuilt: %s" % ex]
    problems = []
    if lowest_point(curve) < scene.params.take_off_z - EPS:
        problems.append("aerial catenary sags to z=%.6g, below the take-off line" % lowest_point(curve))
    if not catenary_clear(curve, slice_scene(scene, frame)):
        problems.append("aerial catenary collides")
    return problems


def validate_plan(scene: Scene, plan: PlanResult, start=None) -> List[str]:
    """
    Re-checks a plan from scratch and lists every violated constraint.

    :param start:
        Expected first ground point, the scene start when omitted.
    :return:
        Empty list for a feasible plan.
    """
    problems = []
    start = scene.start if start is None else start
    params = scene.params
    gp, ap = plan.ground_path, plan.aerial_path
    if not gp or not ap:
        return ["plan has an empty ground or aerial path"]
    if math.dist(gp[0][:2], tuple(start)[:2]) > 1e-9:
        problems.append("ground path starts at %r, expected %r" % (tuple(gp[0]), tuple(start)))
    for a, b in zip(gp, gp[1:]):
        if not ugv_sweep_clear(a, b, scene):
            problems.append("ground edge %r -> %r collides" % (tuple(a), tuple(b)))
    for p in gp:
        if abs(p[2]) > EPS:
            problems.append("ground point %r is off the ground" % (tuple(p),))
    X, Y = gp[-1], ap[0]
    if math.dist(Y, (X[0], X[1], params.take_off_z)) > 1e-9:
        problems.append("take-off point %r is not above %r" % (tuple(Y), tuple(X)))
    if math.dist(ap[-1], plan.target) > 1e-6:
        problems.append("aerial path ends at %r, not at the target" % (tuple(ap[-1]),))
    if plan.aerial_length > params.L + 1e-9:
        problems.append("aerial length %.9g exceeds L=%g" % (plan.aerial_length, params.L))
    if plan.aerial_length < math.dist(Y, plan.target) - 1e-9:
        problems.append("aerial length is shorter than the straight line")
    if plan.mode == TAUT:
        for a, b in zip(ap, ap[1:]):
            if not segment3_clear(a, b, scene):
                problems.append("aerial segment %r -> %r collides" % (tuple(a), tuple(b)))
        if abs(_polyline_length(ap) - plan.aerial_length) > 1e-6:
            problems.append("aerial chain length differs from the recorded length")
    else:
        problems.extend(_catenary_violations(scene, plan))
    expected = _polyline_length(gp) + plan.aerial_length
    if abs(expected - plan.total_length) > 1e-9 * max(1.0, expected):
        problems.append("total length %.12g differs from ground plus aerial %.12g" % (plan.total_length, expected))
    return problems


def plan_document(scene: Scene, plans: Sequence[PlanResult], params: Optional[PlannerParams] = None) -> dict:
    """JSON document for ``plan.json``, with the scene embedded."""
    doc = {
        "scene": scene_to_dict(scene),
        "plans": [plan.to_dict() for plan in plans],
        "tl_m": sum(plan.total_length for plan in plans),
        "retrace_included": False,
    }
    if params is not None:
        doc["params"] = asdict(params)
        doc["half_planes"] = 2 * params.p
    return doc


def plan_from_dict(doc: dict):
    """Returns ``(scene, plans)`` from a :func:`plan_document` dictionary."""
    if not isinstance(doc, dict) or "scene" not in doc or "plans" not in doc:
        raise MarsupialError("plan document needs 'scene' and 'plans'")
    return scene_from_dict(doc["scene"]), [PlanResult.from_dict(p) for p in doc["plans"]]


def validate_document(doc: dict) -> List[str]:
    """Validates a whole sequence of plans, each starting where the previous one took off."""
    scene, plans = plan_from_dict(doc)
    problems = []
    start = scene.start
    for plan in plans:
        problems.extend("target %d: %s" % (plan.target_index, p) for p in validate_plan(scene, plan, start))
        start = plan.X
    return problems
