# -*- coding: utf-8 -*-
#
# Copyright (C) 2024 The marsupial authors.
# License: MIT License (http://www.opensource.org/licenses/mit-license.php)

"""\
Benchmark scenes and the benchmark harness.

Random scenes fill a box with disjoint ground and aerial cubes and put one
target above them.  Two hand-built scenes model a fireplace (the target
sits above a chimney reached through a door) and a building with two
balcony recesses surrounded by a forbidden ground strip.

Randomness comes from ``numpy.random.Generator(PCG64(seed))`` only, so a
scene is a pure function of its spec.
"""

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from marsupial.baseline import RrtParams, rrt_star_plan
from marsupial.errors import ConfigError, GenerationFailed, MarsupialError, SceneError
from marsupial.geometry import Cuboid, MarsupialParams, Scene, validate_scene
from marsupial.planner import PlannerParams, plan_sequential

logger = logging.getLogger("marsupial.scenario")

CSV_HEADER = ("scenario", "seed", "planner", "p", "q", "c", "tl_m", "et_s", "stage_slice_s",
              "stage_pva_s", "stage_cand_s", "stage_graph_s", "stage_search_s")

PLANNERS = ("maspa", "maspa-minus", "rrt")


@dataclass(frozen=True)
class ScenarioSpec:
    box: Tuple[float, float, float] = (50.0, 50.0, 40.0)
    n_ground: int = 10
    n_aerial: int = 15
    side: float = 5.0
    target_min_z: float = 25.0
    h: float = 1.5
    r: float = 0.5
    L: float = 50.0
    seed: int = 0
    clearance: float = 1.0
    max_attempts: int = 100000

    def __post_init__(self):
        object.__setattr__(self, "box", tuple(float(v) for v in self.box))
        if len(self.box) != 3 or min(self.box) <= 0:
            raise ConfigError("scenario box must hold three positive sizes, got %r" % (self.box,))
        if self.n_ground < 0 or self.n_aerial < 0:
            raise ConfigError("obstacle counts must be non-negative")
        if not self.side > 0:
            raise ConfigError("obstacle side must be positive, got %r" % (self.side,))
        if not self.h < self.target_min_z <= self.box[2]:
            raise ConfigError("target_min_z must lie in (h, box height]")
        if self.n_aerial and self.box[2] - 2 * self.side < self.h:
            raise ConfigError("box too low for aerial obstacles of side %g" % self.side)


def spec_from_dict(doc: dict) -> ScenarioSpec:
    """Builds a :class:`ScenarioSpec`, rejecting unknown fields."""
    if not isinstance(doc, dict):
        raise ConfigError("scenario spec must be an object")
    known = {f.name for f in fields(ScenarioSpec)}
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ConfigError("unknown field(s) in scenario spec: %s" % ", ".join(unknown))
    try:
        return ScenarioSpec(**doc)
    except (TypeError, ValueError) as ex:
        raise ConfigError("invalid scenario spec: %s" % ex)


def _overlaps(lo, hi, placed) -> bool:
    return any(np.all(lo < phi) and np.all(plo < hi) for plo, phi in placed)


def _gap(point, lo, hi) -> float:
    return float(np.linalg.norm(np.maximum(np.maximum(lo - point, point - hi), 0.0)))


def random_scenario(spec: ScenarioSpec) -> Scene:
    """
    Draws a scene from ``spec``: the start near the origin corner, ground
    cubes resting on ``z = 0``, aerial cubes with bases in
    ``[h, height - 2 side]`` and one target with ``z >= target_min_z``.

    :raises GenerationFailed:
        When rejection sampling exceeds ``spec.max_attempts`` draws.
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    bx, by, bz = spec.box
    s = spec.side
    margin = spec.r + spec.clearance
    start = np.array([spec.clearance, spec.clearance, 0.0])
    attempts = 0
    placed = []

    def spend():
        nonlocal attempts
        attempts += 1
        if attempts > spec.max_attempts:
            raise GenerationFailed("gave up after %d attempts" % spec.max_attempts, context="seed %d" % spec.seed)

    for aerial in [False] * spec.n_ground + [True] * spec.n_aerial:
        while True:
            spend()
            z = rng.uniform(spec.h, bz - 2 * s) if aerial else 0.0
            lo = np.array([rng.uniform(0.0, bx - s), rng.uniform(0.0, by - s), z])
            hi = lo + s
            if _overlaps(lo, hi, placed) or _gap(start, lo, hi) <= margin:
                continue
            placed.append((lo, hi))
            break

    while True:
        spend()
        target = np.array([rng.uniform(0.0, bx), rng.uniform(0.0, by), rng.uniform(spec.target_min_z, bz)])
        if all(_gap(target, lo, hi) > margin for lo, hi in placed):
            break

    scene = Scene(
        obstacles=tuple(Cuboid(tuple(lo), tuple(hi)) for lo, hi in placed),
        start=tuple(start),
        targets=(tuple(target),),
        params=MarsupialParams(spec.h, spec.r, spec.L),
        bounds=Cuboid((0.0, 0.0, 0.0), (bx, by, bz)),
    )
    logger.debug("seed %d: scene drawn in %d attempts", spec.seed, attempts)
    return validate_scene(scene)


#---- hand-built scenes

FIREPLACE_BOUNDS = ((0.0, 0.0, 0.0), (40.0, 40.0, 25.0))
FIREPLACE_START = (3.0, 3.0, 0.0)
FIREPLACE_TARGET = (20.0, 20.0, 17.5)
FIREPLACE_L = 30.0
FIREPLACE_BOXES = (
    # side and back walls
    ((14, 14, 0), (15, 26, 10)),
    ((25, 14, 0), (26, 26, 10)),
    ((15, 25, 0), (25, 26, 10)),
    # front wall either side of the door, lintel above it
    ((15, 14, 0), (18, 15, 10)),
    ((22, 14, 0), (25, 15, 10)),
    ((18, 14, 3), (22, 15, 10)),
    # roof around the flue opening x, y in [18, 22]
    ((14, 14, 10), (26, 18, 11)),
    ((14, 22, 10), (26, 26, 11)),
    ((14, 18, 10), (18, 22, 11)),
    ((22, 18, 10), (26, 22, 11)),
    # chimney
    ((17, 17, 11), (18, 23, 16)),
    ((22, 17, 11), (23, 23, 16)),
    ((18, 17, 11), (22, 18, 16)),
    ((18, 22, 11), (22, 23, 16)),
)

BALCONIES_BOUNDS = ((0.0, 0.0, 0.0), (50.0, 50.0, 30.0))
BALCONIES_START = (45.0, 5.0, 0.0)
BALCONIES_TARGETS = ((21.5, 25.0, 10.0), (25.0, 21.5, 16.0))
BALCONIES_L = 40.0
BALCONIES_BOXES = (
    # building x, y in [20, 30], z in [0, 20], recessed on the west face
    # (x < 23, 23 < y < 27, 8 < z < 12) and the south face (23 < x < 27, y < 23, 14 < z < 18)
    ((20, 20, 0), (30, 30, 8)),
    ((23, 20, 8), (30, 30, 12)),
    ((20, 20, 8), (23, 23, 12)),
    ((20, 27, 8), (23, 30, 12)),
    ((20, 20, 12), (30, 30, 14)),
    ((20, 20, 14), (23, 30, 18)),
    ((27, 20, 14), (30, 30, 18)),
    ((23, 23, 14), (27, 30, 18)),
    ((20, 20, 18), (30, 30, 20)),
    # forbidden ground strip around the building
    ((14, 14, 0), (36, 20, 0.1)),
    ((14, 30, 0), (36, 36, 0.1)),
    ((14, 20, 0), (20, 30, 0.1)),
    ((30, 20, 0), (36, 30, 0.1)),
)

REALISTIC = {
    "s1_fireplace": (FIREPLACE_BOUNDS, FIREPLACE_BOXES, FIREPLACE_START, (FIREPLACE_TARGET,), FIREPLACE_L),
    "s2_balconies": (BALCONIES_BOUNDS, BALCONIES_BOXES, BALCONIES_START, BALCONIES_TARGETS, BALCONIES_L),
}


def build_realistic(name: str) -> Scene:
    """
    Returns one of the hand-built scenes, ``s1_fireplace`` or ``s2_balconies``.

    :raises SceneError:
        For an unknown name.
    """
    try:
        bounds, boxes, start, targets, L = REALISTIC[name]
    except KeyError:
        raise SceneError("unknown scenario %r, expected one of %s" % (name, ", ".join(sorted(REALISTIC))))
    return validate_scene(Scene(
        obstacles=tuple(Cuboid(lo, hi) for lo, hi in boxes),
        start=start,
        targets=targets,
        params=MarsupialParams(1.5, 0.5, L),
        bounds=Cuboid(*bounds),
    ))


#---- benchmark

@dataclass
class BenchRecord:
    scenario: str
    seed: int
    planner: str
    p: int
    q: int
    c: int
    tl_m: float = math.nan
    et_s: float = math.nan
    stages: Dict[str, float] = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def row(self) -> Tuple:
        return (self.scenario, self.seed, self.planner, self.p, self.q, self.c, self.tl_m, self.et_s,
                *(self.stages.get(stage, 0.0) for stage in ("slice", "pva", "cand", "graph", "search")))


def rrt_sequential(scene: Scene, params: RrtParams):
    plans = []
    for index in range(len(scene.targets)):
        plan = rrt_star_plan(scene, index, params)
        plans.append(plan)
        scene = replace(scene, start=plan.X)
    return plans


def _run_cell(cell) -> BenchRecord:
    scenario, seed, scene, planner, p, q, c, mode, rrt = cell
    record = BenchRecord(scenario, seed, planner, p, q, c)
    try:
        if planner == "rrt":
            plans = rrt_sequential(scene, replace(rrt, seed=seed, c=c))
        else:
            params = PlannerParams(p=p, q=q, c=c, mode=mode, use_pva=planner == "maspa")
            plans = plan_sequential(scene, params, threads=1)
    except MarsupialError as ex:
        record.error = str(ex)
        logger.warning("%s seed %d %s p=%d q=%d failed: %s", scenario, seed, planner, p, q, ex)
        return record
    record.tl_m = sum(plan.total_length for plan in plans)
    for plan in plans:
        for stage, seconds in plan.timings.items():
            record.stages[stage] = record.stages.get(stage, 0.0) + seconds
    record.et_s = sum(record.stages.values())
    return record


def benchmark_grid(seeds: Sequence[int], p_set: Sequence[int], q_set: Sequence[int],
                   planners: Sequence[str] = ("maspa",), spec: Optional[ScenarioSpec] = None,
                   realistic: Optional[str] = None, c: int = 26, mode: str = "catenary",
                   rrt: Optional[RrtParams] = None, threads: Optional[int] = None) -> List[BenchRecord]:
    """
    Runs every planner on every ``(p, q)`` cell of every seeded scene.

    :param realistic:
        Name of a hand-built scene to use instead of random ones; the seed
        then only drives the sampling planner.
    :return:
        Records sorted by scenario, seed, planner, ``p`` and ``q``; failed
        cells carry their error message.
    """
    if not (seeds and p_set and q_set and planners):
        raise ConfigError("benchmark needs non-empty seeds, p_set, q_set and planners")
    unknown = sorted(set(planners) - set(PLANNERS))
    if unknown:
        raise ConfigError("unknown planner(s): %s" % ", ".join(unknown))
    spec = spec or ScenarioSpec()
    rrt = rrt or RrtParams()
    cells = []
    for seed in seeds:
        try:
            if realistic:
                scenario, scene = realistic, build_realistic(realistic)
            else:
                scenario, scene = "random", random_scenario(replace(spec, seed=seed))
        except GenerationFailed as ex:
            logger.warning("seed %d skipped: %s", seed, ex)
            continue
        for planner in planners:
            for p in p_set:
                for q in q_set:
                    cells.append((scenario, seed, scene, planner, p, q, c, mode, rrt))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        records = list(pool.map(_run_cell, cells))
    records.sort(key=lambda r: (r.scenario, r.seed, r.planner, r.p, r.q))
    logger.info("benchmark: %d cells, %d failed", len(records), sum(not r.ok for r in records))
    return records


def write_csv(records: Sequence[BenchRecord], stream):
    """Writes the header and one row per successful record."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for record in records:
        if record.ok:
            writer.writerow(record.row())


def aggregate(records: Sequence[BenchRecord]):
    """
    Mean and standard deviation of ``tl_m`` and ``et_s`` per
    ``(planner, p, q)`` over the successful records.

    :return:
        Rows ``(planner, p, q, n, tl_mean, tl_std, et_mean, et_std)``.
    """
    groups = {}
    for record in records:
        if record.ok:
            groups.setdefault((record.planner, record.p, record.q), []).append(record)
    rows = []
    for key in sorted(groups):
        tl = np.array([r.tl_m for r in groups[key]])
        et = np.array([r.et_s for r in groups[key]])
        rows.append(key + (len(tl), float(tl.mean()), float(tl.std()), float(et.mean()), float(et.std())))
    return rows
