#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Test cases for the ground graph and the end-to-end planner."""

import json
import math
import sys
import unittest
from dataclasses import replace

import networkx as nx
import numpy as np

import testsupport
from testsupport import OPEN_TL, open_scene, wall_scene
from marsupial.errors import ConfigError, NoCandidates, Unreachable
from marsupial.geometry import Cuboid, MarsupialParams, Point3, Scene
from marsupial.planner import (GroundGraph, PlannerParams, PlanResult, build_ground_graph, ground_skeleton,
                               maspa_plan, plan_document, plan_sequential, shortest_path, validate_document,
                               validate_plan)
from marsupial.pva3d import CATENARY, TAUT, _candidate, _spread, pva3d, sample_candidates


def _relax(graph, source, sink):
    """Plain Bellman-Ford relaxation."""
    dist = {n: math.inf for n in graph.nodes}
    dist[source] = 0.0
    for _ in range(len(dist)):
        changed = False
        for a, b, w in graph.edges(data="weight"):
            for u, v in ((a, b), (b, a)):
                if dist[u] + w < dist[v]:
                    dist[v] = dist[u] + w
                    changed = True
        if not changed:
            break
    return dist[sink]


def _two_rooms():
    """A blocking wall with one gap splits the ground; the target sits over the far room."""
    return Scene(
        obstacles=(Cuboid((20.0, 0.0, 0.0), (21.0, 18.0, 5.0)), Cuboid((20.0, 22.0, 0.0), (21.0, 40.0, 5.0))),
        start=(5.0, 5.0, 0.0),
        targets=((35.0, 5.0, 12.0), (35.0, 35.0, 12.0)),
        params=MarsupialParams(1.5, 0.5, 14.0),
        bounds=Cuboid((0.0, 0.0, 0.0), (40.0, 40.0, 20.0)),
    )



#----- test cases

class ParamsTestCase(unittest.TestCase):
    def test_defaults(self):
        params = PlannerParams()
        self.assertEqual((params.p, params.q, params.c, params.mode), (16, 30, 26, "catenary"))
        self.assertEqual(params.planner_id, "maspa")
        self.assertEqual(replace(params, use_pva=False).planner_id, "maspa-minus")

    def test_invalid(self):
        self.assertRaises(ConfigError, PlannerParams, p=0)
        self.assertRaises(ConfigError, PlannerParams, refine=-1)
        self.assertEqual(PlannerParams(refine=0).refine, 0)
        self.assertRaises(ConfigError, PlannerParams, q=2.5)
        self.assertRaises(ConfigError, PlannerParams, mode="slack")


class GroundGraphTestCase(unittest.TestCase):
    def test_needs_candidates(self):
        self.assertRaises(NoCandidates, build_ground_graph, open_scene(), (5.0, 25.0), [])

    def test_vertex_count(self):
        scene = _two_rooms()
        halves = pva3d(scene, scene.targets[0], 4, threads=1)
        cands = sample_candidates(halves, scene, 5, TAUT)
        ground = build_ground_graph(scene, (5.0, 5.0), cands)
        skeleton = ground_skeleton(scene)
        self.assertEqual(ground.graph.number_of_nodes(), 1 + len(skeleton.corners) + len(cands) + 1)
        self.assertLessEqual(len(skeleton.corners), 4 * 2)
        self.assertEqual(ground.sink, len(ground.points))
        self.assertIs(ground.candidate_at(ground.candidate_node(0)), cands[0])
        self.assertIsNone(ground.candidate_at(0))

    def test_dijkstra_matches_relaxation(self):
        rng = testsupport.rng(41)
        for _ in range(40):
            n = int(rng.integers(3, 30))
            graph = nx.gnp_random_graph(n + 1, 0.2, seed=int(rng.integers(1 << 30)))
            for a, b in graph.edges:
                graph[a][b]["weight"] = float(rng.uniform(0.1, 10.0))
            ground = GroundGraph(graph, np.zeros((n, 2)), [], 0)
            expected = _relax(graph, ground.source, ground.sink)
            if math.isinf(expected):
                self.assertRaises(Unreachable, shortest_path, ground)
            else:
                path, length = shortest_path(ground)
                self.assertAlmostEqual(length, expected, places=9)
                self.assertEqual(path[0], 0)
                self.assertEqual(path[-1], n)

    def test_candidates_are_not_linked_to_each_other(self):
        scene = _two_rooms()
        halves = pva3d(scene, scene.targets[0], 4, threads=1)
        cands = sample_candidates(halves, scene, 10, TAUT)
        ground = build_ground_graph(scene, (5.0, 5.0), cands)
        first = ground.candidate_node(0)
        for a, b in ground.graph.edges:
            self.assertFalse(first <= a < ground.sink and first <= b < ground.sink, (a, b))
        self.assertTrue(all(ground.graph.has_edge(ground.candidate_node(k), ground.sink) for k in range(len(cands))))

    def test_equal_paths_pick_the_smallest_keys(self):
        graph = nx.Graph()
        for a, b in ((0, 3), (3, 4), (0, 2), (2, 4), (0, 1), (1, 4)):
            graph.add_edge(a, b, weight=1.0)
        ground = GroundGraph(graph, np.zeros((4, 2)), [], 0)
        for _ in range(3):
            self.assertEqual(shortest_path(ground), ([0, 1, 4], 2.0))


class PlanTestCase(unittest.TestCase):
    def test_open_scene(self):
        scene = open_scene()
        plan = maspa_plan(scene, 0, PlannerParams(p=16, q=30), threads=1)
        self.assertGreaterEqual(plan.total_length, OPEN_TL - 1e-9)
        spacing = math.sqrt(50.0 ** 2 - 25.0 ** 2) / 29
        self.assertLessEqual(plan.total_length, OPEN_TL + spacing)
        self.assertEqual(validate_plan(scene, plan), [])
        self.assertEqual(plan.ground_path[0], scene.start)
        self.assertEqual(set(plan.timings), {"slice", "pva", "cand", "graph", "search"})
        self.assertEqual(plan.metadata["half_planes"], 32)

    def test_taut_mode(self):
        scene = wall_scene()
        plan = maspa_plan(scene, 0, PlannerParams(p=8, q=20, mode="taut"), threads=1)
        self.assertEqual(validate_plan(scene, plan), [])
        self.assertAlmostEqual(plan.aerial_length, sum(math.dist(a, b) for a, b in zip(plan.aerial_path,
                                                                                        plan.aerial_path[1:])))

    def test_wall_takeoff_is_inside_the_band(self):
        scene = wall_scene()
        plan = maspa_plan(scene, 0, PlannerParams(p=8, q=30), threads=1)
        self.assertEqual(validate_plan(scene, plan), [])
        b = 3.75 + math.sqrt((20.0 - math.hypot(3.75, 8.0)) ** 2 - 1.0)
        self.assertLessEqual(math.hypot(plan.X.x, plan.X.y), b + 1e-9)
        self.assertAlmostEqual(plan.total_length, plan.ground_length + plan.aerial_length)

    def test_unreachable(self):
        scene = open_scene(L=20.0)
        try:
            maspa_plan(scene, 0, PlannerParams(p=4, q=5), threads=1)
        except Unreachable as ex:
            self.assertEqual(ex.target_index, 0)
        else:
            self.fail("planner reached a target above the tether length")

    def test_without_visibility_filtering(self):
        scene = wall_scene()
        with_pva = maspa_plan(scene, 0, PlannerParams(p=8, q=30), threads=1)
        without = maspa_plan(scene, 0, PlannerParams(p=8, q=30, use_pva=False), threads=1)
        self.assertEqual(without.planner, "maspa-minus")
        self.assertEqual(validate_plan(scene, without), [])
        self.assertEqual(without.metadata["half_planes"], with_pva.metadata["half_planes"])

    def test_refinement_never_hurts(self):
        scene = open_scene()
        coarse = maspa_plan(scene, 0, PlannerParams(p=4, q=10, refine=0), threads=1)
        fine = maspa_plan(scene, 0, PlannerParams(p=8, q=19, refine=0), threads=1)
        self.assertLessEqual(fine.total_length, coarse.total_length + 1e-9)

    def test_deterministic(self):
        scene = _two_rooms()
        one = maspa_plan(scene, 0, PlannerParams(p=8, q=20), threads=1)
        two = maspa_plan(scene, 0, PlannerParams(p=8, q=20), threads=4)
        self.assertEqual(one.ground_path, two.ground_path)
        self.assertEqual(one.total_length, two.total_length)
        self.assertEqual(one.metadata["refined_half_planes"], 8)

    def test_refinement_adds_half_planes_around_the_winner(self):
        scene = wall_scene()
        beam = maspa_plan(scene, 0, PlannerParams(p=4, q=20, refine=0), threads=1)
        refined = maspa_plan(scene, 0, PlannerParams(p=4, q=20, refine=3), threads=1)
        self.assertEqual(validate_plan(scene, refined), [])
        self.assertLessEqual(refined.total_length, beam.total_length + 1e-9)
        self.assertGreater(refined.metadata["candidates"], beam.metadata["candidates"])
        self.assertEqual(set(refined.timings), set(beam.timings))

    def test_same_grid_with_and_without_visibility(self):
        # on the d grid of the visible intervals the catenary scans agree, so do the plans
        for scene in (wall_scene(), _two_rooms()):
            halves = pva3d(scene, scene.targets[0], 4, threads=1)
            with_pva, without = [], []
            for half in halves:
                for d in _spread(half.intervals.visible, 10):
                    one = _candidate(scene, half.scene, half.table, float(d), CATENARY, 26)
                    two = _candidate(scene, half.scene, None, float(d), CATENARY, 26)
                    self.assertEqual(one is None, two is None, d)
                    if one is not None:
                        self.assertEqual(one.aerial_length, two.aerial_length)
                        with_pva.append(one)
                        without.append(two)
            _, one = shortest_path(build_ground_graph(scene, scene.start, with_pva))
            _, two = shortest_path(build_ground_graph(scene, scene.start, without))
            self.assertEqual(one, two)

    def test_sequential_targets(self):
        scene = _two_rooms()
        plans = plan_sequential(scene, PlannerParams(p=8, q=20), threads=1)
        self.assertEqual(len(plans), 2)
        self.assertEqual(validate_plan(scene, plans[0]), [])
        self.assertEqual(validate_plan(scene, plans[1], start=plans[0].X), [])
        self.assertEqual(plans[1].ground_path[0], plans[0].X)

    def test_ground_detour_through_the_gap(self):
        scene = _two_rooms()
        plan = maspa_plan(scene, 0, PlannerParams(p=8, q=20), threads=1)
        # the inflated walls leave a gap at y in [18.5, 21.5]
        self.assertTrue(any(17.0 <= p.y <= 23.0 and 19.0 <= p.x <= 22.0 for p in plan.ground_path))


class DocumentTestCase(unittest.TestCase):
    def test_round_trip_and_validate(self):
        scene = _two_rooms()
        plans = plan_sequential(scene, PlannerParams(p=4, q=10), threads=1)
        doc = json.loads(json.dumps(plan_document(scene, plans, PlannerParams(p=4, q=10))))
        self.assertFalse(doc["retrace_included"])
        self.assertAlmostEqual(doc["tl_m"], sum(p.total_length for p in plans))
        self.assertEqual(validate_document(doc), [])
        again = PlanResult.from_dict(doc["plans"][0])
        self.assertEqual(again.ground_path, plans[0].ground_path)

    def test_tampered_plan_is_caught(self):
        scene = open_scene()
        plan = maspa_plan(scene, 0, PlannerParams(p=4, q=10), threads=1)
        plan.total_length += 1.0
        plan.ground_path = (Point3(0.0, 0.0, 0.0),) + plan.ground_path
        problems = validate_plan(scene, plan)
        self.assertTrue(any("starts at" in p for p in problems))
        self.assertTrue(any("total length" in p for p in problems))

    def test_sagging_catenary_is_caught(self):
        scene = open_scene()
        plan = maspa_plan(scene, 0, PlannerParams(p=4, q=10), threads=1)
        self.assertEqual(validate_plan(scene, plan), [])
        plan.aerial_length = scene.params.L
        plan.total_length = plan.ground_length + plan.aerial_length
        problems = validate_plan(scene, plan)
        self.assertTrue(any("below the take-off line" in p for p in problems), problems)



#---- mainline

def suite():
    """Return a unittest.TestSuite to be used by test.py."""
    loader = unittest.TestLoader()
    return unittest.TestSuite([
        loader.loadTestsFromTestCase(ParamsTestCase),
        loader.loadTestsFromTestCase(GroundGraphTestCase),
        loader.loadTestsFromTestCase(PlanTestCase),
        loader.loadTestsFromTestCase(DocumentTestCase),
    ])

if __name__ == "__main__":
    runner = unittest.TextTestRunner(sys.stdout, verbosity=2)
    result = runner.run(suite())
