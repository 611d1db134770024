#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Cross-checks of the fast planners against the exhaustive oracles."""

import math
import sys
import unittest

import testsupport
from testsupport import TAKE_OFF_Z, WALL_L, support_rect, wall_plane
from marsupial.catenary import min_catenary
from marsupial.errors import Unreachable
from marsupial.geometry import Cuboid, PlanarScene, Rect2, Scene
from marsupial.oracle import _curve_points, _points_clear, oracle_c_visible, oracle_p_visible, oracle_plan
from marsupial.planner import PlannerParams, maspa_plan
from marsupial.pva2d import min_taut_chain, pva2d, support_lengths


def _with_ground_obstacles(rng):
    """A random half-plane plus rectangles standing on the ground across the take-off line."""
    plane, L = testsupport.random_plane(rng, n_rects=4)
    rects = list(plane.rects)
    for _ in range(int(rng.integers(1, 3))):
        for _ in range(100):
            d0 = float(rng.uniform(1.0, 15.0))
            d1 = d0 + float(rng.uniform(0.5, 3.0))
            z0 = float(rng.uniform(-0.5, TAKE_OFF_Z - 0.1))
            z1 = float(rng.uniform(TAKE_OFF_Z + 0.1, 4.0))
            if not any(d0 < r.d_max and r.d_min < d1 and z0 < r.z_max and r.z_min < z1 for r in rects):
                rects.append(support_rect(d0, d1, z0, z1))
                break
    return PlanarScene(tuple(rects), plane.target_2d, TAKE_OFF_Z), L



#----- test cases

class TautOracleTestCase(unittest.TestCase):
    def test_wall_examples(self):
        visible, length = oracle_p_visible((10.0, TAKE_OFF_Z), wall_plane(), WALL_L)
        self.assertTrue(visible)
        self.assertAlmostEqual(length, math.sqrt(37.0) + math.sqrt(80.0))
        self.assertEqual(oracle_p_visible((16.0, TAKE_OFF_Z), wall_plane(), WALL_L), (False, None))

    def test_intervals_match_the_oracle(self):
        rng = testsupport.rng(31)
        for _ in range(25):
            plane, L = testsupport.random_plane(rng, n_rects=5)
            intervals = pva2d(plane, L)
            for d in rng.uniform(0.0, 26.0, 60):
                expected = testsupport.inside(float(d), intervals.visible)
                if expected is None:
                    continue
                visible, _ = oracle_p_visible((float(d), TAKE_OFF_Z), plane, L)
                self.assertEqual(visible, expected, "d=%r, rects=%r, L=%r" % (d, plane.rects, L))

    def test_chain_length_matches_the_oracle(self):
        rng = testsupport.rng(32)
        for _ in range(15):
            plane, L = testsupport.random_plane(rng, n_rects=5)
            table = support_lengths(plane, L)
            for d in rng.uniform(0.0, 20.0, 20):
                chain = min_taut_chain((float(d), TAKE_OFF_Z), plane, table, L)
                visible, length = oracle_p_visible((float(d), TAKE_OFF_Z), plane, L)
                if chain is None:
                    continue
                self.assertTrue(visible)
                self.assertAlmostEqual(chain.length, length, delta=1e-6)

    def test_hidden_points_have_no_catenary(self):
        rng = testsupport.rng(33)
        for _ in range(15):
            plane, L = testsupport.random_plane(rng, n_rects=5)
            intervals = pva2d(plane, L)
            for d in rng.uniform(0.0, intervals.q_reach or 0.0, 20):
                if testsupport.inside(float(d), intervals.visible) is not False:
                    continue
                Y = (float(d), TAKE_OFF_Z)
                self.assertIsNone(min_catenary(Y, plane.target_2d, L, 20, plane))

    def test_ground_obstacles_hide_points_from_catenaries_too(self):
        rng = testsupport.rng(35)
        for _ in range(25):
            plane, L = _with_ground_obstacles(rng)
            intervals = pva2d(plane, L)
            for d in rng.uniform(0.0, intervals.q_reach or 0.0, 20):
                if testsupport.inside(float(d), intervals.visible) is not False:
                    continue
                if any(r.d_min - 1e-6 <= d <= r.d_max + 1e-6 for r in plane.rects if r.blocks_ugv):
                    continue
                Y = (float(d), TAKE_OFF_Z)
                self.assertIsNone(min_catenary(Y, plane.target_2d, L, 20, plane, floor=TAKE_OFF_Z),
                                  "d=%r, rects=%r, L=%r" % (d, plane.rects, L))
                self.assertFalse(oracle_c_visible(Y, plane.target_2d, L, plane.rects, floor=TAKE_OFF_Z))


class CatenaryOracleTestCase(unittest.TestCase):
    def test_sag_under_a_ground_obstacle(self):
        rect = support_rect(13.55, 15.4, 0.72, 2.04)
        Y, T, L = (16.33, TAKE_OFF_Z), (0.0, 11.86), 23.67
        self.assertTrue(oracle_c_visible(Y, T, L, [rect]))
        self.assertFalse(oracle_c_visible(Y, T, L, [rect], floor=TAKE_OFF_Z))
        plane = PlanarScene((rect,), T, TAKE_OFF_Z)
        self.assertIsNone(min_catenary(Y, T, L, 26, plane, floor=TAKE_OFF_Z))
        self.assertFalse(pva2d(plane, L).contains(Y[0]))

    def test_full_height_wall(self):
        rects = [Rect2(4, 5, -30, 25)]
        self.assertFalse(oracle_c_visible((10.0, TAKE_OFF_Z), (0.0, 10.0), WALL_L, rects))
        self.assertTrue(oracle_c_visible((3.0, TAKE_OFF_Z), (0.0, 10.0), WALL_L, rects))

    def test_agrees_with_the_scan(self):
        rng = testsupport.rng(34)
        for _ in range(10):
            plane, L = testsupport.random_plane(rng, n_rects=4)
            for d in rng.uniform(0.0, 20.0, 10):
                Y = (float(d), TAKE_OFF_Z)
                found = min_catenary(Y, plane.target_2d, L, 26, plane)
                if found is not None:
                    points = _curve_points(Y, plane.target_2d, found.arc_length)
                    self.assertTrue(_points_clear(points, plane.rects))


class PlanOracleTestCase(unittest.TestCase):
    def test_open_ground(self):
        scene = testsupport.open_scene()
        scene = Scene(scene.obstacles, scene.start, scene.targets, scene.params,
                      Cuboid((0.0, 15.0, 0.0), (30.0, 35.0, 40.0)))
        self.assertAlmostEqual(oracle_plan(scene, grid_step=1.0), testsupport.OPEN_TL, places=9)

    def test_out_of_reach(self):
        scene = testsupport.open_scene(L=20.0)
        self.assertRaises(Unreachable, oracle_plan, scene, 0, 2.0)

    def test_hanging_block(self):
        scene = testsupport.hanging_block_scene()
        fine = oracle_plan(scene, grid_step=0.5, mode="taut")
        plan = maspa_plan(scene, 0, PlannerParams(p=16, q=30, mode="taut"), threads=1)
        self.assertLessEqual(abs(plan.total_length - fine), 0.02 * fine)



#---- mainline

def suite():
    """Return a unittest.TestSuite to be used by test.py."""
    loader = unittest.TestLoader()
    return unittest.TestSuite([
        loader.loadTestsFromTestCase(TautOracleTestCase),
        loader.loadTestsFromTestCase(CatenaryOracleTestCase),
        loader.loadTestsFromTestCase(PlanOracleTestCase),
    ])

if __name__ == "__main__":
    runner = unittest.TextTestRunner(sys.stdout, verbosity=2)
    result = runner.run(suite())
