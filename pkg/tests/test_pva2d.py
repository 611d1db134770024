#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Test cases for the exact visibility computation in one half-plane."""

import math
import sys
import unittest

import testsupport
from testsupport import BOX_L, TAKE_OFF_Z, WALL_B, WALL_D_Q, WALL_L, box_plane, empty_plane, support_rect, wall_plane
from marsupial.geometry import PlanarScene, PlaneFrame
from marsupial.pva2d import (Chain, VisIntervals, assemble, critical_vertices, intervals_to_rows, left_endpoints,
                             min_taut_chain, pva2d, reach, right_endpoints, support_lengths)


def _crossing(a, b, c, d, tol=1e-9):
    """True when segments ``ab`` and ``cd`` cross at a point interior to both."""
    def side(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    return (side(a, b, c) * side(a, b, d) < -tol) and (side(c, d, a) * side(c, d, b) < -tol)



#----- test cases

class WallTestCase(unittest.TestCase):
    """T = (0, 10), wall d in [4, 5], z in [2, 25], L = 20."""

    def setUp(self):
        self.plane = wall_plane()
        self.table = support_lengths(self.plane, WALL_L)

    def test_support_order(self):
        supports, uppers = critical_vertices(self.plane)
        self.assertEqual([v.pos for v in supports], [(0.0, 10.0), (4, 2), (5, 2)])
        self.assertEqual([v.pos for v in uppers], [(5, 25)])

    def test_support_lengths(self):
        self.assertEqual(self.table.lengths[0], 0.0)
        self.assertAlmostEqual(self.table.lengths[1], math.sqrt(80.0))
        self.assertEqual(self.table.hooks[1], 0)
        self.assertAlmostEqual(self.table.lengths[2], 1.0 + math.sqrt(80.0))
        self.assertEqual(self.table.hooks[2], 1)

    def test_no_left_endpoints(self):
        A, U = left_endpoints(self.plane, self.table, WALL_L)
        self.assertEqual(A, [None])
        self.assertEqual(U, [None])

    def test_right_endpoint(self):
        B = right_endpoints(self.plane, self.table, WALL_L)
        self.assertIsNone(B[0])
        self.assertAlmostEqual(B[1], WALL_B, places=9)
        self.assertAlmostEqual(B[1], 15.0104, places=4)
        self.assertIsNone(B[2])

    def test_visible_intervals(self):
        intervals = pva2d(self.plane, WALL_L)
        self.assertAlmostEqual(intervals.q_reach, WALL_D_Q)
        self.assertEqual(len(intervals.visible), 1)
        lo, hi = intervals.visible[0]
        self.assertEqual(lo, 0.0)
        self.assertAlmostEqual(hi, WALL_B, places=9)

    def test_chain_below_the_wall(self):
        chain = min_taut_chain((10.0, TAKE_OFF_Z), self.plane, self.table, WALL_L)
        self.assertEqual(chain.vertices, ((10.0, 1.0), (4.0, 2.0), (0.0, 10.0)))
        self.assertAlmostEqual(chain.length, math.sqrt(37.0) + math.sqrt(80.0))
        self.assertAlmostEqual(chain.length, 15.027, places=3)
        self.assertEqual(chain.violations(self.plane), [])

    def test_beyond_the_right_endpoint(self):
        self.assertIsNone(min_taut_chain((16.0, TAKE_OFF_Z), self.plane, self.table, WALL_L))


class BoxTestCase(unittest.TestCase):
    """T = (0, 10), box d in [4, 6], z in [4, 6], L = 20."""

    def setUp(self):
        self.plane = box_plane()
        self.table = support_lengths(self.plane, BOX_L)

    def test_left_endpoint_on_the_grazing_line(self):
        A, U = left_endpoints(self.plane, self.table, BOX_L)
        self.assertEqual(U, [0])
        self.assertAlmostEqual(A[0], 13.5)

    def test_right_endpoints_are_discarded(self):
        B = right_endpoints(self.plane, self.table, BOX_L)
        self.assertEqual(B, [None, None, None])

    def test_everything_is_visible(self):
        intervals = pva2d(self.plane, BOX_L)
        self.assertEqual(len(intervals.visible), 1)
        lo, hi = intervals.visible[0]
        self.assertEqual(lo, 0.0)
        self.assertAlmostEqual(hi, math.sqrt(319.0))

    def test_chain_under_the_box(self):
        chain = min_taut_chain((10.0, TAKE_OFF_Z), self.plane, self.table, BOX_L)
        self.assertEqual(chain.vertices[1:], ((4.0, 4.0), (0.0, 10.0)))
        self.assertEqual(chain.violations(self.plane), [])


class DegenerateTestCase(unittest.TestCase):
    def test_free_half_plane(self):
        intervals = pva2d(empty_plane(), 20.0)
        self.assertEqual(intervals.visible, ((0.0, math.sqrt(319.0)),))

    def test_tether_too_short(self):
        self.assertIsNone(reach(empty_plane(), 5.0))
        self.assertEqual(pva2d(empty_plane(), 5.0), VisIntervals((), None))

    def test_exact_reach(self):
        intervals = pva2d(empty_plane(), 9.0)
        self.assertEqual(intervals.q_reach, 0.0)

    def test_central_rectangle(self):
        rect = support_rect(0, 3, 0, 5, central=True)
        plane = PlanarScene((rect,), (0.0, 10.0), TAKE_OFF_Z)
        intervals = pva2d(plane, 20.0)
        self.assertEqual(len(intervals.visible), 1)
        lo, hi = intervals.visible[0]
        self.assertAlmostEqual(lo, 5.4)
        self.assertAlmostEqual(hi, math.sqrt(319.0))


class AssembleTestCase(unittest.TestCase):
    def test_pairing_rules(self):
        self.assertEqual(assemble([], [], 10.0).visible, ((0.0, 10.0),))
        # leading B pairs with Q
        self.assertEqual(assemble([], [6.0], 10.0).visible, ((0.0, 6.0),))
        # A then B bounds a hidden interval
        self.assertEqual(assemble([8.0], [3.0], 10.0).visible, ((0.0, 3.0), (8.0, 10.0)))
        # trailing A is unpaired
        self.assertEqual(assemble([4.0], [], 10.0).visible, ((0.0, 10.0),))

    def test_query_splits_at_extra_cuts(self):
        intervals = assemble([], [], 10.0, query=lambda d: not 2.0 < d < 5.0, extra=(2.0, 5.0))
        self.assertEqual(intervals.visible, ((0.0, 2.0), (5.0, 10.0)))
        self.assertEqual(intervals.non_visible(), ((2.0, 5.0),))

    def test_contains(self):
        intervals = VisIntervals(((0.0, 2.0), (5.0, 7.0)), 9.0)
        self.assertTrue(intervals.contains(0.0))
        self.assertTrue(intervals.contains(7.0))
        self.assertFalse(intervals.contains(8.0))
        self.assertTrue(intervals.contains(7.0 + 1e-12, tol=1e-9))
        self.assertAlmostEqual(intervals.total_length, 4.0)

    def test_rows(self):
        frame = PlaneFrame(1.0, (0.0, 0.0), (0.0, 10.0), plane_index=1, side=1)
        rows = intervals_to_rows(frame, VisIntervals(((0.0, 2.0),), 9.0))
        self.assertEqual(rows, [(1.0, 1, 0.0, 2.0)])


class PropertyTestCase(unittest.TestCase):
    """Invariants over random half-planes of aerial rectangles."""

    def test_chains_are_valid(self):
        rng = testsupport.rng(21)
        for _ in range(30):
            plane, L = testsupport.random_plane(rng)
            table = support_lengths(plane, L)
            for d in rng.uniform(0.0, 25.0, 20):
                chain = min_taut_chain((float(d), TAKE_OFF_Z), plane, table, L)
                if chain is None:
                    continue
                self.assertEqual(chain.violations(plane), [])
                self.assertLessEqual(chain.length, L + 1e-9)
                self.assertEqual(chain.vertices[-1], plane.target_2d)

    def test_intervals_are_sorted_and_disjoint(self):
        rng = testsupport.rng(22)
        for _ in range(30):
            plane, L = testsupport.random_plane(rng)
            intervals = pva2d(plane, L)
            ends = [x for interval in intervals.visible for x in interval]
            self.assertEqual(ends, sorted(ends))
            for lo, hi in intervals.visible:
                self.assertGreaterEqual(lo, 0.0)
                self.assertLessEqual(hi, intervals.q_reach + 1e-9)

    def test_right_endpoints_use_the_whole_tether(self):
        rng = testsupport.rng(23)
        for _ in range(30):
            plane, L = testsupport.random_plane(rng)
            table = support_lengths(plane, L)
            for j, b in enumerate(right_endpoints(plane, table, L)):
                if b is None:
                    continue
                chain = min_taut_chain((b, TAKE_OFF_Z), plane, table, L)
                self.assertIsNotNone(chain)
                self.assertAlmostEqual(chain.length, L, delta=1e-6)

    def test_longer_tether_sees_more(self):
        rng = testsupport.rng(24)
        for _ in range(20):
            plane, L = testsupport.random_plane(rng)
            short, long = pva2d(plane, L), pva2d(plane, L + 3.0)
            for d in rng.uniform(0.0, 25.0, 30):
                if testsupport.inside(float(d), short.visible):
                    self.assertTrue(long.contains(float(d), tol=1e-6))

    def test_removing_a_rectangle_sees_more(self):
        rng = testsupport.rng(25)
        for _ in range(20):
            plane, L = testsupport.random_plane(rng)
            if not plane.rects:
                continue
            before, after = pva2d(plane, L), pva2d(plane.without(0), L)
            for d in rng.uniform(0.0, 25.0, 30):
                if testsupport.inside(float(d), before.visible):
                    self.assertTrue(after.contains(float(d), tol=1e-6))

    def test_chains_do_not_cross(self):
        rng = testsupport.rng(27)
        for _ in range(20):
            plane, L = testsupport.random_plane(rng, n_rects=5)
            table = support_lengths(plane, L)
            chains = [min_taut_chain((float(d), TAKE_OFF_Z), plane, table, L) for d in rng.uniform(0.0, 25.0, 12)]
            chains = [c.vertices for c in chains if c is not None]
            for i, one in enumerate(chains):
                for two in chains[i + 1:]:
                    shared = [v for v in one[1:] if v in two[1:]]
                    # once two chains meet they run together up to T
                    if shared:
                        self.assertEqual(one[one.index(shared[0]):], two[two.index(shared[0]):])
                    for a, b in zip(one, one[1:]):
                        for c, d in zip(two, two[1:]):
                            self.assertFalse(_crossing(a, b, c, d), (one, two))

    def test_deterministic(self):
        plane, L = testsupport.random_plane(testsupport.rng(26))
        self.assertEqual(pva2d(plane, L), pva2d(plane, L))

    def test_chain_through(self):
        chain = Chain.through([(3, 0), (0, 4)])
        self.assertEqual(chain.length, 5.0)
        self.assertEqual(Chain(((3.0, 0.0), (0.0, 4.0)), 6.0).violations(empty_plane()),
                         ["stored length 6 differs from edge sum"])



#---- mainline

def suite():
    """Return a unittest.TestSuite to be used by test.py."""
    loader = unittest.TestLoader()
    return unittest.TestSuite([
        loader.loadTestsFromTestCase(WallTestCase),
        loader.loadTestsFromTestCase(BoxTestCase),
        loader.loadTestsFromTestCase(DegenerateTestCase),
        loader.loadTestsFromTestCase(AssembleTestCase),
        loader.loadTestsFromTestCase(PropertyTestCase),
    ])

if __name__ == "__main__":
    runner = unittest.TextTestRunner(sys.stdout, verbosity=2)
    result = runner.run(suite())
