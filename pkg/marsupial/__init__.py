# -*- coding: utf-8 -*-
#
# Copyright (C) 2024 The marsupial authors.
# License: MIT License (http://www.opensource.org/licenses/mit-license.php)

"""\
Marsupial: path planning for a ground robot carrying a tethered drone.

Module Usage:
    from marsupial import load_scene, maspa_plan, PlannerParams
    scene = load_scene("scene.json")
    plan = maspa_plan(scene, 0, PlannerParams(p=16, q=30, c=26))

The ground robot (UGV) drives from its start to a take-off point, the
drone (UAV) flies from there to the target while tethered to the UGV.
Obstacles are axis-aligned cuboids.  Take-off points are searched on a
beam of vertical planes through each target, where the exact set of
points admitting a taut tether of length at most ``L`` is computed per
half-plane; a visibility graph on the ground then joins the start to the
best of them.


Scene files
-----------

    {
      "bounds":    {"min": [0, 0, 0], "max": [50, 50, 40]},
      "obstacles": [{"min": [10, 10, 0], "max": [15, 15, 5]}],
      "start":     [1, 1],
      "targets":   [[30, 30, 30]],
      "params":    {"h": 1.5, "r": 0.5, "L": 50}
    }

Unknown or missing fields are rejected.


Command line
------------

    marsupial plan scene.json --out plan.json
    marsupial gen --seed 7 --out scene.json
    marsupial bench --seeds 0..9 --p-set 4,8,16 --q-set 10,30 --out results.csv
    marsupial rrt scene.json --budget 20 --seed 1
    marsupial export plan.json --svg top.svg --view top
"""

import logging

__version_info__ = (1, 0, 0)
__version__ = '.'.join(map(str, __version_info__))

logger = logging.getLogger("marsupial")

from marsupial.errors import (ConfigError, GenerationFailed, MarsupialError, NoCandidates,  # noqa: E402
                              SceneError, ShorterThanChord, Unreachable, VerticalAnchors)
from marsupial.geometry import (Cuboid, MarsupialParams, PlanarScene, PlaneFrame, Rect2, Scene,  # noqa: E402
                                inflate, load_scene, scene_from_dict, scene_to_dict, slice_scene,
                                validate_scene)
from marsupial.catenary import (Catenary, catenary_clear, lowest_point, min_catenary_length,  # noqa: E402
                                solve_catenary)
from marsupial.pva2d import Chain, VisIntervals, min_taut_chain, pva2d, support_lengths  # noqa: E402
from marsupial.pva3d import CandidateTakeoff, plane_beam, pva3d, sample_candidates  # noqa: E402
from marsupial.planner import (PlannerParams, PlanResult, build_ground_graph, maspa_plan,  # noqa: E402
                               plan_sequential, shortest_path, validate_plan)
from marsupial.baseline import RrtParams, rrt_star_plan  # noqa: E402
from marsupial.scenario import ScenarioSpec, benchmark_grid, build_realistic, random_scenario  # noqa: E402
from marsupial.cli import main, run  # noqa: E402
