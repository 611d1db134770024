# -*- coding: utf-8 -*-
#
# Copyright (C) 2024 The marsupial authors.
# License: MIT License (http://www.opensource.org/licenses/mit-license.php)

"""\
Take-off candidates around a target.

The target is surrounded by a beam of ``p`` vertical planes through ``T``,
i.e. ``2p`` half-planes leaving ``T'``.  Each half-plane is sliced and
solved independently with :func:`marsupial.pva2d.pva2d`, then ``q``
candidates are spread over its visible intervals and given an aerial
tether: a taut chain or the shortest clearing catenary of a discrete
length scan.

Module usage:

    planes = slice_beam(scene, plane_beam(target, p, beam_phase(scene.start, target)))
    halves = pva3d(scene, target, p, planes=planes)
    candidates = sample_candidates(halves, scene, q, mode="catenary", c=26)
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np

from marsupial.catenary import Catenary, min_catenary
from marsupial.geometry import EPS, PlanarScene, PlaneFrame, Point3, Scene, slice_scene
from marsupial.pva2d import Chain, SupportTable, VisIntervals, min_taut_chain, pva2d, reach, support_lengths

logger = logging.getLogger("marsupial.pva3d")

TAUT = "taut"
CATENARY = "catenary"
MODES = (TAUT, CATENARY)

# tolerance on the chain-length lower bound of a catenary scan
SCAN_SLACK = 1e-6


@dataclass(frozen=True, eq=False)
class HalfPlane:
    frame: PlaneFrame
    scene: PlanarScene
    table: SupportTable
    intervals: VisIntervals


@dataclass(frozen=True, eq=False)
class CandidateTakeoff:
    """A take-off point ``Y`` above the ground point ``X`` with its tether to ``T``."""

    plane_index: int
    side: int
    azimuth: float
    d: float
    X: Point3
    Y: Point3
    aerial_length: float
    tether: Union[Chain, Catenary]
    mode: str
    frame: PlaneFrame

    def aerial_path(self, samples: int = 128) -> List[Point3]:
        """World polyline from ``Y`` to ``T``: chain vertices or a sampled catenary."""
        if isinstance(self.tether, Chain):
            pts = self.tether.vertices
        else:
            pts = self.tether.sample(samples)
            # sample() runs between the anchors in the order they were given
            if abs(pts[0][0] - self.d) > abs(pts[-1][0] - self.d):
                pts = pts[::-1]
        return [self.frame.to_world(float(d), float(z)) for d, z in pts]

    def to_dict(self) -> dict:
        return {
            "plane_index": self.plane_index,
            "side": self.side,
            "azimuth": self.azimuth,
            "d": self.d,
            "X": list(self.X),
            "Y": list(self.Y),
            "aerial_length": self.aerial_length,
            "mode": self.mode,
        }


def beam_phase(start, T) -> float:
    """Azimuth of ``S`` seen from ``T'``, so one half-plane always holds ``S``."""
    dx, dy = start[0] - T[0], start[1] - T[1]
    if math.hypot(dx, dy) <= EPS:
        return 0.0
    return math.atan2(dy, dx)


def plane_beam(T, p: int, phase: float = 0.0) -> List[PlaneFrame]:
    """
    ``2p`` half-plane frames around ``T'``: azimuths ``phase + k*pi/p`` for
    ``k < 2p``.  Half-planes ``k`` and ``k + p`` form the full plane
    ``k``.

    >>> [round(f.azimuth, 4) for f in plane_beam((0, 0, 10), 1)]
    [0.0, 3.1416]
    >>> len(plane_beam((0, 0, 10), 16))
    32
    """
    if p < 1:
        raise ValueError("p must be at least 1, got %r" % (p,))
    origin = (float(T[0]), float(T[1]))
    return [PlaneFrame(phase + k * math.pi / p, origin, (0.0, float(T[2])), plane_index=k % p, side=k // p)
            for k in range(2 * p)]


def refine_beam(frame: PlaneFrame, p: int, k: int) -> List[PlaneFrame]:
    """
    ``2k`` half-planes splitting the gaps between ``frame`` and its two beam
    neighbours into ``k + 1`` equal parts; they keep the index and side of
    ``frame``.

    >>> [round(f.azimuth, 4) for f in refine_beam(plane_beam((0, 0, 10), 2)[0], 2, 1)]
    [5.4978, 0.7854]
    """
    step = math.pi / p / (k + 1)
    return [PlaneFrame(frame.azimuth + j * step, frame.origin, frame.target_2d,
                       plane_index=frame.plane_index, side=frame.side)
            for j in range(-k, k + 1) if j != 0]


def slice_beam(scene: Scene, frames: Sequence[PlaneFrame]) -> List[PlanarScene]:
    return [slice_scene(scene, frame) for frame in frames]


def _solve(args) -> HalfPlane:
    plane, L = args
    table = support_lengths(plane, L)
    return HalfPlane(plane.frame, plane, table, pva2d(plane, L, table))


def pva3d(scene: Scene, T, p: int, planes: Optional[Sequence[PlanarScene]] = None,
          threads: Optional[int] = None) -> List[HalfPlane]:
    """
    Runs the exact 2D visibility on every half-plane of the beam.

    :param T:
        Target point.
    :param planes:
        Pre-sliced half-planes; sliced here when omitted.
    :param threads:
        Worker count; results are returned in half-plane order regardless.
    """
    if planes is None:
        planes = slice_beam(scene, plane_beam(T, p, beam_phase(scene.start, T)))
    L = scene.params.L
    jobs = [(plane, L) for plane in planes]
    if threads == 1:
        halves = [_solve(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            halves = list(pool.map(_solve, jobs))
    logger.debug("pva3d: %d half-planes, %d visible intervals", len(halves),
                 sum(len(h.intervals.visible) for h in halves))
    return halves


def _spread(visible, q: int) -> np.ndarray:
    """
    Spreads at most ``q`` points over the intervals.  Every interval gets
    its endpoints while the budget lasts, longest intervals first; the rest
    is shared in proportion to length.

    >>> _spread([(0.0, 10.0)], 5).tolist()
    [0.0, 2.5, 5.0, 7.5, 10.0]
    >>> _spread([(0.0, 10.0)], 1).tolist()
    [0.0]
    >>> _spread([(0.0, 2.0), (4.0, 10.0)], 6).tolist()
    [0.0, 1.0, 2.0, 4.0, 7.0, 10.0]
    """
    visible = [(float(lo), float(hi)) for lo, hi in visible]
    if not visible:
        return np.empty(0)
    if q == 1:
        return np.array([visible[0][0]])
    widths = [hi - lo for lo, hi in visible]
    counts = [0] * len(visible)
    budget = q
    for i in sorted(range(len(visible)), key=lambda i: (-widths[i], i)):
        need = 1 if widths[i] <= EPS else 2
        if need <= budget:
            counts[i] = need
            budget -= need
    spanned = [i for i, n in enumerate(counts) if n == 2]
    total = sum(widths[i] for i in spanned)
    if budget > 0 and total > EPS:
        shares = {i: budget * widths[i] / total for i in spanned}
        for i in spanned:
            counts[i] += int(math.floor(shares[i]))
        left = q - sum(counts)
        for i in sorted(spanned, key=lambda i: (-(shares[i] - math.floor(shares[i])), i))[:left]:
            counts[i] += 1
    parts = [np.array([lo]) if n == 1 else np.linspace(lo, hi, n)
             for (lo, hi), n in zip(visible, counts) if n > 0]
    return np.unique(np.concatenate(parts))


def _candidate(scene: Scene, plane: PlanarScene, table: Optional[SupportTable], d: float,
               mode: str, c: int) -> Optional[CandidateTakeoff]:
    frame = plane.frame
    x, y = frame.ground_point(d)
    if not (scene.in_bounds_xy(x, y) and scene.ground_free(x, y)):
        return None
    z0 = plane.take_off_z
    L = scene.params.L
    if mode == TAUT:
        tether = min_taut_chain((d, z0), plane, table, L)
        length = None if tether is None else tether.length
    else:
        # a clearing catenary pulled tight is a chain no longer than it
        shortest = None
        if table is not None:
            chain = min_taut_chain((d, z0), plane, table, L)
            if chain is None:
                return None
            shortest = chain.length - SCAN_SLACK
        tether = min_catenary((d, z0), plane.target_2d, L, c, plane, floor=z0, shortest=shortest)
        length = None if tether is None else tether.arc_length
    if tether is None:
        return None
    return CandidateTakeoff(
        plane_index=frame.plane_index,
        side=frame.side,
        azimuth=frame.azimuth,
        d=float(d),
        X=Point3(x, y, 0.0),
        Y=Point3(x, y, z0),
        aerial_length=float(length),
        tether=tether,
        mode=mode,
        frame=frame,
    )


def sample_candidates(halves: Sequence[HalfPlane], scene: Scene, q: int, mode: str = CATENARY,
                      c: int = 26) -> List[CandidateTakeoff]:
    """
    Places at most ``q`` candidates per half-plane over its visible intervals.

    Candidates whose ground point leaves the bounds or falls inside a
    blocking footprint are dropped, as are catenary-mode candidates with no
    clearing catenary of length at most ``L``.
    """
    if mode not in MODES:
        raise ValueError("unknown tether mode %r" % (mode,))
    out = []
    for half in halves:
        for d in _spread(half.intervals.visible, q):
            cand = _candidate(scene, half.scene, half.table, float(d), mode, c)
            if cand is not None:
                out.append(cand)
    logger.debug("sampled %d %s candidates over %d half-planes", len(out), mode, len(halves))
    return out


def uniform_candidates(planes: Sequence[PlanarScene], scene: Scene, q: int, mode: str = CATENARY,
                       c: int = 26) -> List[CandidateTakeoff]:
    """
    Candidates without visibility filtering: ``q`` points spread over the
    whole reachable segment ``[0, d_Q]`` of every half-plane, each checked on
    its own.
    """
    if mode not in MODES:
        raise ValueError("unknown tether mode %r" % (mode,))
    L = scene.params.L
    out = []
    for plane in planes:
        d_q = reach(plane, L)
        if d_q is None:
            continue
        table = support_lengths(plane, L) if mode == TAUT else None
        for d in _spread([(0.0, d_q)], q):
            cand = _candidate(scene, plane, table, float(d), mode, c)
            if cand is not None:
                out.append(cand)
    return out


def densify(scene: Scene, frame: PlaneFrame, d: float, q: int, k: int, mode: str = CATENARY, c: int = 26,
            use_pva: bool = True) -> List[CandidateTakeoff]:
    """
    Up to ``2k`` candidates on the half-plane ``frame`` splitting the gaps
    between ``d`` and its neighbours in the regular spread of ``q`` points.
    Points falling outside the visible intervals (the reachable segment
    when ``use_pva`` is off) are skipped.
    """
    if mode not in MODES:
        raise ValueError("unknown tether mode %r" % (mode,))
    plane = slice_scene(scene, frame)
    L = scene.params.L
    if use_pva:
        half = _solve((plane, L))
        visible, table = half.intervals.visible, half.table
    else:
        d_q = reach(plane, L)
        visible = () if d_q is None else ((0.0, d_q),)
        table = support_lengths(plane, L) if mode == TAUT else None
    points = _spread(visible, q)
    if len(points) == 0:
        return []
    i = int(np.argmin(np.abs(points - d)))
    extra = []
    for neighbour in (points[i - 1] if i > 0 else None, points[i + 1] if i + 1 < len(points) else None):
        if neighbour is not None:
            extra.extend(d + j * (neighbour - d) / (k + 1) for j in range(1, k + 1))
    out = []
    for x in extra:
        if not any(lo - EPS <= x <= hi + EPS for lo, hi in visible):
            continue
        cand = _candidate(scene, plane, table, float(x), mode, c)
        if cand is not None:
            out.append(cand)
    return out


def candidates_to_rows(candidates: Sequence[CandidateTakeoff]):
    """CSV rows ``(azimuth, side, d, x, y, aerial_length, mode)``."""
    return [(cand.azimuth, cand.side, cand.d, cand.X.x, cand.X.y, cand.aerial_length, cand.mode)
            for cand in candidates]
