"""Two-user rate regions as convex hulls of pentagons."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass
class RegionPoint:
    r1_bits: float
    r2_bits: float
    binding: tuple = ()
    source: Optional[int] = None


@dataclass
class RateRegion:
    """Convex hull of pentagons; ``laws[i]`` and ``bounds[i]`` belong to sample ``i``."""

    vertices: list
    dominant: list
    bounds: np.ndarray = field(repr=False)
    laws: list = field(repr=False)

    @property
    def max_sum(self) -> float:
        return max(p.r1_bits + p.r2_bits for p in self.vertices)


def _hull(points: np.ndarray) -> list[int]:
    """Monotone-chain convex hull; returns indices in counter-clockwise order."""
    order = sorted(range(len(points)), key=lambda i: (points[i, 0], points[i, 1]))

    def cross(o, a, b):
        return ((points[a, 0] - points[o, 0]) * (points[b, 1] - points[o, 1])
                - (points[a, 1] - points[o, 1]) * (points[b, 0] - points[o, 0]))

    lower, upper = [], []
    for i in order:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], i) <= 1e-15:
            lower.pop()
        lower.append(i)
    for i in reversed(order):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], i) <= 1e-15:
            upper.pop()
        upper.append(i)
    return lower[:-1] + upper[:-1]


def pentagon_region(bounds: np.ndarray, laws=None) -> RateRegion:
    """Convex hull of the pentagons ``R1 <= a, R2 <= b, R1 + R2 <= c``, one per row of ``bounds``."""
    bounds = np.maximum(np.asarray(bounds, dtype=float), 0.0)
    i1, i2, i12 = bounds[:, 0], bounds[:, 1], bounds[:, 2]
    i1, i2 = np.minimum(i1, i12), np.minimum(i2, i12)
    # only the two sum-rate corners of each pentagon can be hull vertices
    # away from the axes; the axis corners are added once
    c1 = np.stack([i1, np.maximum(np.minimum(i12 - i1, i2), 0.0)], axis=1)
    c2 = np.stack([np.maximum(np.minimum(i12 - i2, i1), 0.0), i2], axis=1)
    pts = np.concatenate([c1, c2, [[0.0, 0.0]], [[i1.max(), 0.0]], [[0.0, i2.max()]]])
    src = np.concatenate([np.arange(len(bounds)), np.arange(len(bounds)),
                          [-1, int(np.argmax(i1)), int(np.argmax(i2))]])
    tags = [("R1", "R1+R2")] * len(bounds) + [("R2", "R1+R2")] * len(bounds) + [(), ("R1",), ("R2",)]
    # a point dominated componentwise by another lies inside the hull of that
    # point and the axis corners, so only the Pareto set is passed on
    order = np.lexsort((-pts[:, 1], -pts[:, 0]))
    best_r2 = np.maximum.accumulate(pts[order, 1])
    keep = np.ones(len(order), bool)
    keep[1:] = pts[order[1:], 1] > best_r2[:-1] + 1e-12
    cand = np.union1d(order[keep], np.arange(len(pts) - 3, len(pts)))
    # deduplicate at 1e-12
    _, first = np.unique(np.round(pts[cand] / 1e-12), axis=0, return_index=True)
    uniq = cand[np.sort(first)]
    hull = [int(uniq[h]) for h in _hull(pts[uniq])]
    verts = [RegionPoint(float(pts[h, 0]), float(pts[h, 1]), tags[h], int(src[h]) if src[h] >= 0 else None)
             for h in hull]
    # dominant face: vertices not dominated componentwise by another vertex
    dom = [v for v in verts if not any(
        (w.r1_bits >= v.r1_bits - 1e-12 and w.r2_bits >= v.r2_bits - 1e-12)
        and (w.r1_bits > v.r1_bits + 1e-12 or w.r2_bits > v.r2_bits + 1e-12) for w in verts)]
    dom.sort(key=lambda p: p.r1_bits)
    return RateRegion(verts, dom, bounds, laws)
