"""Finite probability primitives.

Everything is in bits. ``0 log 0`` is taken to be 0 throughout.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterator, Sequence

import numpy as np

from .errors import SizeError

NORM_TOL = 1e-12
MI_CLAMP = 1e-12


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Dist:
    """Probability mass over ``range(len(weights))``."""

    weights: np.ndarray

    def __post_init__(self):
        w = _frozen(self.weights)
        if w.ndim != 1 or w.size < 1:
            raise ValueError(f"Dist needs a non-empty vector, got shape {w.shape}")
        if np.any(w < 0):
            raise ValueError("Dist weights must be non-negative")
        if abs(w.sum() - 1.0) > NORM_TOL:
            raise ValueError(f"Dist weights sum to {w.sum()!r}, not 1")
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.weights.size

    def __eq__(self, other):
        return isinstance(other, Dist) and np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash(self.weights.tobytes())


@dataclass(frozen=True, eq=False)
class JointTable:
    """Joint law over a product of finite alphabets; ``axes`` are the sizes."""

    mass: np.ndarray

    def __post_init__(self):
        m = _frozen(self.mass)
        if m.ndim < 1 or m.size < 1:
            raise ValueError("JointTable needs at least one axis")
        if np.any(m < 0):
            raise ValueError("JointTable entries must be non-negative")
        if abs(m.sum() - 1.0) > NORM_TOL:
            raise ValueError(f"JointTable mass sums to {m.sum()!r}, not 1")
        object.__setattr__(self, "mass", m)

    @property
    def axes(self) -> tuple[int, ...]:
        return self.mass.shape

    def marginal(self, keep: Sequence[int]) -> "JointTable":
        """Marginal over the axes in ``keep`` (returned in that order)."""
        keep = list(keep)
        drop = tuple(i for i in range(self.mass.ndim) if i not in keep)
        m = self.mass.sum(axis=drop)
        # sum() leaves the kept axes in ascending order
        order = sorted(keep)
        m = np.transpose(m, [order.index(k) for k in keep])
        return JointTable(m)

    def merge(self, groups: Sequence[Sequence[int]]) -> "JointTable":
        """Marginalize to ``groups`` and flatten each group into one axis."""
        flat = [i for g in groups for i in g]
        m = self.marginal(flat).mass
        shape = [int(np.prod([self.mass.shape[i] for i in g])) if g else 1 for g in groups]
        return JointTable(m.reshape(shape))

    def __eq__(self, other):
        return isinstance(other, JointTable) and np.array_equal(self.mass, other.mass)

    def __hash__(self):
        return hash((self.mass.shape, self.mass.tobytes()))


def normalize(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    s = a.sum()
    if s <= 0:
        raise ValueError("cannot normalize an all-zero vector")
    return a / s


def _h(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def entropy(d) -> float:
    """Shannon entropy in bits of a Dist, JointTable or raw mass array."""
    if isinstance(d, (Dist,)):
        p = d.weights
    elif isinstance(d, JointTable):
        p = d.mass.ravel()
    else:
        p = np.asarray(d, dtype=float).ravel()
    return max(_h(p), 0.0)


def _clamp(v: float, what: str) -> float:
    if v < -MI_CLAMP:
        raise ArithmeticError(f"{what} came out negative ({v!r}); inconsistent table")
    return max(v, 0.0)


def _mass(j) -> np.ndarray:
    return j.mass if isinstance(j, JointTable) else np.asarray(j, dtype=float)


def mutual_information(j) -> float:
    """I(A;B) for a two-axis joint table."""
    m = _mass(j)
    if m.ndim != 2:
        raise ValueError(f"mutual_information expects 2 axes, got {m.ndim}")
    v = _h(m.sum(1)) + _h(m.sum(0)) - _h(m.ravel())
    return _clamp(v, "I(A;B)")


def conditional_mi(j) -> float:
    """I(A;B|C) for a three-axis joint table ordered (A, B, C)."""
    m = _mass(j)
    if m.ndim != 3:
        raise ValueError(f"conditional_mi expects 3 axes, got {m.ndim}")
    v = _h(m.sum(1).ravel()) + _h(m.sum(0).ravel()) - _h(m.ravel()) - _h(m.sum((0, 1)))
    return _clamp(v, "I(A;B|C)")


def mi_groups(mass: np.ndarray, a: Sequence[int], b: Sequence[int], c: Sequence[int] = ()) -> float:
    """I(A;B|C) where A, B, C are groups of axes of ``mass``.

    Groups may be empty (an empty group is a constant).
    """
    t = JointTable(mass) if not isinstance(mass, JointTable) else mass
    if not a or not b:
        return 0.0
    m = t.merge([a, b, c]).mass
    return conditional_mi(m)


def simplex_grid(dim: int, k: int, max_points: int = 10**7) -> Iterator[Dist]:
    """All distributions on ``dim`` points with weights in multiples of 1/k."""
    return (Dist(row) for row in simplex_grid_array(dim, k, max_points))


def simplex_grid_count(dim: int, k: int) -> int:
    return comb(k + dim - 1, dim - 1)


def simplex_grid_array(dim: int, k: int, max_points: int = 10**7) -> np.ndarray:
    """Grid points as rows of an array, in lexicographic order of the counts."""
    if dim < 1 or k < 1:
        raise ValueError("simplex_grid needs dim >= 1 and k >= 1")
    n = simplex_grid_count(dim, k)
    if n > max_points:
        raise SizeError(f"simplex grid dim={dim}, k={k} has {n} points (limit {max_points})", count=n)
    rows = np.empty((n, dim))
    # stars and bars: choose dim-1 bar positions among k+dim-1 slots
    for i, bars in enumerate(itertools.combinations(range(k + dim - 1), dim - 1)):
        prev = -1
        for d, b in enumerate(bars):
            rows[i, d] = b - prev - 1
            prev = b
        rows[i, dim - 1] = k + dim - 2 - prev
    return rows / k


def sample_dist(dim: int, seed: int, alpha: float = 1.0) -> Dist:
    """Dirichlet(alpha) draw, deterministic in ``seed`` and strictly positive."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if dim == 1:
        return Dist([1.0])
    rng = np.random.default_rng(seed)
    w = rng.dirichlet(np.full(dim, alpha))
    w = np.maximum(w, 1e-300)
    return Dist(w / w.sum())


def random_rows(rng: np.random.Generator, shape, dim: int, alpha: float = 1.0) -> np.ndarray:
    """Array of strictly positive Dirichlet rows with trailing axis ``dim``."""
    shape = tuple(shape)
    out = rng.dirichlet(np.full(dim, alpha), size=shape if shape else None)
    out = np.maximum(out, 1e-300)
    return out / out.sum(-1, keepdims=True)


def entropy_rows(p: np.ndarray, axes) -> np.ndarray:
    """Entropies in bits of a batch of (unnormalised) mass arrays, summed over ``axes``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(p > 0, -p * np.log2(p), 0.0)
    return t.sum(axis=axes)
