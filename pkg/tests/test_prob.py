import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sideinfo.errors import SizeError
from sideinfo.prob import (
    Dist,
    JointTable,
    conditional_mi,
    entropy,
    mi_groups,
    mutual_information,
    sample_dist,
    simplex_grid,
    simplex_grid_array,
    simplex_grid_count,
)


def h2(p):
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


# frozen from the closed form h2 above (independent of the package)
H_QUARTER = 0.8112781244591328
ONE_MINUS_H011 = 0.5000840418354863


def test_frozen_oracles_match_closed_form():
    assert H_QUARTER == pytest.approx(h2(0.25), abs=1e-15)
    assert ONE_MINUS_H011 == pytest.approx(1 - h2(0.11), abs=1e-12)


def test_entropy_examples():
    assert entropy(Dist([0.5, 0.5])) == 1.0
    assert entropy(Dist([1.0, 0.0])) == 0.0
    assert entropy(Dist([0.25, 0.75])) == pytest.approx(H_QUARTER, abs=1e-12)


def test_dist_rejects_bad_weights():
    with pytest.raises(ValueError):
        Dist([0.5, 0.6])
    with pytest.raises(ValueError):
        Dist([-0.1, 1.1])
    with pytest.raises(ValueError):
        Dist([])


def test_joint_table_rejects_bad_mass():
    with pytest.raises(ValueError):
        JointTable(np.full((2, 2), 0.3))


def test_mutual_information_examples():
    assert mutual_information(np.full((2, 2), 0.25)) == 0.0
    assert mutual_information(np.eye(4) / 4) == pytest.approx(2.0, abs=1e-12)
    p = 0.11
    dsbs = np.array([[1 - p, p], [p, 1 - p]]) / 2
    assert mutual_information(dsbs) == pytest.approx(ONE_MINUS_H011, abs=1e-12)
    with pytest.raises(ValueError):
        mutual_information(np.full((2, 2, 2), 1 / 8))


def test_conditional_mi_examples():
    j = np.einsum("ab,c->abc", np.eye(2) / 2, np.array([0.3, 0.7]))
    assert conditional_mi(j) == pytest.approx(1.0, abs=1e-12)
    assert conditional_mi(np.full((2, 2, 2), 1 / 8)) == 0.0
    with pytest.raises(ValueError):
        conditional_mi(np.full((2, 2), 0.25))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 3), st.integers(2, 3), st.integers(2, 3))
def test_chain_rule(seed, na, nb, nc):
    rng = np.random.default_rng(seed)
    j = rng.dirichlet(np.ones(na * nb * nc)).reshape(na, nb, nc)
    lhs = mutual_information(j.reshape(na, nb * nc))
    rhs = mutual_information(j.sum(1)) + conditional_mi(j)
    assert lhs == pytest.approx(rhs, abs=1e-12)
    assert mi_groups(j, [0], [1, 2]) == pytest.approx(lhs, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10**6))
def test_entropy_range(dim, seed):
    d = sample_dist(dim, seed)
    assert 0.0 <= entropy(d) <= math.log2(dim) + 1e-12


def test_simplex_grid_counts():
    pts = simplex_grid_array(2, 2)
    assert sorted(map(tuple, pts)) == [(0.0, 1.0), (0.5, 0.5), (1.0, 0.0)]
    assert len(list(simplex_grid(3, 1))) == 3
    assert simplex_grid_count(3, 4) == 15 == len(simplex_grid_array(3, 4))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(1, 7))
def test_simplex_grid_valid_and_unique(dim, k):
    g = simplex_grid_array(dim, k)
    assert len(g) == math.comb(k + dim - 1, dim - 1)
    assert np.allclose(g.sum(1), 1.0, atol=1e-12)
    assert np.all(g >= 0)
    assert len(np.unique(np.round(g * k).astype(int), axis=0)) == len(g)


def test_simplex_grid_overflow():
    with pytest.raises(SizeError) as e:
        simplex_grid_array(20, 50, max_points=1000)
    assert e.value.count == math.comb(69, 19)


def test_sample_dist():
    assert sample_dist(3, 11) == sample_dist(3, 11)
    assert sample_dist(1, 5).weights.tolist() == [1.0]
    d = sample_dist(4, 7)
    assert np.all(d.weights > 0) and abs(d.weights.sum() - 1) <= 1e-12
