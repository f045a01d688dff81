import math

import numpy as np
import pytest

from angleid.core import DataMatrix, InsufficientNeighborsError
from angleid.neighbors import (
    DirectionBundle,
    NeighborList,
    direction_bundle,
    knn,
    radius_neighbors,
)


def _brute_force(points, q, exclude_index=None):
    """Independent oracle: full pairwise-distance sort in plain Python."""
    scored = []
    for i, p in enumerate(points):
        if i == exclude_index:
            continue
        d = math.dist(p, q)
        if d == 0.0:
            continue
        scored.append((d, i))
    scored.sort()
    return scored


class TestKnn:
    def test_line_example(self):
        data = DataMatrix([[0.0], [1.0], [2.0], [10.0]])
        nl = knn(data, 0, 2)
        assert list(nl.indices) == [1, 2]
        assert list(nl.distances) == [1.0, 2.0]

    def test_duplicates_of_query_are_skipped(self):
        data = DataMatrix([[0.0], [0.0], [1.0]])
        nl = knn(data, 0, 1)
        assert list(nl.indices) == [2]
        assert list(nl.distances) == [1.0]

    def test_insufficient_neighbors_carries_count(self):
        data = DataMatrix([[0.0], [0.0], [1.0]])
        with pytest.raises(InsufficientNeighborsError) as exc:
            knn(data, 0, 2)
        assert exc.value.available == 1
        assert exc.value.required == 2

    @pytest.mark.parametrize("k", [1, 5, 50])
    def test_matches_brute_force_oracle(self, k):
        rng = np.random.default_rng(7)
        data = DataMatrix(rng.standard_normal((200, 3)))
        for q in range(data.n):
            nl = knn(data, q, k)
            expect = _brute_force(data.points, data.points[q], exclude_index=q)[:k]
            assert list(nl.indices) == [i for _, i in expect]
            # math.dist rounds differently in the last ulp than the
            # vectorized sqrt-of-squares; selection order is what matters.
            assert list(nl.distances) == pytest.approx([d for d, _ in expect], rel=1e-15)

    @pytest.mark.parametrize("seed", range(5))
    def test_prefix_property(self, seed):
        rng = np.random.default_rng(seed)
        data = DataMatrix(rng.standard_normal((80, 2)))
        for k in (1, 3, 10, 40):
            a = knn(data, 5, k)
            b = knn(data, 5, k + 1)
            assert list(b.indices[:k]) == list(a.indices)

    def test_ties_broken_by_ascending_index(self):
        # Four points equidistant from the center; order must be by index.
        data = DataMatrix([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
        nl = knn(data, 0, 4)
        assert list(nl.indices) == [1, 2, 3, 4]

    def test_external_query_vector(self):
        data = DataMatrix([[0.0, 0.0], [2.0, 0.0]])
        nl = knn(data, np.array([0.5, 0.0]), 2)
        assert nl.query_index is None
        assert list(nl.indices) == [0, 1]
        assert list(nl.distances) == [0.5, 1.5]

    def test_external_query_coinciding_with_point_excludes_it(self):
        data = DataMatrix([[0.0], [1.0]])
        nl = knn(data, np.array([0.0]), 1)
        assert list(nl.indices) == [1]

    def test_invalid_k(self):
        data = DataMatrix([[0.0], [1.0]])
        with pytest.raises(ValueError):
            knn(data, 0, 0)

    def test_query_index_out_of_range(self):
        data = DataMatrix([[0.0], [1.0]])
        with pytest.raises(IndexError):
            knn(data, 2, 1)


class TestRadiusNeighbors:
    def test_inclusive_radius(self):
        data = DataMatrix([[0.0], [1.0], [2.0], [3.0]])
        nl = radius_neighbors(data, 0, 2.0)
        assert list(nl.indices) == [1, 2]

    def test_empty_result_allowed(self):
        data = DataMatrix([[0.0], [5.0]])
        nl = radius_neighbors(data, 0, 1.0)
        assert nl.k == 0

    def test_agrees_with_knn_ordering(self):
        rng = np.random.default_rng(3)
        data = DataMatrix(rng.standard_normal((50, 2)))
        full = knn(data, 0, 49)
        r = float(full.distances[9])
        nl = radius_neighbors(data, 0, r)
        assert list(nl.indices) == list(full.indices[: nl.k])


class TestDirectionBundle:
    def test_three_four_five(self):
        data = DataMatrix([[0.0, 0.0], [3.0, 4.0]])
        b = direction_bundle(data, 0, knn(data, 0, 1))
        assert b.directions[0] == pytest.approx([0.6, 0.8], abs=0.0)

    def test_axis_directions(self):
        data = DataMatrix([[1.0, 1.0], [2.0, 1.0], [1.0, 2.0]])
        b = direction_bundle(data, 0, knn(data, 0, 2))
        assert np.array_equal(b.directions, [[1.0, 0.0], [0.0, 1.0]])

    @pytest.mark.parametrize("seed", range(3))
    def test_unit_norm_everywhere(self, seed):
        rng = np.random.default_rng(seed)
        data = DataMatrix(rng.standard_normal((60, 4)) * 100.0)
        worst = 0.0
        for q in range(data.n):
            b = direction_bundle(data, q, knn(data, q, 20))
            norms = np.linalg.norm(b.directions, axis=1)
            worst = max(worst, float(np.max(np.abs(norms - 1.0))))
        assert worst < 1e-12

    def test_rejects_mismatched_query(self):
        data = DataMatrix([[0.0], [1.0], [2.0]])
        nl = knn(data, 0, 1)
        with pytest.raises(ValueError):
            direction_bundle(data, 1, nl)

    def test_bundle_validation(self):
        with pytest.raises(ValueError, match="unit"):
            DirectionBundle(np.array([[2.0, 0.0]]), 1)


class TestNeighborListValidation:
    def test_rejects_zero_distance(self):
        with pytest.raises(ValueError):
            NeighborList(0, np.array([1]), np.array([0.0]))

    def test_rejects_decreasing_distances(self):
        with pytest.raises(ValueError):
            NeighborList(0, np.array([1, 2]), np.array([2.0, 1.0]))

    def test_rejects_query_in_indices(self):
        with pytest.raises(ValueError):
            NeighborList(1, np.array([1]), np.array([1.0]))

    def test_prefix(self):
        nl = NeighborList(None, np.array([4, 2, 9]), np.array([1.0, 2.0, 3.0]))
        assert list(nl.prefix(2).indices) == [4, 2]
        with pytest.raises(InsufficientNeighborsError):
            nl.prefix(5)
