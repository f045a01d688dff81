import numpy as np
import pytest

from angleid.analysis import (
    Histogram,
    TrailMatrix,
    histogram,
    pearson,
    spearman,
    trails,
    write_histogram_csv,
    write_trails_csv,
)
from angleid.angle_id import estimate_table
from angleid.core import DataMatrix, DegenerateInputError
from angleid.synth import sample_ball


class TestHistogram:
    def test_enumerated_example(self):
        h = histogram([1.0, 1.05, 2.0], bin_width=0.5)
        assert h.counts == {2: 2, 4: 1}
        assert h.n_total == 3

    def test_counts_always_sum_to_input_length(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            values = rng.standard_normal(int(rng.integers(1, 400)))
            h = histogram(values, bin_width=0.3, origin=-1.0)
            assert sum(h.counts.values()) == values.size == h.n_total

    def test_negative_values_bin_below_origin(self):
        h = histogram([-0.1, 0.1], bin_width=0.5)
        assert h.counts == {-1: 1, 0: 1}

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError):
            histogram([], bin_width=0.5)

    def test_bad_width_rejected(self):
        with pytest.raises(ValueError):
            histogram([1.0], bin_width=0.0)

    def test_mode_tie_resolves_to_lowest_bin(self):
        h = histogram([0.1, 1.1], bin_width=1.0)
        assert h.mode_bin() == 0
        assert h.mode_center() == 0.5

    def test_ball_abid_mode_near_three(self):
        """abid histogram on a 3-ball sample peaks at the bin holding 3.0."""
        data = sample_ball(5000, 3, seed=42)
        table = estimate_table(data, 100, estimators=("abid",))
        h = histogram(table.values("abid"), bin_width=0.25)
        assert abs(h.mode_bin() - h.bin_of(3.0)) <= 1

    def test_csv_output(self, tmp_path):
        h = histogram([1.0, 1.05, 2.0], bin_width=0.5)
        p = tmp_path / "h.csv"
        write_histogram_csv(h, p)
        assert p.read_text() == "bin_left,count\n1,2\n2,1\n"


class TestTrails:
    def test_single_k_equals_estimate_column(self):
        data = sample_ball(120, 2, seed=1)
        tm = trails(data, [15], "abid")
        table = estimate_table(data, 15, estimators=("abid",))
        assert np.array_equal(tm.column(15), table.values("abid"))

    def test_line_data_stays_near_one(self):
        t = np.linspace(0.0, 1.0, 200)
        data = DataMatrix(np.column_stack([t, 0.5 * t]))
        tm = trails(data, [10, 20, 40], "abid")
        assert np.all(tm.estimates >= 0.9)
        assert np.all(tm.estimates <= 1.2)

    def test_ball_trails_are_stable(self):
        """Per-point abid varies little across k on a 4-ball sample."""
        data = sample_ball(2000, 4, seed=2)
        tm = trails(data, range(100, 301, 50), "abid", point_subset=range(40))
        means = tm.estimates.mean(axis=1)
        stds = tm.estimates.std(axis=1)
        assert np.all(stds < 0.2 * means)

    def test_distance_estimator_trails(self):
        data = sample_ball(300, 3, seed=3)
        tm = trails(data, [10, 30], "mle", point_subset=range(10))
        assert tm.estimates.shape == (10, 2)
        assert np.all(tm.estimates > 0)

    def test_threads_do_not_change_results(self):
        data = sample_ball(150, 3, seed=4)
        a = trails(data, [10, 20], "abid", threads=1)
        b = trails(data, [10, 20], "abid", threads=3)
        assert np.array_equal(a.estimates, b.estimates)

    def test_k_values_must_increase(self):
        with pytest.raises(ValueError):
            TrailMatrix((10, 10), np.zeros((1, 2)), "abid", (0,))

    def test_csv_output(self, tmp_path):
        tm = TrailMatrix((5, 9), np.array([[1.5, 2.5]]), "abid", (3,))
        p = tmp_path / "t.csv"
        write_trails_csv(tm, p)
        assert p.read_text() == "index,k5,k9\n3,1.5,2.5\n"


class TestCorrelations:
    def test_identical_series(self):
        a = np.array([0.3, 1.2, 5.0, 2.2])
        assert pearson(a, a) == 1.0
        assert spearman(a, a) == 1.0

    def test_negated_series(self):
        a = np.array([0.3, 1.2, 5.0, 2.2])
        assert pearson(a, -a) == -1.0
        assert spearman(a, -a) == -1.0

    def test_monotone_nonlinear(self):
        a = [1.0, 2.0, 3.0]
        b = [1.0, 4.0, 9.0]
        assert spearman(a, b) == 1.0
        # Frozen from the closed form 8 / (sqrt(2) * sqrt(294/9)); agrees
        # with np.corrcoef as an independent cross-check.
        assert pearson(a, b) == pytest.approx(0.9897433186107870, abs=1e-12)
        assert pearson(a, b) == pytest.approx(np.corrcoef(a, b)[0, 1], abs=1e-12)

    def test_spearman_averages_ties(self):
        # Ranks of a are (1, 2.5, 2.5, 4); frozen from hand computation.
        r = spearman([1.0, 2.0, 2.0, 3.0], [1.0, 2.0, 3.0, 4.0])
        assert r == pytest.approx(0.9486832980505138, abs=1e-12)

    def test_constant_input_undefined(self):
        with pytest.raises(DegenerateInputError):
            pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
        with pytest.raises(DegenerateInputError):
            spearman([1.0, 2.0], [5.0, 5.0])

    def test_length_checks(self):
        with pytest.raises(ValueError):
            pearson([1.0, 2.0], [1.0])
        with pytest.raises(ValueError):
            pearson([1.0], [1.0])
