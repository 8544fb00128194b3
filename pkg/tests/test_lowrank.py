import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hopmap.graph import all_pairs_hops
from hopmap.lowrank import (
    CompletionConfig,
    SvdFactors,
    complete_nuclear_norm,
    double_center_full,
    double_center_partial,
    matrix_rank,
    normalized_spectrum,
    singular_rank,
    svd,
)
from hopmap.sampling import ObservedMatrix, random_entry_observations, vc_observations
from hopmap.graph import VcMatrix
from oracles import cartesian_product, cycle_graph, naive_partial_center


def hdm_of_cycle(n):
    return all_pairs_hops(cycle_graph(n)).hops.astype(float)


class TestSvd:
    def test_identity_spectrum(self):
        f = svd(np.eye(3))
        assert np.allclose(f.s, [1.0, 1.0, 1.0])
        f.validate(np.eye(3))

    def test_rank_one_outer_product(self):
        u = np.array([1.0, 2.0, -1.0])
        v = np.array([0.5, 1.0, 1.5, 2.0])
        f = svd(np.outer(u, v))
        assert f.rank == 1

    def test_c4_hdm_singular_values(self):
        # circulant(0,1,2,1) has eigenvalues {4, -2, 0, -2}
        f = svd(hdm_of_cycle(4))
        assert np.allclose(f.s, [4.0, 2.0, 2.0, 0.0], atol=1e-12)

    def test_factor_invariants_on_random_matrices(self):
        rng = np.random.default_rng(0)
        for shape in [(6, 6), (9, 4), (3, 8)]:
            m = rng.standard_normal(shape)
            f = svd(m)
            f.validate(m)

    def test_sign_convention_deterministic(self):
        m = np.random.default_rng(1).standard_normal((7, 5))
        a, b = svd(m), svd(m)
        assert np.array_equal(a.u, b.u) and np.array_equal(a.v, b.v)
        for i in range(a.s.size):
            j = np.argmax(np.abs(a.u[:, i]))
            assert a.u[j, i] >= 0

    def test_non_finite_rejected(self):
        m = np.ones((3, 3))
        m[1, 1] = np.nan
        with pytest.raises(ValueError):
            svd(m)

    @settings(max_examples=25, deadline=None)
    @given(
        arrays(
            np.float64,
            st.tuples(st.integers(2, 8), st.integers(2, 8)),
            elements=st.floats(-50, 50),
        )
    )
    def test_spectrum_descending_nonnegative(self, m):
        f = svd(m)
        assert np.all(f.s >= 0)
        assert np.all(np.diff(f.s) <= 1e-12)
        f.validate(m)


class TestRank:
    def test_cycle_hdm_ranks(self):
        assert matrix_rank(hdm_of_cycle(4)) == 3
        assert matrix_rank(hdm_of_cycle(6)) == 4

    def test_torus_hdm_rank_frozen(self):
        # HDM of C4 x C4 (Cartesian product), rank recorded from the
        # Floyd-Warshall + SVD oracle run
        g = cartesian_product(cycle_graph(4), cycle_graph(4))
        h = all_pairs_hops(g).hops.astype(float)
        assert matrix_rank(h) == 5

    def test_threshold_is_relative(self):
        # cutoff sits at 1e-10 times the leading value
        s = np.array([1e6, 1.0, 1e-3, 1e-5])
        assert singular_rank(s) == 3
        assert singular_rank(np.array([1.0, 1e-11])) == 1
        assert singular_rank(np.zeros(3)) == 0


class TestNormalizedSpectrum:
    def test_leading_entry_is_one(self):
        m = np.random.default_rng(2).standard_normal((10, 6))
        ns = normalized_spectrum(m)
        assert ns[0] == 1.0
        assert np.all((ns >= 0) & (ns <= 1.0))

    def test_center_flag_squares_then_centers(self):
        h = hdm_of_cycle(8)
        manual = svd(double_center_full(h * h)).s
        got = normalized_spectrum(h, center=True)
        assert np.allclose(got, manual / manual[0])

    def test_all_zero_rejected(self):
        with pytest.raises(ValueError):
            normalized_spectrum(np.zeros((4, 4)))


class TestCentering:
    def test_constant_matrix_centers_to_zero(self):
        assert np.allclose(double_center_full(np.full((5, 7), 3.0)), 0.0)

    def test_collinear_points_give_rank_one(self):
        # squared distances between points 0, 1, 2 on a line
        x = np.array([0.0, 1.0, 2.0])
        sq = (x[:, None] - x[None, :]) ** 2
        s = double_center_full(sq)
        assert matrix_rank(s) == 1
        # gram matrix of centered 1-d coordinates
        assert np.allclose(s, np.outer(x - 1.0, x - 1.0))

    def test_zero_row_and_column_sums(self):
        m = np.random.default_rng(3).random((8, 5)) * 9
        s = double_center_full(m)
        tol = 1e-8 * np.abs(s).max()
        assert np.all(np.abs(s.sum(axis=0)) < tol)
        assert np.all(np.abs(s.sum(axis=1)) < tol)

    def test_partial_equals_full_on_full_mask(self):
        rng = np.random.default_rng(4)
        values = rng.integers(0, 9, size=(12, 5)).astype(float)
        o = ObservedMatrix(values=values.copy(), mask=np.ones((12, 5), dtype=bool))
        full = double_center_full(values * values)
        part = double_center_partial(o)
        assert np.allclose(part.values, full, rtol=1e-12, atol=1e-12)

    def test_partial_matches_naive_oracle(self):
        rng = np.random.default_rng(5)
        values = rng.integers(1, 10, size=(20, 6)).astype(float)
        mask = rng.random((20, 6)) < 0.6
        mask[~mask.any(axis=1), 0] = True
        mask[0, ~mask.any(axis=0)] = True
        o = ObservedMatrix(values=np.where(mask, values, 0.0), mask=mask)
        expected = naive_partial_center(np.where(mask, values, 0.0), mask)
        got = double_center_partial(o)
        assert np.allclose(got.values, expected)
        assert np.array_equal(got.mask, mask)

    def test_single_entry_rows_collapse_to_zero(self):
        # one observation per row and column, all equal: centering kills them
        v = 3.0 * np.eye(4)
        o = ObservedMatrix(values=v, mask=np.eye(4, dtype=bool))
        got = double_center_partial(o)
        assert np.allclose(got.values, 0.0)

    def test_empty_row_rejected(self):
        mask = np.ones((4, 3), dtype=bool)
        mask[2] = False
        o = ObservedMatrix(values=np.zeros((4, 3)), mask=mask)
        with pytest.raises(ValueError):
            double_center_partial(o)


class TestCompletion:
    def test_full_mask_returns_input_exactly(self):
        values = np.random.default_rng(6).standard_normal((9, 9))
        o = ObservedMatrix(values=values.copy(), mask=np.ones((9, 9), dtype=bool))
        res = complete_nuclear_norm(o)
        assert np.array_equal(res.completed, values)
        assert res.converged
        assert res.iterations == 0
        assert res.final_residual == 0.0

    def test_low_rank_recovery(self):
        rng = np.random.default_rng(7)
        truth = rng.standard_normal((80, 3)) @ rng.standard_normal((3, 80))
        mask = rng.random((80, 80)) < 0.5
        mask[~mask.any(axis=1), 0] = True
        mask[0, ~mask.any(axis=0)] = True
        o = ObservedMatrix(values=np.where(mask, truth, 0.0), mask=mask)
        res = complete_nuclear_norm(o)
        assert res.converged
        assert res.iterations <= 500
        err = np.linalg.norm(res.completed - truth) / np.linalg.norm(truth)
        assert err <= 1e-3
        assert res.final_residual <= 1e-6

    def test_observed_entries_enforced(self):
        rng = np.random.default_rng(8)
        truth = rng.standard_normal((40, 4)) @ rng.standard_normal((4, 40))
        mask = rng.random((40, 40)) < 0.6
        mask[~mask.any(axis=1), 0] = True
        mask[0, ~mask.any(axis=0)] = True
        o = ObservedMatrix(values=np.where(mask, truth, 0.0), mask=mask)
        res = complete_nuclear_norm(o)
        gap = np.linalg.norm((res.completed - truth)[mask])
        assert gap / np.linalg.norm(truth[mask]) <= 1e-6

    def test_symmetric_mode_output_is_symmetric(self):
        h = all_pairs_hops(cycle_graph(20))
        o = random_entry_observations(h, 0.6, seed=9)
        res = complete_nuclear_norm(o)
        assert np.array_equal(res.completed, res.completed.T)

    def test_deterministic(self):
        p = VcMatrix(
            hops=np.random.default_rng(10).integers(0, 9, size=(50, 8)),
            anchor_ids=np.arange(8),
        )
        o = vc_observations(p, 0.4, seed=11)
        a = complete_nuclear_norm(o)
        b = complete_nuclear_norm(o)
        assert np.array_equal(a.completed, b.completed)
        assert a.iterations == b.iterations

    def test_trace_csv_written(self, tmp_path):
        rng = np.random.default_rng(12)
        truth = rng.standard_normal((30, 2)) @ rng.standard_normal((2, 30))
        mask = rng.random((30, 30)) < 0.7
        mask[~mask.any(axis=1), 0] = True
        mask[0, ~mask.any(axis=0)] = True
        o = ObservedMatrix(values=np.where(mask, truth, 0.0), mask=mask)
        path = tmp_path / "trace.csv"
        res = complete_nuclear_norm(o, trace_path=path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "iter,residual,nuclear_norm"
        assert len(lines) == res.iterations + 1
        assert len(res.residual_trace) == res.iterations
        # final residual in the trace matches the result
        assert float(lines[-1].split(",")[1]) == res.final_residual

    def test_non_convergence_flagged_not_raised(self):
        rng = np.random.default_rng(13)
        truth = rng.standard_normal((30, 5)) @ rng.standard_normal((5, 30))
        mask = rng.random((30, 30)) < 0.6
        mask[~mask.any(axis=1), 0] = True
        mask[0, ~mask.any(axis=0)] = True
        o = ObservedMatrix(values=np.where(mask, truth, 0.0), mask=mask)
        res = complete_nuclear_norm(o, CompletionConfig(max_iters=3))
        assert not res.converged
        assert res.iterations == 3

    def test_empty_mask_rejected(self):
        o = ObservedMatrix(values=np.zeros((3, 3)), mask=np.zeros((3, 3), dtype=bool))
        with pytest.raises(ValueError):
            complete_nuclear_norm(o)

    def test_empty_row_rejected(self):
        mask = np.ones((4, 4), dtype=bool)
        mask[1] = False
        o = ObservedMatrix(values=np.zeros((4, 4)), mask=mask)
        with pytest.raises(ValueError):
            complete_nuclear_norm(o)

    def test_non_finite_observation_rejected(self):
        values = np.ones((3, 3))
        values[0, 0] = np.inf
        o = ObservedMatrix(values=values, mask=np.ones((3, 3), dtype=bool))
        with pytest.raises(ValueError):
            complete_nuclear_norm(o)

    def test_bad_config_rejected(self):
        with pytest.raises(ValueError):
            CompletionConfig(tolerance=0.0)
        with pytest.raises(ValueError):
            CompletionConfig(max_iters=0)
        with pytest.raises(ValueError):
            CompletionConfig(mu_growth=1.0)
