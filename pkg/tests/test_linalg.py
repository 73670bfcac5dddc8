import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import frobenius_left_inverse_norm, max_left_inverse_norm, unit_column_matrix
from sl0.errors import DimensionMismatch, NotURP, ParseError, RankDeficient, TooLarge
from sl0.linalg import (
    ProjectorFactor,
    check_urp,
    compute_M,
    load_matrix,
    load_vector,
    min_norm_solution,
    project_feasible,
    save_matrix,
    save_vector,
)

RESIDUAL_TOL = 1e-8


class TestMinNormSolution:
    def test_zero_rhs_gives_zero(self):
        a = unit_column_matrix(np.random.default_rng(0), 4, 9)
        assert np.all(min_norm_solution(a, np.zeros(4)) == 0.0)

    def test_identity_block(self):
        a = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        np.testing.assert_allclose(min_norm_solution(a, [3.0, 4.0]), [3.0, 4.0, 0.0], atol=1e-14)

    def test_against_explicit_inverse_oracle(self):
        a = np.array([[1.0, 0.0, 0.5], [0.0, 1.0, 0.5]])
        x = np.array([1.0, 0.0])
        g = a @ a.T
        det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
        g_inv = np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]]) / det
        expected = a.T @ g_inv @ x
        np.testing.assert_allclose(min_norm_solution(a, x), expected, atol=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_residual_contract(self, seed):
        rng = np.random.default_rng(seed)
        a = unit_column_matrix(rng, 7, 15)
        x = rng.standard_normal(7) * 10.0 ** rng.integers(-3, 4)
        s_hat = min_norm_solution(a, x)
        assert np.linalg.norm(a @ s_hat - x) <= RESIDUAL_TOL * max(1.0, np.linalg.norm(x))

    def test_orthogonal_to_null_space(self):
        rng = np.random.default_rng(1)
        a = unit_column_matrix(rng, 5, 12)
        s_hat = min_norm_solution(a, rng.standard_normal(5))
        basis = scipy.linalg.null_space(a)
        for _ in range(100):
            v = basis @ rng.standard_normal(basis.shape[1])
            assert abs(v @ s_hat) <= 1e-8 * np.linalg.norm(v) * np.linalg.norm(s_hat)

    def test_minimal_among_feasible(self):
        rng = np.random.default_rng(2)
        a = unit_column_matrix(rng, 5, 12)
        x = rng.standard_normal(5)
        s_hat = min_norm_solution(a, x)
        proj = ProjectorFactor(a)
        for _ in range(100):
            s = proj.project(rng.standard_normal(12) * 3.0, x)
            assert np.linalg.norm(s_hat) <= np.linalg.norm(s) + 1e-12

    def test_dimension_mismatch(self):
        a = unit_column_matrix(np.random.default_rng(0), 4, 9)
        with pytest.raises(DimensionMismatch):
            min_norm_solution(a, np.zeros(5))


class TestProjectorFactor:
    @pytest.mark.parametrize("n,m", [(3, 8), (20, 45), (50, 80)])
    def test_apply_matches_explicit_inverse(self, n, m):
        rng = np.random.default_rng(n * m)
        a = unit_column_matrix(rng, n, m)
        proj = ProjectorFactor(a)
        explicit = a.T @ np.linalg.inv(a @ a.T)
        v = rng.standard_normal(n)
        got = proj.apply(v)
        assert np.linalg.norm(got - explicit @ v) <= 1e-10 * np.linalg.norm(explicit @ v)

    def test_rejects_rank_deficient(self):
        a = np.array([[1.0, 2.0, 0.0], [2.0, 4.0, 0.0]])
        with pytest.raises(RankDeficient):
            ProjectorFactor(a)

    def test_rejects_tall_matrix(self):
        with pytest.raises(RankDeficient):
            ProjectorFactor(np.eye(3)[:, :2])

    def test_rejects_nearly_singular(self):
        a = np.array([[1.0, 0.0, 0.0], [1.0, 1e-13, 0.0]])
        with pytest.raises(RankDeficient):
            ProjectorFactor(a)

    def test_condition_estimate_close_to_true(self):
        rng = np.random.default_rng(7)
        a = unit_column_matrix(rng, 6, 14)
        proj = ProjectorFactor(a)
        true_cond = np.linalg.cond(a @ a.T, 1)
        assert 0.1 * true_cond <= proj.condition_estimate <= 10 * true_cond

    def test_pinv_frobenius_norm(self):
        rng = np.random.default_rng(8)
        a = unit_column_matrix(rng, 5, 11)
        expected = np.linalg.norm(a.T @ np.linalg.inv(a @ a.T))
        assert ProjectorFactor(a).pinv_frobenius_norm() == pytest.approx(expected, rel=1e-12)


class TestProjectFeasible:
    def test_fixes_feasible_points(self):
        rng = np.random.default_rng(3)
        a = unit_column_matrix(rng, 5, 12)
        proj = ProjectorFactor(a)
        s = rng.standard_normal(12)
        x = a @ s
        np.testing.assert_allclose(project_feasible(proj, s, x), s, atol=1e-12)

    def test_projection_of_origin_is_min_norm(self):
        rng = np.random.default_rng(4)
        a = unit_column_matrix(rng, 5, 12)
        x = rng.standard_normal(5)
        np.testing.assert_allclose(
            project_feasible(ProjectorFactor(a), np.zeros(12), x),
            min_norm_solution(a, x),
            atol=1e-13,
        )

    def test_against_explicit_formula_oracle(self):
        rng = np.random.default_rng(5)
        a = unit_column_matrix(rng, 5, 12)
        proj = ProjectorFactor(a)
        s = rng.standard_normal(12)
        x = rng.standard_normal(5)
        expected = s - a.T @ np.linalg.inv(a @ a.T) @ (a @ s - x)
        got = project_feasible(proj, s, x)
        assert np.linalg.norm(got - expected) <= 1e-10 * max(1.0, np.linalg.norm(expected))

    def test_idempotent(self):
        rng = np.random.default_rng(6)
        a = unit_column_matrix(rng, 5, 12)
        proj = ProjectorFactor(a)
        x = rng.standard_normal(5)
        once = project_feasible(proj, rng.standard_normal(12) * 5.0, x)
        twice = project_feasible(proj, once, x)
        assert np.linalg.norm(twice - once) <= 1e-10

    def test_feasibility_after_projection(self):
        rng = np.random.default_rng(7)
        a = unit_column_matrix(rng, 5, 12)
        proj = ProjectorFactor(a)
        x = rng.standard_normal(5)
        s = project_feasible(proj, rng.standard_normal(12), x)
        assert np.linalg.norm(a @ s - x) <= RESIDUAL_TOL * max(1.0, np.linalg.norm(x))


class TestCheckUrp:
    def test_identity(self):
        assert check_urp(np.eye(2)) is True

    def test_duplicate_columns(self):
        assert check_urp(np.array([[1.0, 1.0, 2.0], [1.0, 1.0, 3.0]])) is False

    @pytest.mark.parametrize("seed", range(10))
    def test_random_gaussian_matches_rank_oracle(self, seed):
        from itertools import combinations

        rng = np.random.default_rng(seed)
        a = rng.standard_normal((3, 6))
        oracle = all(
            np.linalg.matrix_rank(a[:, list(cols)]) == 3 for cols in combinations(range(6), 3)
        )
        assert check_urp(a) is oracle is True

    def test_too_many_columns(self):
        with pytest.raises(TooLarge):
            check_urp(np.random.default_rng(0).standard_normal((3, 25)))


class TestComputeM:
    def test_identity_2x2(self):
        # subsets {1}, {2}, {1,2} have left-inverse norms 1, 1, sqrt(2)
        assert compute_M(np.eye(2)) == pytest.approx(np.sqrt(2.0))

    def test_inverse_scaling(self):
        assert compute_M(2.0 * np.eye(2)) == pytest.approx(compute_M(np.eye(2)) / 2.0)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_enumeration_oracle(self, seed):
        a = unit_column_matrix(np.random.default_rng(seed), 3, 6)
        assert compute_M(a) == pytest.approx(max_left_inverse_norm(a), rel=1e-9)

    def test_not_urp(self):
        with pytest.raises(NotURP):
            compute_M(np.array([[1.0, 1.0, 2.0], [1.0, 1.0, 3.0]]))

    def test_guard(self):
        with pytest.raises(TooLarge):
            compute_M(np.random.default_rng(0).standard_normal((10, 50)))


def test_null_space_norm_bound():
    """Any null vector with at most n entries above alpha has norm below
    (M+1)·m·alpha."""
    rng = np.random.default_rng(11)
    a = unit_column_matrix(rng, 3, 6)
    big_m = compute_M(a)
    basis = scipy.linalg.null_space(a)
    for _ in range(100):
        v = basis @ rng.standard_normal(basis.shape[1])
        alpha = np.sort(np.abs(v))[::-1][3]  # (n+1)-th largest
        assert np.linalg.norm(v) < (big_m + 1.0) * 6 * alpha


def test_left_inverse_norm_oracle_self_check():
    # the normal-equation identity the oracle relies on
    sub = np.random.default_rng(12).standard_normal((5, 3))
    assert frobenius_left_inverse_norm(sub) == pytest.approx(np.linalg.norm(np.linalg.pinv(sub)), rel=1e-10)


class TestTextFormat:
    def test_matrix_round_trip(self, tmp_path):
        rng = np.random.default_rng(13)
        a = rng.standard_normal((4, 7)) * 10.0 ** rng.integers(-200, 200, size=(4, 7))
        path = tmp_path / "a.mat"
        save_matrix(path, a)
        np.testing.assert_array_equal(load_matrix(path), a)

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(
            st.floats(allow_nan=False, allow_infinity=False, width=64),
            min_size=1,
            max_size=12,
        )
    )
    def test_vector_round_trip_exact(self, values):
        import os
        import tempfile

        fd, path = tempfile.mkstemp()
        os.close(fd)
        try:
            save_vector(path, values)
            np.testing.assert_array_equal(load_vector(path), np.asarray(values, dtype=float))
        finally:
            os.unlink(path)

    def test_header_line(self, tmp_path):
        path = tmp_path / "a.mat"
        save_matrix(path, np.ones((2, 3)))
        assert path.read_text().splitlines()[0] == "2 3"

    @pytest.mark.parametrize(
        "text",
        [
            "",
            "2\n1 2\n3 4\n",
            "2 2\n1 2\n",
            "2 2\n1 2 3\n4 5\n",
            "2 2\n1 x\n3 4\n",
            "2 2\n1 nan\n3 4\n",
            "-1 2\n",
        ],
    )
    def test_malformed_files(self, tmp_path, text):
        path = tmp_path / "bad.mat"
        path.write_text(text)
        with pytest.raises(ParseError):
            load_matrix(path)

    def test_vector_requires_single_column(self, tmp_path):
        path = tmp_path / "a.mat"
        save_matrix(path, np.ones((2, 2)))
        with pytest.raises(ParseError):
            load_vector(path)
