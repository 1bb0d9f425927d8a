import numpy as np
import pytest

from dikin_accel import GeneralLP, LinearProgram, RandomLpSpec, phase1, random_dense_lp, standardize
from dikin_accel.model import InfeasibleBounds


def general(A, b, c, senses, lower=None, upper=None):
    n = len(c)
    return GeneralLP(
        np.atleast_2d(np.array(A, dtype=float)), np.array(b, dtype=float), np.array(c, dtype=float),
        senses=senses,
        lower=np.zeros(n) if lower is None else np.array(lower, dtype=float),
        upper=np.full(n, np.inf) if upper is None else np.array(upper, dtype=float),
    )


def test_linear_program_rejects_mismatched_shapes():
    with pytest.raises(ValueError):
        LinearProgram(np.ones((2, 3)), np.ones(3), np.ones(3))
    with pytest.raises(ValueError):
        LinearProgram(np.ones((2, 3)), np.ones(2), np.ones(2))


def test_linear_program_arrays_are_read_only(micro):
    with pytest.raises(ValueError):
        micro.A[0, 0] = 5.0


def test_standardize_le_row_gets_slack():
    lp, cmap = standardize(general([[1, 1]], [2], [1, 2], ["L"]))
    np.testing.assert_array_equal(lp.A, [[1, 1, 1]])
    np.testing.assert_array_equal(lp.b, [2])
    np.testing.assert_array_equal(lp.c, [1, 2, 0])
    assert lp.col_names[2].startswith("slack")
    assert cmap.num_structural == 2


def test_standardize_equality_form_is_identity():
    glp = general([[1, 2, 3], [0, 1, 4]], [5, 6], [1, -1, 2], ["E", "E"])
    lp, cmap = standardize(glp)
    np.testing.assert_array_equal(lp.A, glp.A)
    np.testing.assert_array_equal(lp.b, glp.b)
    np.testing.assert_array_equal(lp.c, glp.c)
    assert cmap.objective_offset == 0.0


def test_standardize_ge_row_surplus_residuals_agree():
    glp = general([[1, -1]], [1], [1, 1], ["G"])
    lp, cmap = standardize(glp)
    np.testing.assert_array_equal(lp.A, [[1, -1, -1]])
    np.testing.assert_array_equal(lp.b, [1])
    x_general = np.array([2.0, 0.0])
    x_std = np.array([2.0, 0.0, 1.0])
    assert glp.A @ x_general - glp.b == pytest.approx(lp.A @ x_std - lp.b + x_std[2])
    assert lp.residual(x_std) == 0.0
    np.testing.assert_allclose(cmap.embed(x_general, glp, lp), x_std)


def test_standardize_bounds_and_free_columns():
    # x1 in [1, 3], x2 free, x3 <= 4 (upper only), x4 fixed at 2
    glp = general(
        [[1, 1, 1, 1]], [6], [1, 2, 3, 4], ["E"],
        lower=[1, -np.inf, -np.inf, 2], upper=[3, np.inf, 4, 2],
    )
    lp, cmap = standardize(glp)
    assert {"x2+", "x2-"} <= set(lp.col_names)
    assert lp.num_rows == 2  # one upper-bound row for x1
    x_orig = np.array([2.0, -1.5, 3.5, 2.0])
    x_std = cmap.embed(x_orig, glp, lp)
    assert np.all(x_std >= 0)
    assert lp.residual(x_std) <= 1e-10 * (1 + np.linalg.norm(lp.b))
    np.testing.assert_allclose(cmap.recover(x_std), x_orig)
    assert lp.objective(x_std) + cmap.objective_offset == pytest.approx(glp.c @ x_orig)


def test_standardize_random_feasible_points_roundtrip():
    rng = np.random.default_rng(3)
    for _ in range(20):
        m, n = 3, 5
        A = rng.normal(size=(m, n))
        x = rng.normal(size=n)
        lower = np.where(rng.random(n) < 0.3, -np.inf, x - rng.random(n))
        upper = np.where(rng.random(n) < 0.5, np.inf, x + rng.random(n))
        senses = list(rng.choice(["L", "E", "G"], size=m))
        ax = A @ x
        b = ax + np.where(np.array(senses) == "L", 0.5, np.where(np.array(senses) == "G", -0.5, 0.0))
        glp = general(A, b, rng.normal(size=n), senses, lower, upper)
        lp, cmap = standardize(glp)
        xs = cmap.embed(x, glp, lp)
        assert np.all(xs >= -1e-12)
        assert lp.residual(xs) <= 1e-10 * (1 + np.linalg.norm(lp.b))
        np.testing.assert_allclose(cmap.recover(xs), x, atol=1e-12)


def test_standardize_contradictory_bounds():
    with pytest.raises(InfeasibleBounds):
        standardize(general([[1, 1]], [1], [1, 1], ["E"], lower=[2, 0], upper=[1, np.inf]))


def test_random_spec_validation():
    with pytest.raises(ValueError):
        RandomLpSpec(5, 5)
    with pytest.raises(ValueError):
        RandomLpSpec(2, 5, variance=0.0)
    with pytest.raises(ValueError):
        RandomLpSpec(2, 5, convex_lambda=1.5)
    with pytest.raises(ValueError):
        RandomLpSpec(2, 5, seed=-1)


def test_random_dense_lp_table_dimensions():
    lp, x0 = random_dense_lp(RandomLpSpec(400, 650, 7))
    assert lp.A.shape == (400, 650)
    assert x0.shape == (650,)


def test_random_dense_lp_deterministic():
    a = random_dense_lp(RandomLpSpec(8, 15, 11))
    b = random_dense_lp(RandomLpSpec(8, 15, 11))
    for u, v in [(a[0].A, b[0].A), (a[0].b, b[0].b), (a[0].c, b[0].c), (a[1], b[1])]:
        assert np.array_equal(u, v)
    c = random_dense_lp(RandomLpSpec(8, 15, 12))
    assert not np.array_equal(a[0].A, c[0].A)


def test_random_dense_lp_interior_start_for_many_seeds():
    for seed in range(100):
        lp, x0 = random_dense_lp(RandomLpSpec(6, 11, seed))
        assert np.all(x0 > 0)
        assert lp.residual(x0) <= 1e-10 * (1 + np.linalg.norm(lp.b))


def test_random_dense_lp_moments():
    lp, _ = random_dense_lp(RandomLpSpec(200, 300, 5))
    assert lp.A.mean() == pytest.approx(-9.0, abs=0.05)
    assert lp.A.var() == pytest.approx(9.0, rel=0.02)


def test_phase1_not_needed_when_e_feasible(micro):
    p = phase1(micro)
    assert p.artificial_index is None
    np.testing.assert_array_equal(p.x0, [1, 1])
    assert p.augmented_lp is micro


def test_phase1_adds_artificial_column():
    lp = LinearProgram(np.array([[1.0, 1.0]]), np.array([3.0]), np.array([1.0, 2.0]))
    p = phase1(lp)
    assert p.artificial_index == 2
    np.testing.assert_array_equal(p.augmented_lp.A, [[1, 1, 1]])
    np.testing.assert_array_equal(p.x0, [1, 1, 1])
    assert p.augmented_lp.A @ p.x0 == pytest.approx([3.0])
    assert p.big_m == 2e6
    assert p.augmented_lp.c[-1] == p.big_m


def test_phase1_start_is_feasible_on_random_systems():
    rng = np.random.default_rng(0)
    for _ in range(20):
        A = rng.normal(size=(4, 7))
        lp = LinearProgram(A, rng.normal(size=4) * 10, rng.normal(size=7))
        p = phase1(lp)
        aug = p.augmented_lp
        assert np.all(p.x0 > 0)
        assert aug.residual(p.x0) <= 1e-12 * (1 + np.linalg.norm(aug.b))
        np.testing.assert_allclose(aug.A[:, -1], lp.b - lp.A @ np.ones(7))
