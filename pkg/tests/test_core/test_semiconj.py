"""Tests for the toral semiconjugacy solver."""

import time

import numpy as np
import pytest

from rigidity_lab.core.semiconj import (
    ConjugatedField,
    PeriodicDisplacement,
    ToralMap,
    TrigField,
    ZeroField,
    field_from_spec,
    grid_nodes,
    holder_exponent_estimate,
    linear_data,
    picard_semiconjugacy,
    residual,
    solve_semiconjugacy,
    torus_distance,
    verification_points,
)
from rigidity_lab.errors import (
    Budget,
    DimensionMismatch,
    InputError,
    InsufficientSamples,
    NotHyperbolic,
)


@pytest.fixture
def wobble() -> TrigField:
    """u(x) = 0.05 (sin 2 pi x_2, 0)."""
    return TrigField.from_spec({"modes": [{"k": [0, 1], "amp": [0.05, 0.0]}]})


class TestFields:
    """Periodic perturbations."""

    def test_trig_field_values(self, wobble):
        values = wobble(np.array([[0.3, 0.25], [0.0, 0.0]]))
        np.testing.assert_allclose(values, [[0.05, 0.0], [0.0, 0.0]], atol=1e-15)
        assert wobble.sup_norm == pytest.approx(0.05)

    def test_trig_field_jacobian(self, wobble):
        jac = wobble.jacobian(np.array([[0.0, 0.0]]))
        np.testing.assert_allclose(jac[0], [[0.0, 0.1 * np.pi], [0.0, 0.0]])

    def test_trig_field_mode_dimension(self):
        with pytest.raises(DimensionMismatch):
            TrigField.from_spec({"modes": [{"k": [1], "amp": [0.1, 0.0]}]})

    def test_trig_field_phase(self):
        with pytest.raises(InputError):
            TrigField.from_spec({"modes": [{"k": [1, 0], "amp": [0.1, 0.0], "phase": "tan"}]})

    def test_grid_field_is_periodic(self, wobble):
        grid = PeriodicDisplacement.sample(wobble, 16, 2)
        assert grid.grid_shape == (16, 16)
        np.testing.assert_allclose(grid(np.array([[0.0, 1.0]])), grid(np.array([[0.0, 0.0]])), atol=1e-15)
        np.testing.assert_allclose(grid(grid_nodes(16, 2)), wobble(grid_nodes(16, 2)), atol=1e-15)

    def test_field_from_spec(self, wobble):
        assert isinstance(field_from_spec({"modes": [{"k": [0, 1], "amp": [0.05, 0]}]}, 2), TrigField)
        assert isinstance(field_from_spec({"zero": True}, 2), ZeroField)
        assert isinstance(field_from_spec({}, 2), ZeroField)
        values = np.zeros((4, 4, 2)).tolist()
        assert isinstance(field_from_spec({"values": values}, 2), PeriodicDisplacement)

    def test_field_from_spec_rejects_bad_documents(self):
        with pytest.raises(DimensionMismatch):
            field_from_spec({"values": np.zeros((4, 2)).tolist()}, 2)
        with pytest.raises(InputError):
            field_from_spec({"amplitude": 1}, 2)

    def test_torus_distance_wraps(self):
        assert torus_distance(np.array([[0.95, 0.0]]), np.array([[0.05, 0.0]]))[0] == pytest.approx(0.1)


class TestToralMap:
    """The perturbed map and its inverse."""

    def test_preimage_inverts_forward(self, cat_map, wobble, rng):
        toral = ToralMap(matrix=np.array(cat_map, dtype=float), field=wobble)
        y = rng.random((50, 2))
        x = toral.preimage(y)
        assert np.max(torus_distance(toral.forward(x), y)) < 1e-10

    def test_linear_data_recovers_matrix(self, cat_map, wobble):
        a = np.array(cat_map, dtype=float)
        matrix, u = linear_data(lambda p: p @ a.T + wobble(p), 2)
        assert matrix == cat_map
        points = grid_nodes(4, 2)
        np.testing.assert_allclose(u(points), wobble(points), atol=1e-12)

    def test_linear_data_rejects_non_integer_action(self):
        with pytest.raises(InputError):
            linear_data(lambda p: 1.5 * p, 2)


class TestSolver:
    """Series and Picard solutions of A h = h f."""

    def test_zero_perturbation(self, cat_map):
        solution = solve_semiconjugacy(cat_map, ZeroField(dim=2), grid=8)
        assert solution.series_terms_used == 0
        assert solution.residual_sup == 0.0
        assert np.all(solution.grid_field.values == 0.0)
        assert solution.grid_residual_sup == 0.0

    def test_perturbed_cat_map(self, cat_map, wobble):
        solution = solve_semiconjugacy(cat_map, wobble, tol=1e-8, grid=16)
        assert solution.residual_sup <= 1e-8
        assert solution.series_terms_used > 0
        assert solution.grid_shape == (16, 16)
        assert solution.verification_nodes == 32 * 32

    def test_residual_on_fresh_samples(self, cat_map, wobble, rng):
        solution = solve_semiconjugacy(cat_map, wobble, tol=1e-8, grid=8)
        assert residual(cat_map, wobble, solution.evaluate, rng.random((500, 2))) <= 1e-8

    def test_series_and_picard_agree(self, cat_map, wobble, rng):
        solution = solve_semiconjugacy(cat_map, wobble, tol=1e-8, grid=8)
        points = rng.random((20, 2))
        picard = picard_semiconjugacy(cat_map, wobble, points, tol=1e-8)
        np.testing.assert_allclose(picard, solution.evaluate(points), atol=1e-7)

    def test_recovers_known_conjugacy(self, cat_map, rng):
        t = TrigField.from_spec({"modes": [{"k": [1, 0], "amp": [0.0, 0.01]}]})
        u = ConjugatedField(matrix=np.array(cat_map, dtype=float), t=t)
        solution = solve_semiconjugacy(cat_map, u, tol=1e-9, grid=8)
        points = rng.random((50, 2))
        h = points + solution.evaluate(points)
        assert np.max(torus_distance(h, u.inverse_conjugacy(points))) <= 1e-6

    def test_budget(self, cat_map, wobble):
        with pytest.raises(Budget) as excinfo:
            solve_semiconjugacy(cat_map, wobble, tol=1e-8, max_terms=2, grid=8)
        assert excinfo.value.details["max_terms"] == 2

    def test_not_hyperbolic(self):
        with pytest.raises(NotHyperbolic):
            solve_semiconjugacy([[1, 1], [0, 1]], ZeroField(dim=2), grid=8)

    def test_dimension_mismatch(self, cat_map):
        with pytest.raises(DimensionMismatch):
            solve_semiconjugacy(cat_map, ZeroField(dim=3), grid=8)

    def test_grid_limit(self, cat_map):
        with pytest.raises(InputError):
            solve_semiconjugacy(cat_map, ZeroField(dim=2), grid=0)

    def test_verification_subsample(self):
        points = verification_points(1024, 2, seed=3)
        assert points.shape == (2**18, 2)
        np.testing.assert_array_equal(points, verification_points(1024, 2, seed=3))


class TestSolutionChecks:
    """Residuals of the returned corrector, refinement and periodicity."""

    def test_residual_is_measured_on_returned_corrector(self, cat_map, wobble):
        solution = solve_semiconjugacy(cat_map, wobble, tol=1e-8, grid=16)
        direct = residual(cat_map, wobble, solution.w, solution.verification)
        assert solution.residual_sup == pytest.approx(direct, abs=1e-12)
        assert direct <= 1e-8

    def test_grid_residual_shrinks_under_refinement(self, cat_map, wobble):
        """The corrector is only Holder, so a doubling gains less than a factor 2; two doublings gain more."""
        residuals = [solve_semiconjugacy(cat_map, wobble, tol=1e-8, grid=n).grid_residual_sup for n in (16, 32, 64)]
        assert residuals[0] > residuals[1] > residuals[2]
        assert residuals[2] <= 0.5 * residuals[0]

    def test_grid_residual_halves_for_smooth_corrector(self, cat_map):
        t = TrigField.from_spec({"modes": [{"k": [1, 0], "amp": [0.0, 0.01]}]})
        u = ConjugatedField(matrix=np.array(cat_map, dtype=float), t=t)
        coarse = solve_semiconjugacy(cat_map, u, tol=1e-9, grid=8).grid_residual_sup
        fine = solve_semiconjugacy(cat_map, u, tol=1e-9, grid=16).grid_residual_sup
        assert fine <= 0.5 * coarse

    def test_corrector_is_periodic(self, cat_map, wobble, rng):
        solution = solve_semiconjugacy(cat_map, wobble, tol=1e-8, grid=16)
        points = rng.random((100, 2))
        for shift in ([1.0, 0.0], [0.0, 1.0], [-2.0, 3.0]):
            np.testing.assert_allclose(solution.w(points + shift), solution.w(points), atol=1e-10)

    def test_grid_field_agrees_on_identified_boundary_nodes(self, cat_map, wobble):
        grid = solve_semiconjugacy(cat_map, wobble, tol=1e-8, grid=16).grid_field
        edge = np.linspace(0.0, 1.0, 17)
        left = np.stack([np.zeros(17), edge], axis=-1)
        bottom = np.stack([edge, np.zeros(17)], axis=-1)
        np.testing.assert_allclose(grid(left + [1.0, 0.0]), grid(left), atol=1e-14)
        np.testing.assert_allclose(grid(bottom + [0.0, 1.0]), grid(bottom), atol=1e-14)

    @pytest.mark.slow
    def test_full_resolution_run(self, cat_map, wobble):
        """512 x 512 solve grid with the subsampled verification set."""
        started = time.perf_counter()
        solution = solve_semiconjugacy(cat_map, wobble, tol=1e-8, grid=512)
        elapsed = time.perf_counter() - started
        assert solution.residual_sup <= 1e-8
        assert solution.verification_nodes == 2**18
        assert elapsed < 10
        points = np.random.default_rng(5).random((64, 2))
        picard = picard_semiconjugacy(cat_map, wobble, points, tol=1e-8)
        assert np.max(np.abs(picard - solution.evaluate(points))) <= 1e-7


class TestDiagnostics:
    """Residual oracle and Holder estimate."""

    def test_residual_of_zero_corrector_is_sup_of_u(self, cat_map, wobble, rng):
        samples = rng.random((200, 2))
        expected = np.max(np.linalg.norm(wobble(samples), axis=1))
        assert residual(cat_map, wobble, np.zeros_like, samples) == pytest.approx(expected)

    def test_residual_dimension_mismatch(self, cat_map):
        with pytest.raises(DimensionMismatch):
            residual(cat_map, ZeroField(dim=3), np.zeros_like, np.zeros((1, 2)))

    def test_identity_is_lipschitz(self, cat_map):
        exponent = holder_exponent_estimate(np.zeros_like, cat_map, ZeroField(dim=2))
        assert exponent == pytest.approx(1.0, abs=1e-6)

    def test_perturbed_exponent_range(self, cat_map, wobble):
        solution = solve_semiconjugacy(cat_map, wobble, tol=1e-8, grid=8)
        exponent = holder_exponent_estimate(solution.evaluate, cat_map, wobble)
        assert 0.5 < exponent < 1.05

    def test_insufficient_samples(self, cat_map):
        with pytest.raises(InsufficientSamples):
            holder_exponent_estimate(np.zeros_like, cat_map, ZeroField(dim=2), pair_samples=4)
