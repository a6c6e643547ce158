"""Tests for nilpotent Lie algebras and their central towers."""

import pytest
import sympy

from rigidity_lab.core.nilpotent import (
    NilpotentAlgebra,
    center,
    central_series,
    check_automorphism,
    descend_automorphism,
    heisenberg,
    heisenberg_automorphism,
    layer_hyperbolicity,
    lower_central_series,
)
from rigidity_lab.errors import (
    BracketNotPreserved,
    DimensionMismatch,
    JacobiViolation,
    LatticeNotPreserved,
    LevelOutOfRange,
    NotNilpotent,
)


@pytest.fixture
def filiform() -> NilpotentAlgebra:
    """Four-dimensional filiform algebra [e0, e1] = e2, [e0, e2] = e3."""
    return NilpotentAlgebra.from_brackets(
        4,
        [
            {"i": 0, "j": 1, "coeffs": [0, 0, 1, 0]},
            {"i": 0, "j": 2, "coeffs": [0, 0, 0, 1]},
        ],
    )


class TestAlgebra:
    """Structure constants and validation."""

    def test_heisenberg_bracket(self):
        alg = heisenberg()
        e0, e1, e2 = (alg.basis_vector(i) for i in range(3))
        assert alg.bracket(e0, e1) == e2
        assert alg.bracket(e1, e0) == -e2
        assert alg.bracket(e0, e2) == sympy.zeros(3, 1)
        assert alg.structure_constant(0, 1, 2) == 1

    def test_rational_coefficients(self):
        alg = NilpotentAlgebra.from_brackets(3, [{"i": 0, "j": 1, "coeffs": [0, 0, "1/2"]}])
        assert alg.structure_constant(0, 1, 2) == sympy.Rational(1, 2)

    def test_index_out_of_range(self):
        with pytest.raises(DimensionMismatch):
            NilpotentAlgebra.from_brackets(3, [{"i": 0, "j": 3, "coeffs": [0, 0, 1]}])

    def test_coefficient_length(self):
        with pytest.raises(DimensionMismatch):
            NilpotentAlgebra.from_brackets(3, [{"i": 0, "j": 1, "coeffs": [0, 1]}])

    def test_inconsistent_antisymmetry(self):
        with pytest.raises(JacobiViolation):
            NilpotentAlgebra.from_brackets(
                3,
                [
                    {"i": 0, "j": 1, "coeffs": [0, 0, 1]},
                    {"i": 1, "j": 0, "coeffs": [0, 0, 1]},
                ],
            )

    def test_self_bracket_must_vanish(self):
        with pytest.raises(JacobiViolation):
            NilpotentAlgebra.from_brackets(2, [{"i": 1, "j": 1, "coeffs": [1, 0]}])

    def test_jacobi_identity(self):
        alg = NilpotentAlgebra.from_brackets(
            3,
            [
                {"i": 0, "j": 1, "coeffs": [0, 0, 1]},
                {"i": 1, "j": 2, "coeffs": [0, 1, 0]},
            ],
        )
        with pytest.raises(JacobiViolation) as excinfo:
            alg.validate()
        assert excinfo.value.details["triple"] == [0, 1, 2]


class TestTower:
    """Lower central series, centres and the tower of quotients."""

    def test_heisenberg_series(self):
        series = lower_central_series(heisenberg())
        assert [m.cols for m in series] == [3, 1, 0]

    def test_heisenberg_center(self):
        assert center(heisenberg()) == sympy.Matrix([0, 0, 1])

    def test_heisenberg_tower(self):
        tower = central_series(heisenberg())
        assert tower.degree == 2
        assert tower.center_dims == [1, 2]
        assert [layer.dim for layer in tower.layers] == [3, 2]

    def test_filiform_tower(self, filiform):
        tower = filiform.tower
        assert tower.degree == 3
        assert tower.center_dims == [1, 1, 2]

    def test_abelian_tower(self):
        tower = central_series(NilpotentAlgebra.from_brackets(2, []))
        assert tower.degree == 1
        assert tower.center_dims == [2]

    def test_not_nilpotent(self):
        alg = NilpotentAlgebra.from_brackets(2, [{"i": 0, "j": 1, "coeffs": [0, 1]}])
        with pytest.raises(NotNilpotent):
            lower_central_series(alg)
        with pytest.raises(NotNilpotent):
            central_series(alg)


class TestAutomorphisms:
    """Validation and descent of automorphisms."""

    def test_heisenberg_lift(self, cat_map):
        phi = heisenberg_automorphism(cat_map)
        assert phi == sympy.diag(sympy.Matrix(cat_map), 1)
        auto = check_automorphism(heisenberg(), phi)
        assert auto.matrix == phi

    def test_bracket_not_preserved(self):
        with pytest.raises(BracketNotPreserved):
            check_automorphism(heisenberg(), sympy.diag(2, 1, 1))

    def test_lattice_not_preserved(self):
        phi = sympy.diag(2, sympy.Rational(1, 2), 1)
        with pytest.raises(LatticeNotPreserved):
            check_automorphism(heisenberg(), phi)

    def test_wrong_dimension(self, cat_map):
        with pytest.raises(DimensionMismatch):
            check_automorphism(heisenberg(), cat_map)

    def test_descend_to_abelianization(self, cat_map):
        alg = heisenberg()
        phi = heisenberg_automorphism(cat_map)
        assert descend_automorphism(alg, phi, 0) == phi
        assert descend_automorphism(alg, phi, 1) == sympy.Matrix(cat_map)
        assert descend_automorphism(alg, phi, 2).shape == (0, 0)

    def test_level_out_of_range(self, cat_map):
        with pytest.raises(LevelOutOfRange):
            descend_automorphism(heisenberg(), heisenberg_automorphism(cat_map), 3)

    def test_heisenberg_lift_is_not_hyperbolic_on_center(self, cat_map):
        report = layer_hyperbolicity(heisenberg(), heisenberg_automorphism(cat_map))
        assert not report.hyperbolic
        assert [layer.hyperbolic for layer in report.layers] == [False, True]
        assert report.layers[0].center_moduli == pytest.approx([1.0])

    def test_abelian_layer_is_the_matrix(self, cat_map):
        alg = NilpotentAlgebra.from_brackets(2, [])
        report = layer_hyperbolicity(alg, cat_map)
        assert report.hyperbolic
        assert report.layers[0].center_dim == 2


# Heisenberg algebra in the basis b0 = e0, b1 = 3 e1 - e2, b2 = -2 e1 + e2; the centre is 2 b1 + 3 b2.
SKEWED_BASIS = sympy.Matrix([[1, 0, 0], [0, 3, -2], [0, -1, 1]])


@pytest.fixture
def skewed_heisenberg() -> NilpotentAlgebra:
    return NilpotentAlgebra.from_brackets(
        3,
        [
            {"i": 0, "j": 1, "coeffs": [0, 6, 9]},
            {"i": 0, "j": 2, "coeffs": [0, -4, -6]},
        ],
    )


def _random_unimodular(rng) -> sympy.Matrix:
    b = sympy.eye(2)
    for _ in range(int(rng.integers(1, 6))):
        k = int(rng.integers(-3, 4))
        step = sympy.Matrix([[1, k], [0, 1]]) if rng.random() < 0.5 else sympy.Matrix([[1, 0], [k, 1]])
        b = step * b
    if rng.random() < 0.3:
        b = sympy.Matrix([[0, 1], [1, 0]]) * b
    return b


class TestLatticeAdaptedQuotient:
    """Quotients by a centre that is not spanned by basis vectors."""

    def test_centre_is_not_coordinate_aligned(self, skewed_heisenberg):
        assert list(center(skewed_heisenberg)) == [0, 2, 3]

    def test_projection_is_integral_and_basis_is_unimodular(self, skewed_heisenberg):
        layer = skewed_heisenberg.tower.layers[0]
        assert all(x.is_integer for x in layer.projection)
        adapted = sympy.Matrix(layer.center_basis).row_join(sympy.Matrix(layer.section))
        assert adapted.det() in (1, -1)
        assert sympy.Matrix(layer.projection) * sympy.Matrix(layer.section) == sympy.eye(2)
        assert sympy.Matrix(layer.projection) * sympy.Matrix(layer.center_basis) == sympy.zeros(2, 1)

    def test_descended_automorphism_is_unimodular(self, skewed_heisenberg, cat_map):
        phi = SKEWED_BASIS.inv() * heisenberg_automorphism(cat_map) * SKEWED_BASIS
        induced = descend_automorphism(skewed_heisenberg, phi, 1)
        assert all(x.is_integer for x in induced)
        assert induced.det() == 1
        assert induced.trace() == 3
        report = layer_hyperbolicity(skewed_heisenberg, phi)
        assert [layer.hyperbolic for layer in report.layers] == [False, True]


class TestHeisenbergSweep:
    """No automorphism of the Heisenberg nilmanifold is hyperbolic on the centre."""

    @pytest.mark.slow
    def test_thousand_random_unimodular_matrices(self, rng):
        alg = heisenberg()
        for _ in range(1000):
            b = _random_unimodular(rng)
            report = layer_hyperbolicity(alg, heisenberg_automorphism(b))
            assert report.layers[0].center_moduli == pytest.approx([1.0])
            assert not report.hyperbolic
