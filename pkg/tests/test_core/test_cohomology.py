"""Tests for twisted cochains and the lifting solver."""

import pytest
import sympy

from rigidity_lab.core.cohomology import (
    AffineLift,
    Cochain,
    GroupPresentation,
    Representation,
    TwistedSystem,
    coboundary,
    coboundary_eval,
    cocycle_defect,
    corrected_defect,
    free_reduce,
    pairwise_defect,
    relator_equation,
    solve_lifting,
    vector_to_json,
    word_defect,
)
from rigidity_lab.errors import (
    DimensionMismatch,
    InputError,
    NotInvertible,
    UnknownGenerator,
)

A = ((0, 1),)
B = ((1, 1),)
SHEAR = [[1, 1], [0, 1]]


@pytest.fixture
def z2() -> GroupPresentation:
    """Z^2 = <a, b | a b a^-1 b^-1>."""
    return GroupPresentation.from_document({"generators": ["a", "b"], "relators": [["a", "b", "a^-1", "b^-1"]]})


@pytest.fixture
def cat_system(z2, cat_map) -> TwistedSystem:
    return TwistedSystem.build(z2, {"a": cat_map, "b": cat_map}, defects=[[1, 0]])


def vector(*entries) -> sympy.ImmutableMatrix:
    return sympy.ImmutableMatrix([sympy.Rational(x) for x in entries])


def _random_unimodular(rng) -> sympy.Matrix:
    m = sympy.eye(2)
    for _ in range(3):
        k = int(rng.integers(-2, 3))
        m = m * (sympy.Matrix([[1, k], [0, 1]]) if rng.random() < 0.5 else sympy.Matrix([[1, 0], [k, 1]]))
    return m


def _random_word(rng) -> tuple:
    return tuple((int(rng.integers(0, 2)), int(rng.choice([-1, 1]))) for _ in range(int(rng.integers(0, 5))))


class TestWords:
    """Presentations and word parsing."""

    def test_free_reduce(self):
        assert free_reduce([(0, 1), (1, 1), (1, -1), (0, -1), (0, 1)]) == ((0, 1),)

    def test_parse_word(self, z2):
        assert z2.parse_word(["a", "b^-1", 2, -1]) == ((0, 1), (1, -1), (1, 1), (0, -1))
        assert z2.parse_word(["a^3"]) == ((0, 1),) * 3
        assert z2.format_word(((0, 1), (1, -1))) == ["a", "b^-1"]

    def test_relators_are_freely_reduced(self):
        pres = GroupPresentation.from_document({"generators": ["a"], "relators": [["a", "a^-1"]]})
        assert pres.relators == ((),)

    def test_unknown_generator(self, z2):
        with pytest.raises(UnknownGenerator):
            z2.parse_word(["c"])
        with pytest.raises(UnknownGenerator):
            z2.parse_word([3])

    def test_unparsable_token(self, z2):
        with pytest.raises(InputError):
            z2.parse_word(["a^^2"])

    def test_duplicate_generators(self):
        with pytest.raises(InputError):
            GroupPresentation(generators=("a", "a"), relators=())


class TestRepresentation:
    """Matrices attached to the generators."""

    def test_word_evaluation(self, cat_map):
        rho = Representation.of([cat_map, SHEAR])
        assert rho(((0, 1), (0, -1))) == sympy.eye(2)
        assert rho(((0, 1), (1, 1))) == sympy.Matrix(cat_map) * sympy.Matrix(SHEAR)

    def test_singular_matrix(self):
        with pytest.raises(NotInvertible):
            Representation.of([[[1, 2], [2, 4]]])

    def test_mixed_sizes(self, cat_map):
        with pytest.raises(DimensionMismatch):
            Representation.of([cat_map, [[1]]])


class TestCoboundary:
    """The twisted coboundary operator."""

    def test_constant_cochain_with_trivial_action(self):
        rho = Representation.trivial(1, 2)
        assert coboundary_eval(rho, 0, Cochain.constant([3, 4]), [A]) == vector(0, 0)

    def test_degree_one_example(self, cat_map):
        rho = Representation.of([cat_map])
        f = Cochain(degree=1, dim=2, table={(A,): vector(1, 0)})
        assert coboundary_eval(rho, 1, f, [A, A]) == vector(3, 1)

    def test_d_squared_vanishes(self, cat_map):
        rho = Representation.of([cat_map, SHEAR])
        ddf = coboundary(rho, coboundary(rho, Cochain.constant([2, -1])))
        for pair in [(A, B), (B, A), (A + B, ((1, -1),)), ((), A)]:
            assert ddf(*pair) == vector(0, 0)

    @pytest.mark.parametrize("k", [0, 1])
    def test_d_squared_vanishes_on_random_instances(self, rng, k):
        for _ in range(100):
            rho = Representation.of([_random_unimodular(rng), _random_unimodular(rng)])
            if k == 0:
                f = Cochain.constant([int(x) for x in rng.integers(-5, 6, size=2)])
            else:
                f = Cochain.from_function(1, 2, lambda _key: vector(*(int(x) for x in rng.integers(-5, 6, size=2))))
            ddf = coboundary(rho, coboundary(rho, f))
            words = [_random_word(rng) for _ in range(k + 2)]
            assert ddf(*words) == vector(0, 0)

    def test_degree_mismatch(self, cat_map):
        rho = Representation.of([cat_map])
        with pytest.raises(DimensionMismatch):
            coboundary_eval(rho, 1, Cochain.constant([1, 0]), [A, A])

    def test_defect_of_any_lift_table_is_a_cocycle(self, cat_map):
        rho = Representation.of([cat_map, SHEAR])

        def lifts(word):
            shift = vector(len(word), sum(e for _, e in word))
            return AffineLift(matrix=rho(word), translation=shift)

        assert pairwise_defect(lifts, A, B) != vector(0, 0)
        for triple in [(A, B, A), (B, B, A), (A + B, A, ((0, -1),))]:
            assert cocycle_defect(rho, lifts, triple) == vector(0, 0)

    def test_linear_parts_must_be_multiplicative(self, cat_map):
        rho = Representation.of([cat_map])

        def lifts(word):
            matrix = rho(word) if len(word) <= 1 else sympy.ImmutableMatrix.eye(2)
            return AffineLift(matrix=matrix, translation=vector(0, 0))

        with pytest.raises(InputError):
            pairwise_defect(lifts, A, A)


class TestRelators:
    """Word defects and relator equations."""

    def test_word_defect_basics(self, cat_system):
        assert word_defect(cat_system, ()) == vector(0, 0)
        assert word_defect(cat_system, A) == vector(0, 0)

    def test_word_defect_of_relator(self, cat_system):
        relator = cat_system.presentation.relators[0]
        assert word_defect(cat_system, relator) == vector(1, 0)
        assert word_defect(cat_system, ((1, 1), (0, 1), (1, -1), (0, -1))) == vector(-1, 0)

    def test_commutator_equation(self, z2, cat_map):
        a = sympy.Matrix(cat_map)
        b = a**2
        system = TwistedSystem.build(z2, [a, b], defects=[[0, 5]])
        equation = relator_equation(system, 0)
        assert equation.coefficients[0] == sympy.eye(2) - b
        assert equation.coefficients[1] == a - sympy.eye(2)
        assert equation.rhs == vector(0, -5)

    def test_power_relator_with_trivial_action(self):
        pres = GroupPresentation.from_document({"generators": ["a"], "relators": [["a^3"]]})
        system = TwistedSystem.build(pres, [[[1, 0], [0, 1]]])
        assert relator_equation(system, 0).coefficients[0] == 3 * sympy.eye(2)

    def test_relator_lookup(self, cat_system):
        assert relator_equation(cat_system, cat_system.presentation.relators[0]).relator == 0
        with pytest.raises(InputError):
            relator_equation(cat_system, 4)
        with pytest.raises(InputError):
            relator_equation(cat_system, A)


class TestLifting:
    """The presentation-level lifting solve."""

    def test_free_group(self):
        pres = GroupPresentation.from_document({"generators": ["a", "b"]})
        solution = solve_lifting(TwistedSystem.build(pres, [SHEAR, SHEAR]))
        assert solution.solvable
        assert solution.q == 1
        assert solution.eta == (vector(0, 0), vector(0, 0))

    def test_z2_with_cat_map(self, cat_system):
        solution = solve_lifting(cat_system)
        assert solution.status == "SOLVED"
        assert solution.q == 1
        assert solution.lifts_on_gamma
        assert solution.free_parameters == 2
        assert corrected_defect(cat_system, solution.eta) == (vector(0, 0),)

    def test_z2_with_trivial_action_is_obstructed(self, z2):
        system = TwistedSystem.build(z2, [[[1, 0], [0, 1]]] * 2, defects=[[1, 0]])
        solution = solve_lifting(system)
        assert solution.status == "UNSOLVABLE"
        assert solution.eta is None
        assert not solution.solvable

    def test_fractional_correction(self, z2):
        system = TwistedSystem.build(z2, [[[3]], [[1]]], defects=[[1]])
        solution = solve_lifting(system)
        assert solution.q == 2
        assert not solution.lifts_on_gamma
        assert solution.eta_mod_one[1] == vector("1/2")

    def test_zero_correction_keeps_defects(self, cat_system):
        assert corrected_defect(cat_system, {"a": [0, 0]}) == (vector(1, 0),)

    def test_conjugated_system_stays_solvable(self, cat_system):
        solution = solve_lifting(cat_system)
        p = sympy.Matrix(SHEAR)
        conjugated = cat_system.conjugate(p)
        assert solve_lifting(conjugated).solvable
        moved = [p * v for v in solution.eta]
        assert corrected_defect(conjugated, moved) == (vector(0, 0),)

    def test_unique_correction_is_conjugation_covariant(self, cat_map):
        pres = GroupPresentation.from_document({"generators": ["a"], "relators": [["a^3"]]})
        system = TwistedSystem.build(pres, [[[1, 0], [0, 1]]], defects=[[1, 2]])
        solution = solve_lifting(system)
        assert solution.free_parameters == 0
        assert solution.eta == (vector("-1/3", "-2/3"),)
        p = sympy.Matrix(cat_map)
        conjugated = solve_lifting(system.conjugate(p))
        assert conjugated.eta == (sympy.ImmutableMatrix(p * solution.eta[0]),)
        assert conjugated.q == solution.q == 3

    def test_build_checks_generators(self, z2, cat_map):
        with pytest.raises(UnknownGenerator):
            TwistedSystem.build(z2, {"a": cat_map, "c": cat_map})
        with pytest.raises(InputError):
            TwistedSystem.build(z2, {"a": cat_map})
        with pytest.raises(DimensionMismatch):
            TwistedSystem.build(z2, [cat_map, cat_map], defects=[[1, 0], [0, 1]])

    def test_vector_to_json(self):
        assert vector_to_json(vector(1, "1/2", -3)) == [1, "1/2", -3]
