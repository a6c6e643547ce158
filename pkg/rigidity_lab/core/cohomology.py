"""Twisted cochains and lifting obstructions over finitely presented groups.

Words are tuples of letters ``(generator, exponent)`` with exponent +1 or -1.
A representation rho extends to words multiplicatively, psi(w1 w2) =
psi(w1) psi(w2). All arithmetic is exact over the rationals.

Lifting is solved relative to the presentation. Correcting the lift of each
generator s by a translation eta(s) changes the defect of a relator r by the
translation part T(r) of the composed affine maps (rho(s), eta(s)), which
accumulates as

    T(w s)    = T(w) + psi(w) eta(s)
    T(w s^-1) = T(w) - psi(w s^-1) eta(s)

and the corrected lifts satisfy the relations exactly when D(r) + T(r) = 0
for every relator.
"""

import math
import re
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Literal, final

import sympy
from fastmcp.utilities.logging import get_logger

from rigidity_lab.config import parallel_map
from rigidity_lab.core.matrix_core import MatrixLike, as_exact_matrix, exact_entry
from rigidity_lab.errors import (
    DimensionMismatch,
    InputError,
    NotInvertible,
    UnknownGenerator,
)

logger = get_logger(__name__)

Letter = tuple[int, int]
Word = tuple[Letter, ...]
Vector = sympy.ImmutableMatrix

_TOKEN = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\^\s*([+-]?\d+))?\s*$")


def free_reduce(word: Iterable[Letter]) -> Word:
    """Cancel adjacent letter pairs s s^-1 until none remain."""
    stack: list[Letter] = []
    for letter in word:
        if stack and stack[-1][0] == letter[0] and stack[-1][1] == -letter[1]:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


def inverse_word(word: Word) -> Word:
    return tuple((g, -e) for g, e in reversed(word))


def concat(*words: Word) -> Word:
    return free_reduce(letter for w in words for letter in w)


def zero_vector(dim: int) -> Vector:
    return sympy.ImmutableMatrix.zeros(dim, 1)


def as_vector(values: Sequence[Any] | sympy.MatrixBase, dim: int | None = None) -> Vector:
    """Exact column vector from rational-like entries."""
    if isinstance(values, sympy.MatrixBase):
        vec = sympy.ImmutableMatrix(values.reshape(len(values), 1))
    else:
        vec = sympy.ImmutableMatrix([exact_entry(v) for v in values])
    if dim is not None and vec.rows != dim:
        raise DimensionMismatch(f"expected a vector of length {dim}, got {vec.rows}", expected=dim, got=vec.rows)
    return vec


@final
@dataclass(frozen=True)
class GroupPresentation:
    """Generators and freely reduced relators."""

    generators: tuple[str, ...]
    relators: tuple[Word, ...]

    def __post_init__(self) -> None:
        if len(set(self.generators)) != len(self.generators):
            raise InputError("generator names must be distinct", generators=list(self.generators))
        for r in self.relators:
            self.check_word(r)
        object.__setattr__(self, "relators", tuple(free_reduce(r) for r in self.relators))

    @property
    def rank(self) -> int:
        return len(self.generators)

    def check_word(self, word: Iterable[Letter]) -> Word:
        """Validate letter indices and exponents.

        Raises:
            UnknownGenerator: If a letter refers to no generator
        """
        checked = tuple(word)
        for g, e in checked:
            if not 0 <= g < self.rank:
                raise UnknownGenerator(f"generator index {g} out of range", index=g, rank=self.rank)
            if e not in (1, -1):
                raise InputError(f"letter exponent must be 1 or -1, got {e}", exponent=e)
        return checked

    def parse_word(self, tokens: Iterable[str | int]) -> Word:
        """Parse tokens such as ``"a"``, ``"b^-1"`` or signed 1-based indices.

        Powers like ``"a^3"`` expand to repeated letters.

        Raises:
            UnknownGenerator: For unknown names or indices
        """
        letters: list[Letter] = []
        index = {name: i for i, name in enumerate(self.generators)}
        for token in tokens:
            if isinstance(token, int) and not isinstance(token, bool):
                if token == 0 or abs(token) > self.rank:
                    raise UnknownGenerator(f"generator index {token} out of range", index=token)
                letters.append((abs(token) - 1, 1 if token > 0 else -1))
                continue
            match = _TOKEN.match(str(token))
            if match is None:
                raise InputError(f"cannot parse letter '{token}'", token=str(token))
            name, power = match.group(1), int(match.group(2) or 1)
            if name not in index:
                raise UnknownGenerator(f"unknown generator '{name}'", generator=name)
            sign = 1 if power > 0 else -1
            letters.extend([(index[name], sign)] * abs(power))
        return tuple(letters)

    def format_word(self, word: Word) -> list[str]:
        return [self.generators[g] if e == 1 else f"{self.generators[g]}^-1" for g, e in word]

    @classmethod
    def from_document(cls, doc: Mapping[str, Any]) -> "GroupPresentation":
        """Build from ``{"generators": [...], "relators": [[...], ...]}``."""
        generators = tuple(str(g) for g in doc.get("generators", []))
        base = cls(generators=generators, relators=())
        relators = tuple(base.parse_word(r) for r in doc.get("relators", []))
        return cls(generators=generators, relators=relators)


@final
@dataclass(frozen=True, eq=False)
class Representation:
    """Invertible rational matrices attached to the generators."""

    matrices: tuple[sympy.ImmutableMatrix, ...]
    dim: int

    def __post_init__(self) -> None:
        for i, m in enumerate(self.matrices):
            if m.shape != (self.dim, self.dim):
                raise DimensionMismatch(
                    f"matrix of generator {i} is not {self.dim}x{self.dim}",
                    generator=i,
                    dim=self.dim,
                )
            if m.det() == 0:
                raise NotInvertible(f"matrix of generator {i} is singular", generator=i)

    @classmethod
    def of(cls, matrices: Sequence[MatrixLike]) -> "Representation":
        exact = [sympy.ImmutableMatrix(as_exact_matrix(m)) for m in matrices]
        dims = {m.rows for m in exact}
        if len(dims) > 1:
            raise DimensionMismatch("representation matrices differ in size", dims=sorted(dims))
        return cls(matrices=tuple(exact), dim=dims.pop() if dims else 0)

    @classmethod
    def trivial(cls, generators: int, dim: int) -> "Representation":
        return cls(matrices=(sympy.ImmutableMatrix.eye(dim),) * generators, dim=dim)

    @cached_property
    def inverses(self) -> tuple[sympy.ImmutableMatrix, ...]:
        return tuple(sympy.ImmutableMatrix(m.inv()) for m in self.matrices)

    def letter(self, letter: Letter) -> sympy.ImmutableMatrix:
        g, e = letter
        if not 0 <= g < len(self.matrices):
            raise UnknownGenerator(f"generator index {g} out of range", index=g)
        return self.matrices[g] if e == 1 else self.inverses[g]

    def __call__(self, word: Word) -> sympy.ImmutableMatrix:
        result = sympy.eye(self.dim)
        for letter in word:
            result = result * self.letter(letter)
        return sympy.ImmutableMatrix(result)

    def conjugate(self, p: MatrixLike) -> "Representation":
        """P rho P^-1."""
        pm = as_exact_matrix(p)
        p_inv = pm.inv()
        return Representation(
            matrices=tuple(sympy.ImmutableMatrix(pm * m * p_inv) for m in self.matrices),
            dim=self.dim,
        )


@final
@dataclass(frozen=True, eq=False)
class Cochain:
    """A k-cochain: a lazily evaluated map from k-tuples of words to vectors.

    Values come from ``table`` (keys are tuples of freely reduced words) and,
    for tuples not in the table, from ``rule``; without a rule they are zero.
    """

    degree: int
    dim: int
    table: dict[tuple[Word, ...], Vector] = field(default_factory=dict)
    rule: Callable[[tuple[Word, ...]], Vector] | None = None

    @classmethod
    def constant(cls, v: Sequence[Any] | sympy.MatrixBase) -> "Cochain":
        vec = as_vector(v)
        return cls(degree=0, dim=vec.rows, table={(): vec})

    @classmethod
    def from_function(
        cls, degree: int, dim: int, fn: Callable[[tuple[Word, ...]], Vector]
    ) -> "Cochain":
        return cls(degree=degree, dim=dim, rule=fn)

    def __call__(self, *words: Word) -> Vector:
        if len(words) != self.degree:
            raise DimensionMismatch(
                f"{self.degree}-cochain evaluated on {len(words)} words",
                degree=self.degree,
                got=len(words),
            )
        key = tuple(free_reduce(w) for w in words)
        if key in self.table:
            return self.table[key]
        if self.rule is not None:
            value = as_vector(self.rule(key), self.dim)
            self.table[key] = value
            return value
        return zero_vector(self.dim)


def coboundary_eval(rho: Representation, k: int, f: Cochain, words: Sequence[Word]) -> Vector:
    """Evaluate the twisted coboundary of a k-cochain on k+1 words.

    (d f)(g_1..g_{k+1}) = rho(g_1) f(g_2..g_{k+1})
                          + sum_j (-1)^j f(.., g_j g_{j+1}, ..)
                          + (-1)^{k+1} f(g_1..g_k)

    Raises:
        DimensionMismatch: If degrees, tuple length or dimensions disagree
    """
    if f.degree != k or len(words) != k + 1:
        raise DimensionMismatch(
            f"coboundary of degree {k} needs a {k}-cochain and {k + 1} words",
            degree=k,
            cochain_degree=f.degree,
            words=len(words),
        )
    if f.dim != rho.dim:
        raise DimensionMismatch("cochain and representation dimensions differ", expected=rho.dim, got=f.dim)
    g = [free_reduce(w) for w in words]
    total = rho(g[0]) * f(*g[1:])
    for j in range(1, k + 1):
        merged = g[: j - 1] + [concat(g[j - 1], g[j])] + g[j + 1 :]
        total += (-1) ** j * f(*merged)
    total += (-1) ** (k + 1) * f(*g[:k])
    return sympy.ImmutableMatrix(total)


def coboundary(rho: Representation, f: Cochain) -> Cochain:
    """The (k+1)-cochain d f, evaluated lazily."""
    return Cochain.from_function(f.degree + 1, f.dim, lambda key: coboundary_eval(rho, f.degree, f, key))


@final
@dataclass(frozen=True, eq=False)
class AffineLift:
    """x -> Mx + t over the rationals."""

    matrix: sympy.ImmutableMatrix
    translation: Vector

    @classmethod
    def identity(cls, dim: int) -> "AffineLift":
        return cls(matrix=sympy.ImmutableMatrix.eye(dim), translation=zero_vector(dim))

    def compose(self, other: "AffineLift") -> "AffineLift":
        """self after other: (M1, t1)(M2, t2) = (M1 M2, M1 t2 + t1)."""
        return AffineLift(
            matrix=sympy.ImmutableMatrix(self.matrix * other.matrix),
            translation=sympy.ImmutableMatrix(self.matrix * other.translation + self.translation),
        )

    def inverse(self) -> "AffineLift":
        m_inv = self.matrix.inv()
        return AffineLift(
            matrix=sympy.ImmutableMatrix(m_inv),
            translation=sympy.ImmutableMatrix(-m_inv * self.translation),
        )


def compose_word(letter_lifts: Sequence[AffineLift], word: Word, dim: int) -> AffineLift:
    """Compose the lifts of the letters of a word, inverse letters inverted."""
    result = AffineLift.identity(dim)
    inverses: dict[int, AffineLift] = {}
    for g, e in word:
        if e == 1:
            step = letter_lifts[g]
        else:
            if g not in inverses:
                inverses[g] = letter_lifts[g].inverse()
            step = inverses[g]
        result = result.compose(step)
    return result


def pairwise_defect(lifts: Callable[[Word], AffineLift], w1: Word, w2: Word) -> Vector:
    """Translation beta(w1, w2) with lift(w1) lift(w2) + beta = lift(w1 w2).

    Raises:
        InputError: If the linear parts are not multiplicative on this pair
    """
    a, b = lifts(free_reduce(w1)), lifts(free_reduce(w2))
    ab = lifts(concat(w1, w2))
    composed = a.compose(b)
    if composed.matrix != ab.matrix:
        raise InputError("lift table linear parts are not multiplicative")
    return sympy.ImmutableMatrix(ab.translation - composed.translation)


def cocycle_defect(rho: Representation, lifts: Callable[[Word], AffineLift], triple: Sequence[Word]) -> Vector:
    """d beta on a triple of words; zero whenever beta comes from a lift table."""
    beta = Cochain.from_function(2, rho.dim, lambda key: pairwise_defect(lifts, *key))
    return coboundary_eval(rho, 2, beta, triple)


@final
@dataclass(frozen=True)
class _RelatorPattern:
    word: Word
    defect: Vector


@final
@dataclass(frozen=True, eq=False)
class TwistedSystem:
    """Presentation, representation and the declared defect of each relator."""

    presentation: GroupPresentation
    rho: Representation
    defects: tuple[Vector, ...]

    def __post_init__(self) -> None:
        if len(self.rho.matrices) != self.presentation.rank:
            raise DimensionMismatch(
                "one matrix per generator is required",
                generators=self.presentation.rank,
                matrices=len(self.rho.matrices),
            )
        if len(self.defects) != len(self.presentation.relators):
            raise DimensionMismatch(
                "one defect per relator is required",
                relators=len(self.presentation.relators),
                defects=len(self.defects),
            )
        for i, v in enumerate(self.defects):
            if v.rows != self.dim:
                raise DimensionMismatch(f"defect {i} has length {v.rows}", expected=self.dim, got=v.rows)
        for i, r in enumerate(self.presentation.relators):
            if self.rho(r) != sympy.eye(self.dim):
                logger.warning("relator %d does not map to the identity under rho", i)

    @property
    def dim(self) -> int:
        return self.rho.dim

    @classmethod
    def build(
        cls,
        presentation: GroupPresentation,
        rho: Sequence[MatrixLike] | Mapping[str, MatrixLike],
        defects: Sequence[Sequence[Any]] | None = None,
        dim: int | None = None,
    ) -> "TwistedSystem":
        """Assemble a system; rho may be keyed by generator name.

        Missing defects default to zero. With no generators, ``dim`` gives the dimension.
        """
        if isinstance(rho, Mapping):
            unknown = set(rho) - set(presentation.generators)
            if unknown:
                raise UnknownGenerator(f"unknown generator '{sorted(unknown)[0]}'", generator=sorted(unknown)[0])
            missing = [g for g in presentation.generators if g not in rho]
            if missing:
                raise InputError(f"no matrix for generator '{missing[0]}'", generator=missing[0])
            matrices = [rho[g] for g in presentation.generators]
        else:
            matrices = list(rho)
        representation = Representation.of(matrices)
        if not matrices:
            representation = Representation(matrices=(), dim=dim or 0)
        d = representation.dim
        vectors = (
            tuple(as_vector(v, d) for v in defects)
            if defects is not None
            else tuple(zero_vector(d) for _ in presentation.relators)
        )
        return cls(presentation=presentation, rho=representation, defects=vectors)

    def conjugate(self, p: MatrixLike) -> "TwistedSystem":
        """The system with rho -> P rho P^-1 and defects -> P defects."""
        pm = as_exact_matrix(p)
        return TwistedSystem(
            presentation=self.presentation,
            rho=self.rho.conjugate(pm),
            defects=tuple(sympy.ImmutableMatrix(pm * v) for v in self.defects),
        )

    @cached_property
    def patterns(self) -> tuple[_RelatorPattern, ...]:
        """Every cyclic rotation of every relator and its inverse, with its defect."""
        out: list[_RelatorPattern] = []
        for r, v in zip(self.presentation.relators, self.defects, strict=True):
            if not r:
                continue
            for base, defect in ((r, v), (inverse_word(r), sympy.ImmutableMatrix(-v))):
                for k in range(len(base)):
                    shifted = sympy.ImmutableMatrix(self.rho(base[:k]).inv() * defect)
                    out.append(_RelatorPattern(word=base[k:] + base[:k], defect=shifted))
        out.sort(key=lambda p: -len(p.word))
        return tuple(out)

    def relator_index(self, relator: int | Word) -> int:
        if isinstance(relator, int):
            if not 0 <= relator < len(self.presentation.relators):
                raise InputError(f"relator index {relator} out of range", index=relator)
            return relator
        reduced = free_reduce(self.presentation.check_word(relator))
        try:
            return self.presentation.relators.index(reduced)
        except ValueError as e:
            raise InputError("word is not a relator of the presentation") from e


def word_defect(sys: TwistedSystem, word: Iterable[Letter]) -> Vector:
    """Accumulated deck translation of a word.

    Letters are pushed on a stack; adjacent inverse letters cancel for free,
    and whenever the top of the stack spells a rotation of a relator (or its
    inverse) that block is popped and its defect, twisted by psi of the
    remaining prefix, is added.

    Raises:
        UnknownGenerator: If a letter refers to no generator
    """
    letters = sys.presentation.check_word(word)
    total = sympy.zeros(sys.dim, 1)
    stack: list[Letter] = []
    for letter in letters:
        if stack and stack[-1] == (letter[0], -letter[1]):
            stack.pop()
            continue
        stack.append(letter)
        for pattern in sys.patterns:
            n = len(pattern.word)
            if n <= len(stack) and tuple(stack[-n:]) == pattern.word:
                del stack[-n:]
                total += sys.rho(tuple(stack)) * pattern.defect
                break
    return sympy.ImmutableMatrix(total)


@final
@dataclass(frozen=True, eq=False)
class RelatorEquation:
    """sum_s coefficients[s] eta(s) = rhs for one relator."""

    relator: int
    coefficients: tuple[sympy.ImmutableMatrix, ...]
    rhs: Vector


def relator_equation(sys: TwistedSystem, relator: int | Word) -> RelatorEquation:
    """Linear equation in the generator corrections eta(s) forced by one relator.

    Raises:
        UnknownGenerator: If the relator word refers to no generator
    """
    index = sys.relator_index(relator)
    word = sys.presentation.relators[index]
    d = sys.dim
    coeffs = [sympy.zeros(d, d) for _ in range(sys.presentation.rank)]
    prefix = sympy.eye(d)
    for g, e in word:
        if e == 1:
            coeffs[g] += prefix
            prefix = prefix * sys.rho.matrices[g]
        else:
            prefix = prefix * sys.rho.inverses[g]
            coeffs[g] -= prefix
    return RelatorEquation(
        relator=index,
        coefficients=tuple(sympy.ImmutableMatrix(c) for c in coeffs),
        rhs=sympy.ImmutableMatrix(-sys.defects[index]),
    )


@final
@dataclass(frozen=True, eq=False)
class LiftingSolution:
    """Outcome of the presentation-level lifting solve.

    ``status`` is UNSOLVABLE when the stacked relator equations have no
    rational solution; this is an obstruction for the presentation, not a
    statement about abstract cohomology.
    """

    status: Literal["SOLVED", "UNSOLVABLE"]
    eta: tuple[Vector, ...] | None
    q: int | None
    free_parameters: int
    equations: tuple[RelatorEquation, ...]

    @property
    def solvable(self) -> bool:
        return self.status == "SOLVED"

    @property
    def lifts_on_gamma(self) -> bool:
        return self.q == 1

    @property
    def eta_mod_one(self) -> tuple[Vector, ...] | None:
        if self.eta is None:
            return None
        return tuple(v.applyfunc(lambda x: sympy.Rational(x) % 1) for v in self.eta)


def stacked_system(sys: TwistedSystem) -> tuple[sympy.Matrix, sympy.Matrix, tuple[RelatorEquation, ...]]:
    """Block matrix and right-hand side of all relator equations."""
    d, n = sys.dim, sys.presentation.rank
    equations = tuple(parallel_map(lambda i: relator_equation(sys, i), list(range(len(sys.presentation.relators)))))
    if not equations:
        return sympy.zeros(0, d * n), sympy.zeros(0, 1), equations
    rows = [sympy.Matrix.hstack(*eq.coefficients) if n else sympy.zeros(d, 0) for eq in equations]
    matrix = sympy.Matrix.vstack(*rows)
    rhs = sympy.Matrix.vstack(*[sympy.Matrix(eq.rhs) for eq in equations])
    return matrix, rhs, equations


def solve_lifting(sys: TwistedSystem) -> LiftingSolution:
    """Solve the relator equations exactly for the generator corrections.

    Free parameters of the solution space are set to zero. ``q`` is the lcm
    of the denominators of eta; q = 1 means the corrected lifts are integral.
    """
    d, n = sys.dim, sys.presentation.rank
    matrix, rhs, equations = stacked_system(sys)
    if matrix.rows == 0 or n == 0:
        if any(v != zero_vector(d) for v in sys.defects):
            return LiftingSolution(status="UNSOLVABLE", eta=None, q=None, free_parameters=0, equations=equations)
        eta = tuple(zero_vector(d) for _ in range(n))
        return LiftingSolution(status="SOLVED", eta=eta, q=1, free_parameters=d * n, equations=equations)
    try:
        solution, params = matrix.gauss_jordan_solve(rhs)
    except ValueError:
        logger.debug("solve_lifting: stacked system of rank %d is inconsistent", matrix.rank())
        return LiftingSolution(status="UNSOLVABLE", eta=None, q=None, free_parameters=0, equations=equations)
    if params.rows:
        solution = solution.subs({p: 0 for p in params})
    eta = tuple(sympy.ImmutableMatrix(solution[i * d : (i + 1) * d, 0]) for i in range(n))
    q = math.lcm(1, *(int(sympy.Rational(x).q) for x in solution))
    logger.debug("solve_lifting: solved with q=%d and %d free parameters", q, params.rows)
    return LiftingSolution(status="SOLVED", eta=eta, q=q, free_parameters=int(params.rows), equations=equations)


def _eta_vectors(sys: TwistedSystem, eta: Sequence[Any] | Mapping[str, Any]) -> list[Vector]:
    if isinstance(eta, Mapping):
        unknown = set(eta) - set(sys.presentation.generators)
        if unknown:
            raise UnknownGenerator(f"unknown generator '{sorted(unknown)[0]}'", generator=sorted(unknown)[0])
        return [as_vector(eta.get(g, [0] * sys.dim), sys.dim) for g in sys.presentation.generators]
    if len(eta) != sys.presentation.rank:
        raise DimensionMismatch(
            "one correction per generator is required", expected=sys.presentation.rank, got=len(eta)
        )
    return [as_vector(v, sys.dim) for v in eta]


def corrected_defect(sys: TwistedSystem, eta: Sequence[Any] | Mapping[str, Any]) -> tuple[Vector, ...]:
    """Relator defects after correcting each generator lift by eta.

    Each relator is evaluated by composing the affine maps (rho(s), eta(s))
    along its word; the corrected defect is D(r) plus the resulting translation.
    """
    vectors = _eta_vectors(sys, eta)
    lifts = [AffineLift(matrix=m, translation=v) for m, v in zip(sys.rho.matrices, vectors, strict=True)]
    out = []
    for r, defect in zip(sys.presentation.relators, sys.defects, strict=True):
        composed = compose_word(lifts, r, sys.dim)
        out.append(sympy.ImmutableMatrix(defect + composed.translation))
    return tuple(out)


def vector_to_json(v: Vector) -> list[str | int]:
    """Exact entries as ints, or 'p/q' strings."""
    return [int(x) if sympy.Rational(x).q == 1 else str(sympy.Rational(x)) for x in v]
