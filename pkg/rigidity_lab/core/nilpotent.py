"""Rational nilpotent Lie algebras and their central-extension towers.

An algebra is given by structure constants in a basis adapted to its lattice:
``[e_i, e_j] = sum_k c[i][j][k] e_k``. Everything is exact over the rationals.
The tower quotients by the centre repeatedly until the zero algebra is reached.
"""

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Any, final

import sympy
from fastmcp.utilities.logging import get_logger

from rigidity_lab.core.matrix_core import (
    DEFAULT_TOL,
    MatrixLike,
    as_exact_matrix,
    is_hyperbolic,
)
from rigidity_lab.errors import (
    BracketNotPreserved,
    DimensionMismatch,
    JacobiViolation,
    LatticeNotPreserved,
    LevelOutOfRange,
    NotNilpotent,
)

logger = get_logger(__name__)


def _primitive(v: sympy.Matrix) -> sympy.Matrix:
    """Scale a rational vector to a primitive integer vector with positive leading entry."""
    scaled = v * math.lcm(*(int(sympy.Rational(x).q) for x in v))
    g = math.gcd(*(int(x) for x in scaled)) or 1
    scaled = scaled / g
    lead = next((x for x in scaled if x != 0), 1)
    return scaled if lead > 0 else -scaled


def _basis_matrix(columns: Sequence[sympy.Matrix], rows: int) -> sympy.Matrix:
    if not columns:
        return sympy.zeros(rows, 0)
    return sympy.Matrix.hstack(*columns)


@final
@dataclass(frozen=True, eq=False)
class NilpotentAlgebra:
    """Lie algebra given by its adjoint matrices in a lattice-adapted basis.

    ``ad[i]`` is the matrix of ``ad(e_i)``; its column j holds the coefficients
    of ``[e_i, e_j]``. ``lattice_basis`` columns span the lattice.
    """

    dim: int
    ad: tuple[sympy.ImmutableMatrix, ...]
    lattice_basis: sympy.ImmutableMatrix

    @classmethod
    def from_brackets(
        cls,
        dim: int,
        brackets: Iterable[Mapping[str, Any]],
        lattice_basis: MatrixLike | None = None,
    ) -> "NilpotentAlgebra":
        """Build an algebra from nonzero brackets ``{"i", "j", "coeffs"}`` (0-based).

        Raises:
            DimensionMismatch: If an index or coefficient vector does not fit dim
            JacobiViolation: If the brackets are not antisymmetric
        """
        table: dict[tuple[int, int], sympy.Matrix] = {}
        for entry in brackets:
            i, j = int(entry["i"]), int(entry["j"])
            coeffs = [sympy.Rational(str(c)) for c in entry["coeffs"]]
            if not (0 <= i < dim and 0 <= j < dim) or len(coeffs) != dim:
                raise DimensionMismatch(
                    f"bracket [{i},{j}] does not fit dimension {dim}",
                    i=i,
                    j=j,
                    dim=dim,
                )
            value = sympy.Matrix(coeffs)
            if i == j and any(c != 0 for c in coeffs):
                raise JacobiViolation(f"[e{i},e{i}] must vanish", i=i, j=j)
            for key, val in (((i, j), value), ((j, i), -value)):
                if key in table and table[key] != val:
                    raise JacobiViolation(
                        f"brackets [e{key[0]},e{key[1]}] are not antisymmetric",
                        i=key[0],
                        j=key[1],
                    )
                table[key] = val
        ad = []
        for i in range(dim):
            cols = [table.get((i, j), sympy.zeros(dim, 1)) for j in range(dim)]
            ad.append(sympy.ImmutableMatrix(_basis_matrix(cols, dim)))
        lattice = (
            sympy.ImmutableMatrix(as_exact_matrix(lattice_basis))
            if lattice_basis is not None
            else sympy.ImmutableMatrix(sympy.eye(dim))
        )
        if lattice.rows != dim:
            raise DimensionMismatch("lattice basis does not match dimension", dim=dim)
        return cls(dim=dim, ad=tuple(ad), lattice_basis=lattice)

    def structure_constant(self, i: int, j: int, k: int) -> sympy.Rational:
        return self.ad[i][k, j]

    def bracket(self, x: sympy.Matrix, y: sympy.Matrix) -> sympy.Matrix:
        result = sympy.zeros(self.dim, 1)
        for i in range(self.dim):
            if x[i] != 0:
                result += x[i] * (self.ad[i] * y)
        return result

    def basis_vector(self, i: int) -> sympy.Matrix:
        v = sympy.zeros(self.dim, 1)
        v[i] = 1
        return v

    def validate(self) -> None:
        """Check antisymmetry and the Jacobi identity exactly.

        Raises:
            JacobiViolation: On the first failing index pair or triple
        """
        e = [self.basis_vector(i) for i in range(self.dim)]
        for i, j in combinations(range(self.dim), 2):
            if self.bracket(e[i], e[j]) != -self.bracket(e[j], e[i]):
                raise JacobiViolation(f"[e{i},e{j}] is not antisymmetric", i=i, j=j)
        for i in range(self.dim):
            if any(x != 0 for x in self.bracket(e[i], e[i])):
                raise JacobiViolation(f"[e{i},e{i}] must vanish", i=i, j=i)
        for i, j, k in combinations(range(self.dim), 3):
            total = (
                self.bracket(self.bracket(e[i], e[j]), e[k])
                + self.bracket(self.bracket(e[j], e[k]), e[i])
                + self.bracket(self.bracket(e[k], e[i]), e[j])
            )
            if any(x != 0 for x in total):
                raise JacobiViolation(
                    f"Jacobi identity fails on (e{i}, e{j}, e{k})", triple=[i, j, k]
                )

    @cached_property
    def tower(self) -> "CentralTower":
        return central_series(self)


def lower_central_series(alg: NilpotentAlgebra) -> list[sympy.Matrix]:
    """Bases of g, [g,g], [g,[g,g]], ... down to the zero ideal.

    Raises:
        NotNilpotent: If the series stabilizes at a nonzero ideal
    """
    current = sympy.eye(alg.dim)
    series = [current]
    while current.cols > 0:
        products = [alg.ad[i] * current[:, c] for i in range(alg.dim) for c in range(current.cols)]
        span = sympy.Matrix.hstack(*products).columnspace() if products else []
        nxt = _basis_matrix(span, alg.dim)
        if nxt.cols >= current.cols:
            raise NotNilpotent(
                "lower central series stabilizes at a nonzero ideal",
                stable_dim=int(nxt.cols),
            )
        series.append(nxt)
        current = nxt
    return series


def center(alg: NilpotentAlgebra) -> sympy.Matrix:
    """Basis (columns, primitive integer vectors) of the centre."""
    if alg.dim == 0:
        return sympy.zeros(0, 0)
    # z is central iff [z, e_j] = 0 for every j
    blocks = [
        sympy.Matrix.hstack(*[alg.ad[i][:, j] for i in range(alg.dim)]) for j in range(alg.dim)
    ]
    stacked = sympy.Matrix.vstack(*blocks)
    return _basis_matrix([_primitive(v) for v in stacked.nullspace()], alg.dim)


@final
@dataclass(frozen=True, eq=False)
class TowerLayer:
    """One step n_i -> n_{i+1} = n_i / Z(n_i) of the tower.

    ``projection`` maps layer coordinates onto the quotient; ``section``
    embeds the quotient back through the chosen complement of the centre.
    """

    level: int
    algebra: NilpotentAlgebra
    center_basis: sympy.ImmutableMatrix
    projection: sympy.ImmutableMatrix
    section: sympy.ImmutableMatrix

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def center_dim(self) -> int:
        return int(self.center_basis.cols)


@final
@dataclass(frozen=True, eq=False)
class CentralTower:
    layers: tuple[TowerLayer, ...]

    @property
    def degree(self) -> int:
        return len(self.layers)

    @property
    def center_dims(self) -> list[int]:
        return [layer.center_dim for layer in self.layers]

    def projection_to(self, level: int) -> sympy.Matrix:
        """Composite projection from the algebra onto layer ``level``."""
        dim = self.layers[0].dim if self.layers else 0
        result = sympy.eye(dim)
        for layer in self.layers[:level]:
            result = layer.projection * result
        return result

    def section_to(self, level: int) -> sympy.Matrix:
        dim = self.layers[0].dim if self.layers else 0
        result = sympy.eye(dim)
        for layer in self.layers[:level]:
            result = result * layer.section
        return result


def _hermite(a: sympy.Matrix) -> tuple[sympy.Matrix, sympy.Matrix]:
    """Unimodular U and the row Hermite normal form H = U a of an integer matrix."""
    rows, cols = int(a.rows), int(a.cols)
    h = [[int(a[i, j]) for j in range(cols)] for i in range(rows)]
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]

    def subtract(target: int, source: int, q: int) -> None:
        h[target] = [x - q * y for x, y in zip(h[target], h[source], strict=True)]
        u[target] = [x - q * y for x, y in zip(u[target], u[source], strict=True)]

    pivot = 0
    for col in range(cols):
        if pivot == rows:
            break
        for r in range(pivot + 1, rows):
            # Euclid on rows pivot and r
            while h[r][col] != 0:
                subtract(pivot, r, h[pivot][col] // h[r][col])
                h[pivot], h[r] = h[r], h[pivot]
                u[pivot], u[r] = u[r], u[pivot]
        if h[pivot][col] == 0:
            continue
        if h[pivot][col] < 0:
            subtract(pivot, pivot, 2)
        for r in range(pivot):
            subtract(r, pivot, h[r][col] // h[pivot][col])
        pivot += 1
    return (
        sympy.Matrix(rows, rows, [x for row in u for x in row]),
        sympy.Matrix(rows, cols, [x for row in h for x in row]),
    )


def quotient_by_center(alg: NilpotentAlgebra) -> tuple[sympy.Matrix, sympy.Matrix, sympy.Matrix, NilpotentAlgebra]:
    """Quotient an algebra by its centre, keeping track of the lattice.

    The centre meets the lattice in a saturated sublattice. A lattice basis
    extending it gives an integral projection onto the quotient lattice,
    whose basis is fixed by putting the projection in Hermite normal form.

    Returns:
        Centre basis, projection, section, and the quotient algebra

    Raises:
        NotNilpotent: If the centre is trivial in a nonzero algebra
    """
    z = center(alg)
    m = int(z.cols)
    d = alg.dim
    if m == 0:
        raise NotNilpotent("nonzero algebra with trivial centre", dim=d)
    lattice = sympy.Matrix(alg.lattice_basis)
    lattice_inv = lattice.inv()
    z_lattice = lattice_inv * z
    z_lattice = _basis_matrix([_primitive(z_lattice[:, c]) for c in range(m)], d)
    # v * z_lattice = [H; 0]
    v, _ = _hermite(z_lattice)
    v_inv = v.inv()
    q = d - m
    z = lattice * v_inv[:, :m]
    if q == 0:
        w = sympy.zeros(d, 0)
        projection = sympy.zeros(0, d)
    else:
        reorder, projection_lattice = _hermite(v[m:, :])
        w = lattice * v_inv[:, m:] * reorder.inv()
        projection = projection_lattice * lattice_inv
    ad = []
    for a in range(q):
        cols = [projection * alg.bracket(w[:, a], w[:, b]) for b in range(q)]
        ad.append(sympy.ImmutableMatrix(_basis_matrix(cols, q)))
    quotient = NilpotentAlgebra(
        dim=q,
        ad=tuple(ad),
        lattice_basis=sympy.ImmutableMatrix(sympy.eye(q)),
    )
    return z, projection, w, quotient


def central_series(alg: NilpotentAlgebra) -> CentralTower:
    """Build the tower n = n_0 -> n_1 -> ... -> n_r = 0 of quotients by centres.

    Raises:
        JacobiViolation: If the structure constants do not define a Lie algebra
        NotNilpotent: If the algebra is not nilpotent
    """
    alg.validate()
    lower_central_series(alg)
    layers = []
    current = alg
    level = 0
    while current.dim > 0:
        z, projection, section, quotient = quotient_by_center(current)
        layers.append(
            TowerLayer(
                level=level,
                algebra=current,
                center_basis=sympy.ImmutableMatrix(z),
                projection=sympy.ImmutableMatrix(projection),
                section=sympy.ImmutableMatrix(section),
            )
        )
        current = quotient
        level += 1
    tower = CentralTower(layers=tuple(layers))
    logger.debug("central_series: degree=%d centre dims=%s", tower.degree, tower.center_dims)
    return tower


@final
@dataclass(frozen=True, eq=False)
class AlgebraAutomorphism:
    """Validated automorphism preserving brackets and the lattice."""

    algebra: NilpotentAlgebra
    matrix: sympy.ImmutableMatrix


def check_automorphism(alg: NilpotentAlgebra, phi: MatrixLike) -> AlgebraAutomorphism:
    """Validate that phi preserves brackets and the lattice.

    Raises:
        DimensionMismatch: If phi does not match the algebra's dimension
        BracketNotPreserved: On the first basis pair (i, j) with phi[e_i,e_j] != [phi e_i, phi e_j]
        LatticeNotPreserved: If phi is not unimodular and integral in lattice coordinates
    """
    m = as_exact_matrix(phi)
    if m.rows != alg.dim:
        raise DimensionMismatch(
            f"automorphism is {m.rows}x{m.cols}, algebra has dimension {alg.dim}",
            expected=alg.dim,
            got=int(m.rows),
        )
    for i, j in combinations(range(alg.dim), 2):
        lhs = m * alg.bracket(alg.basis_vector(i), alg.basis_vector(j))
        rhs = alg.bracket(m[:, i], m[:, j])
        if lhs != rhs:
            raise BracketNotPreserved(
                f"phi[e{i},e{j}] != [phi e{i}, phi e{j}]", i=i, j=j
            )
    lattice = alg.lattice_basis
    in_lattice = lattice.inv() * m * lattice
    det = in_lattice.det()
    if any(not x.is_integer for x in in_lattice) or det not in (1, -1):
        raise LatticeNotPreserved(
            "automorphism does not preserve the lattice",
            determinant=str(det),
            integral=all(x.is_integer for x in in_lattice),
        )
    return AlgebraAutomorphism(algebra=alg, matrix=sympy.ImmutableMatrix(m))


def _as_automorphism(alg: NilpotentAlgebra, phi: AlgebraAutomorphism | MatrixLike) -> AlgebraAutomorphism:
    if isinstance(phi, AlgebraAutomorphism):
        return phi
    return check_automorphism(alg, phi)


def descend_automorphism(
    alg: NilpotentAlgebra, phi: AlgebraAutomorphism | MatrixLike, level: int
) -> sympy.Matrix:
    """Induced automorphism on layer ``level`` of the tower.

    Raises:
        LevelOutOfRange: If level is not in [0, degree]
    """
    tower = alg.tower
    if not 0 <= level <= tower.degree:
        raise LevelOutOfRange(
            f"level must lie in [0, {tower.degree}], got {level}",
            level=level,
            degree=tower.degree,
        )
    auto = _as_automorphism(alg, phi)
    if level == tower.degree:
        return sympy.zeros(0, 0)
    proj = tower.projection_to(level)
    induced = proj * auto.matrix * tower.section_to(level)
    if proj * auto.matrix != induced * proj:
        raise BracketNotPreserved(
            f"automorphism does not preserve the centre at level {level}", level=level
        )
    return induced


@final
@dataclass(frozen=True)
class LayerReport:
    level: int
    center_dim: int
    center_moduli: list[float]
    hyperbolic: bool


@final
@dataclass(frozen=True)
class LayerHyperbolicity:
    layers: list[LayerReport]
    hyperbolic: bool


def layer_hyperbolicity(
    alg: NilpotentAlgebra, phi: AlgebraAutomorphism | MatrixLike, tol: float = DEFAULT_TOL
) -> LayerHyperbolicity:
    """Eigenvalue moduli of the induced map on each layer's centre.

    The automorphism is hyperbolic on the nilmanifold exactly when it is
    hyperbolic on every centre.
    """
    auto = _as_automorphism(alg, phi)
    reports = []
    for layer in alg.tower.layers:
        induced = descend_automorphism(alg, auto, layer.level)
        z = sympy.Matrix(layer.center_basis)
        # phi_i Z = Z C, solved exactly through the normal equations
        restricted = (z.T * z).inv() * z.T * induced * z
        report = is_hyperbolic(restricted, tol)
        reports.append(
            LayerReport(
                level=layer.level,
                center_dim=layer.center_dim,
                center_moduli=report.moduli,
                hyperbolic=report.hyperbolic,
            )
        )
    return LayerHyperbolicity(layers=reports, hyperbolic=all(r.hyperbolic for r in reports))


def heisenberg() -> NilpotentAlgebra:
    """The 3-dimensional Heisenberg algebra [e0, e1] = e2."""
    return NilpotentAlgebra.from_brackets(3, [{"i": 0, "j": 1, "coeffs": [0, 0, 1]}])


def heisenberg_automorphism(b: MatrixLike) -> sympy.Matrix:
    """Automorphism of the Heisenberg algebra induced by a 2x2 integer matrix."""
    m = as_exact_matrix(b)
    if m.rows != 2:
        raise DimensionMismatch("expected a 2x2 matrix", got=int(m.rows))
    return sympy.diag(m, m.det())
