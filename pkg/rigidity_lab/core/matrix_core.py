"""Exact and floating-point linear algebra for hyperbolic integer matrices.

Eigenvalue moduli come from the exact characteristic polynomial: the
polynomial is computed over the rationals (Berkowitz, division free), split
into square-free factors, and only then solved numerically. Repeated
eigenvalues such as those of the identity are therefore located exactly.
"""

from collections.abc import Sequence
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from typing import Any, final

import numpy as np
import sympy
from fastmcp.utilities.logging import get_logger
from numpy.typing import NDArray
from scipy import linalg

from rigidity_lab.errors import (
    DimensionMismatch,
    MarginTooLarge,
    NonSquare,
    NotHyperbolic,
    NotUnimodular,
    ToleranceOutOfRange,
)

logger = get_logger(__name__)

DEFAULT_TOL = 1e-9

MatrixLike = Sequence[Sequence[Any]] | sympy.Matrix | NDArray[Any]


def as_exact_matrix(matrix: MatrixLike) -> sympy.Matrix:
    """Convert integer, rational or string entries into an exact square matrix.

    Args:
        matrix: Nested rows, a sympy Matrix or an integer numpy array

    Returns:
        sympy Matrix with Rational entries

    Raises:
        NonSquare: If the rows are ragged or the matrix is not square
    """
    if isinstance(matrix, sympy.MatrixBase):
        exact = sympy.Matrix(matrix)
    else:
        source = np.asarray(matrix).tolist() if isinstance(matrix, np.ndarray) else matrix
        try:
            rows = [list(row) for row in source]
        except TypeError as e:
            raise NonSquare("matrix must be a list of rows") from e
        widths = {len(row) for row in rows}
        if len(widths) > 1:
            raise NonSquare("matrix rows have different lengths", widths=sorted(widths))
        if not rows:
            return sympy.zeros(0, 0)
        exact = sympy.Matrix([[exact_entry(entry) for entry in row] for row in rows])
    if exact.rows != exact.cols:
        raise NonSquare(
            f"matrix must be square, got {exact.rows}x{exact.cols}",
            rows=exact.rows,
            cols=exact.cols,
        )
    return exact


def exact_entry(entry: Any) -> sympy.Rational:
    """Convert a scalar (int, Fraction, decimal string, float) to a sympy Rational."""
    if isinstance(entry, Fraction):
        return sympy.Rational(entry.numerator, entry.denominator)
    if isinstance(entry, float):
        return sympy.Rational(repr(entry))
    if isinstance(entry, np.integer):
        return sympy.Integer(int(entry))
    if isinstance(entry, np.floating):
        return sympy.Rational(repr(float(entry)))
    return sympy.Rational(entry)


def as_float_matrix(matrix: MatrixLike) -> NDArray[np.float64]:
    """Convert a matrix-like value into a square float array."""
    exact = as_exact_matrix(matrix)
    if exact.rows == 0:
        return np.zeros((0, 0))
    return np.array(exact.tolist(), dtype=float)


def _check_tol(tol: float) -> None:
    if not 0.0 < tol < 0.5:
        raise ToleranceOutOfRange(f"tol must lie in (0, 0.5), got {tol}", tol=tol)


def characteristic_polynomial(matrix: MatrixLike) -> list[sympy.Rational]:
    """Compute the exact characteristic polynomial det(xI - M).

    Args:
        matrix: Square integer or rational matrix

    Returns:
        Coefficients, leading coefficient first
    """
    exact = as_exact_matrix(matrix)
    x = sympy.Symbol("x")
    return [sympy.Rational(c) for c in exact.charpoly(x).all_coeffs()]


def eigenvalues(matrix: MatrixLike) -> list[complex]:
    """Numerical eigenvalues, with multiplicity, from the exact characteristic polynomial."""
    exact = as_exact_matrix(matrix)
    if exact.rows == 0:
        return []
    x = sympy.Symbol("x")
    poly = sympy.Poly(exact.charpoly(x).as_expr(), x)
    values: list[complex] = []
    _, factors = poly.sqf_list()
    for factor, multiplicity in factors:
        if factor.degree() == 0:
            continue
        roots = [complex(r) for r in factor.nroots(n=30, maxsteps=200)]
        values.extend(roots * multiplicity)
    return values


def eigenvalue_moduli(matrix: MatrixLike) -> list[float]:
    """Eigenvalue moduli sorted descending."""
    return sorted((abs(v) for v in eigenvalues(matrix)), reverse=True)


@final
@dataclass(frozen=True)
class HyperbolicityReport:
    """Outcome of a hyperbolicity test."""

    hyperbolic: bool
    moduli: list[float]
    tol: float


def is_hyperbolic(matrix: MatrixLike, tol: float = DEFAULT_TOL) -> HyperbolicityReport:
    """Decide whether no eigenvalue modulus lies within tol of 1.

    Args:
        matrix: Square integer or rational matrix
        tol: Separation tolerance in (0, 0.5)

    Returns:
        Report with the decision and the moduli sorted descending

    Raises:
        NonSquare: If the matrix is not square
        ToleranceOutOfRange: If tol is outside (0, 0.5)
    """
    _check_tol(tol)
    moduli = eigenvalue_moduli(matrix)
    hyperbolic = all(abs(m - 1.0) > tol for m in moduli)
    logger.debug("is_hyperbolic: moduli=%s hyperbolic=%s", moduli, hyperbolic)
    return HyperbolicityReport(hyperbolic=hyperbolic, moduli=moduli, tol=tol)


@final
@dataclass(frozen=True, eq=False)
class HyperbolicSplitting:
    """Stable and unstable invariant subspaces of a hyperbolic matrix.

    Basis columns of each subspace are orthonormal (real Schur vectors).
    ``lambda_s`` is None when the stable space is trivial, likewise
    ``lambda_u`` for the unstable space.
    """

    matrix: NDArray[np.float64]
    e_stable: NDArray[np.float64]
    e_unstable: NDArray[np.float64]
    lambda_s: float | None
    lambda_u: float | None
    tol: float
    moduli: tuple[float, ...]

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def stable_dim(self) -> int:
        return int(self.e_stable.shape[1])

    @property
    def unstable_dim(self) -> int:
        return int(self.e_unstable.shape[1])

    @cached_property
    def basis(self) -> NDArray[np.float64]:
        """Matrix whose columns are the stable then the unstable basis vectors."""
        return np.hstack([self.e_stable, self.e_unstable])

    @cached_property
    def basis_inverse(self) -> NDArray[np.float64]:
        return np.linalg.inv(self.basis)

    def split(self, vectors: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Coordinates of vectors (last axis) in the stable and unstable bases."""
        coords = np.asarray(vectors, dtype=float) @ self.basis_inverse.T
        return coords[..., : self.stable_dim], coords[..., self.stable_dim :]

    def project_stable(self, vectors: NDArray[np.float64]) -> NDArray[np.float64]:
        """Stable component along the unstable space."""
        cs, _ = self.split(vectors)
        return cs @ self.e_stable.T

    def project_unstable(self, vectors: NDArray[np.float64]) -> NDArray[np.float64]:
        _, cu = self.split(vectors)
        return cu @ self.e_unstable.T

    @cached_property
    def stable_block(self) -> NDArray[np.float64]:
        """Restriction of the matrix to the stable space in its basis."""
        return self.e_stable.T @ self.matrix @ self.e_stable

    @cached_property
    def unstable_block(self) -> NDArray[np.float64]:
        return self.e_unstable.T @ self.matrix @ self.e_unstable


def hyperbolic_splitting(matrix: MatrixLike, tol: float = DEFAULT_TOL) -> HyperbolicSplitting:
    """Compute the stable/unstable splitting of a hyperbolic matrix.

    Args:
        matrix: Square integer or rational matrix
        tol: Separation tolerance in (0, 0.5)

    Returns:
        The splitting, with orthonormal bases of each invariant subspace

    Raises:
        NotHyperbolic: If some eigenvalue modulus lies within tol of 1
    """
    report = is_hyperbolic(matrix, tol)
    if not report.hyperbolic:
        raise NotHyperbolic(
            "matrix has an eigenvalue of modulus 1 within tolerance",
            moduli=report.moduli,
            tol=tol,
        )
    a = as_float_matrix(matrix)
    d = a.shape[0]
    _, z_in, sdim_in = linalg.schur(a, output="real", sort="iuc")
    _, z_out, sdim_out = linalg.schur(a, output="real", sort="ouc")
    e_stable = np.ascontiguousarray(z_in[:, :sdim_in])
    e_unstable = np.ascontiguousarray(z_out[:, :sdim_out])
    if sdim_in + sdim_out != d:
        raise NotHyperbolic(
            "invariant subspaces do not span the space",
            stable_dim=int(sdim_in),
            unstable_dim=int(sdim_out),
        )
    stable = [m for m in report.moduli if m < 1.0]
    unstable = [m for m in report.moduli if m > 1.0]
    split = HyperbolicSplitting(
        matrix=a,
        e_stable=e_stable,
        e_unstable=e_unstable,
        lambda_s=max(stable) if stable else None,
        lambda_u=min(unstable) if unstable else None,
        tol=tol,
        moduli=tuple(report.moduli),
    )
    logger.debug(
        "hyperbolic_splitting: dim_s=%d dim_u=%d lambda_s=%s lambda_u=%s",
        split.stable_dim,
        split.unstable_dim,
        split.lambda_s,
        split.lambda_u,
    )
    return split


@final
@dataclass(frozen=True, eq=False)
class AdaptedNorm:
    """Inner-product norm in which the splitting is uniformly hyperbolic.

    ``certified_rate`` is the rate actually achieved: the largest one-step
    stretch of the matrix on the stable space and of its inverse on the
    unstable space, measured in this norm. ``target_rate`` is the rate the
    construction aimed for, so certified_rate <= target_rate.
    """

    splitting: HyperbolicSplitting
    gram: NDArray[np.float64]
    gram_stable: NDArray[np.float64]
    gram_unstable: NDArray[np.float64]
    certified_rate: float
    target_rate: float
    margin: float
    verified: bool

    @cached_property
    def to_adapted_coords(self) -> NDArray[np.float64]:
        """Linear map z = Qv with |z_s| = |v_s| and |z_u| = |v_u| in this norm."""
        blocks = []
        if self.splitting.stable_dim:
            blocks.append(np.linalg.cholesky(self.gram_stable).T)
        if self.splitting.unstable_dim:
            blocks.append(np.linalg.cholesky(self.gram_unstable).T)
        return linalg.block_diag(*blocks) @ self.splitting.basis_inverse

    @cached_property
    def from_adapted_coords(self) -> NDArray[np.float64]:
        return np.linalg.inv(self.to_adapted_coords)

    def components(self, vectors: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Adapted stable and unstable coordinates of vectors (last axis)."""
        z = np.asarray(vectors, dtype=float) @ self.to_adapted_coords.T
        k = self.splitting.stable_dim
        return z[..., :k], z[..., k:]

    def norm(self, vectors: NDArray[np.float64]) -> NDArray[np.float64]:
        v = np.asarray(vectors, dtype=float)
        return np.sqrt(np.einsum("...i,ij,...j->...", v, self.gram, v))

    def box_norm(self, vectors: NDArray[np.float64]) -> NDArray[np.float64]:
        """max(|v_s|, |v_u|) in the adapted norm."""
        zs, zu = self.components(vectors)
        return np.maximum(np.linalg.norm(zs, axis=-1), np.linalg.norm(zu, axis=-1))

    def to_adapted(self, matrix: NDArray[np.float64]) -> NDArray[np.float64]:
        """Express a linear map in adapted coordinates."""
        return self.to_adapted_coords @ np.asarray(matrix, dtype=float) @ self.from_adapted_coords


def _block_gram(block: NDArray[np.float64], rate: float) -> tuple[NDArray[np.float64], float]:
    """Lyapunov Gram matrix for a block with spectral radius below rate, and its certified stretch."""
    scaled = block / rate
    gram = linalg.solve_discrete_lyapunov(scaled.T, np.eye(block.shape[0]))
    gram = 0.5 * (gram + gram.T)
    gram /= float(np.min(np.linalg.eigvalsh(gram)))
    stretch = linalg.eigh(block.T @ gram @ block, gram, eigvals_only=True)
    return gram, float(np.sqrt(max(float(np.max(stretch)), 0.0)))


def adapted_norm(split: HyperbolicSplitting, margin: float = 0.01) -> AdaptedNorm:
    """Build an adapted norm for a hyperbolic splitting.

    Args:
        split: Splitting from hyperbolic_splitting
        margin: Relative slack in (0, 1) above the spectral rate

    Returns:
        The adapted norm with its certified rate

    Raises:
        ToleranceOutOfRange: If margin is outside (0, 1)
        MarginTooLarge: If max(lambda_s, 1/lambda_u)(1+margin) >= 1
    """
    if not 0.0 < margin < 1.0:
        raise ToleranceOutOfRange(f"margin must lie in (0, 1), got {margin}", margin=margin)
    rates = []
    if split.lambda_s is not None:
        rates.append(split.lambda_s)
    if split.lambda_u is not None:
        rates.append(1.0 / split.lambda_u)
    base = max(rates) if rates else 0.0
    target = base * (1.0 + margin)
    if target >= 1.0:
        raise MarginTooLarge(
            f"rate {base:.6g} with margin {margin} is not below 1",
            rate=base,
            margin=margin,
            target_rate=target,
        )
    if target == 0.0:
        target = margin

    certified = 0.0
    gram_s = np.zeros((0, 0))
    gram_u = np.zeros((0, 0))
    if split.stable_dim:
        gram_s, stretch = _block_gram(split.stable_block, target)
        certified = max(certified, stretch)
    if split.unstable_dim:
        gram_u, stretch = _block_gram(np.linalg.inv(split.unstable_block), target)
        certified = max(certified, stretch)

    inv = split.basis_inverse
    gram = inv.T @ linalg.block_diag(gram_s, gram_u) @ inv
    gram = 0.5 * (gram + gram.T)

    norm = AdaptedNorm(
        splitting=split,
        gram=gram,
        gram_stable=gram_s,
        gram_unstable=gram_u,
        certified_rate=certified,
        target_rate=target,
        margin=margin,
        verified=False,
    )
    verified = _verify_on_basis(norm)
    logger.debug("adapted_norm: certified=%.12g target=%.12g verified=%s", certified, target, verified)
    return replace(norm, verified=verified)


def _verify_on_basis(norm: AdaptedNorm) -> bool:
    split = norm.splitting
    slack = 1e-9
    for v in split.e_stable.T:
        if norm.norm(split.matrix @ v) > norm.certified_rate * norm.norm(v) * (1 + slack):
            return False
    if split.unstable_dim:
        back = split.e_unstable @ np.linalg.inv(split.unstable_block)
        for v, w in zip(split.e_unstable.T, back.T, strict=True):
            if norm.norm(w) > norm.certified_rate * norm.norm(v) * (1 + slack):
                return False
    return True


@final
@dataclass(frozen=True)
class RegularityProfile:
    """Adjoint eigenvalue counts of an SL(n) element."""

    dimension: int
    ad_unit_eigen_count: int
    ad_circle_eigen_count: int
    ambient_minimum: int
    regular: bool
    r_regular: bool
    ratio_moduli: list[float]


def regularity_profile(matrix: MatrixLike, tol: float = DEFAULT_TOL) -> RegularityProfile:
    """Count adjoint eigenvalues equal to 1 and of modulus 1 for an SL(n) element.

    The adjoint eigenvalues are the ratios of eigenvalue pairs together with
    n-1 ones from the Cartan directions. The ambient minimum for SL(n) is n-1.

    Args:
        matrix: Square matrix with exact determinant 1 (rational entries allowed)
        tol: Tolerance for comparing ratios to 1 and to the unit circle

    Returns:
        The regularity profile

    Raises:
        NotUnimodular: If det(M) != 1
    """
    _check_tol(tol)
    exact = as_exact_matrix(matrix)
    det = exact.det()
    if det != 1:
        raise NotUnimodular(f"determinant is {det}, expected 1", determinant=str(det))
    n = exact.rows
    values = eigenvalues(exact)
    ratios = [values[i] / values[j] for i in range(n) for j in range(n) if i != j]
    forced = max(n - 1, 0)
    unit = forced + sum(1 for r in ratios if abs(r - 1.0) <= tol)
    circle = forced + sum(1 for r in ratios if abs(abs(r) - 1.0) <= tol)
    return RegularityProfile(
        dimension=n,
        ad_unit_eigen_count=unit,
        ad_circle_eigen_count=circle,
        ambient_minimum=forced,
        regular=unit == forced,
        r_regular=circle == forced,
        ratio_moduli=sorted((abs(r) for r in ratios), reverse=True),
    )


@final
@dataclass(frozen=True)
class RankOneReport:
    rank: int
    is_rank_one: bool
    dimension: int
    count: int


def rank_one_factor_test(log_vectors: Sequence[Sequence[float]]) -> RankOneReport:
    """Rank of the real span of weight logarithm vectors.

    Args:
        log_vectors: Nonempty list of vectors of a common dimension

    Returns:
        Rank and whether it is at most one

    Raises:
        DimensionMismatch: If the list is empty or the dimensions differ
    """
    if not log_vectors:
        raise DimensionMismatch("at least one vector is required", count=0)
    dims = {len(v) for v in log_vectors}
    if len(dims) != 1:
        raise DimensionMismatch("vectors have different dimensions", dimensions=sorted(dims))
    stacked = np.array([[float(x) for x in v] for v in log_vectors], dtype=float)
    rank = int(np.linalg.matrix_rank(stacked)) if stacked.size else 0
    return RankOneReport(
        rank=rank,
        is_rank_one=rank <= 1,
        dimension=dims.pop(),
        count=len(log_vectors),
    )
