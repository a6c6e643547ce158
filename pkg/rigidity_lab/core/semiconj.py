"""Semiconjugacies of perturbed hyperbolic toral maps.

For a lift f(x) = Ax + u(x) with A hyperbolic and u periodic, the continuous
map h = id + w homotopic to the identity with A h = h f solves

    A w(x) - w(f(x)) = u(x).

The unstable part of w is summed along forward orbits and the stable part
along backward orbits. Truncating each sum after K terms leaves a residual
equal to a single tail term, bounded by the adapted rate to the power K.
"""

from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Literal, Protocol, final, runtime_checkable

import numpy as np
from fastmcp.utilities.logging import get_logger
from numpy.typing import NDArray
from scipy import ndimage

from rigidity_lab.config import parallel_map
from rigidity_lab.core.matrix_core import (
    DEFAULT_TOL,
    AdaptedNorm,
    HyperbolicSplitting,
    MatrixLike,
    adapted_norm,
    as_exact_matrix,
    as_float_matrix,
    hyperbolic_splitting,
)
from rigidity_lab.errors import (
    Budget,
    DimensionMismatch,
    InputError,
    InsufficientSamples,
    NotInvertible,
)

logger = get_logger(__name__)

Array = NDArray[np.float64]

MAX_DIM = 4
MAX_GRID = 1024
MAX_VERIFY_NODES = 2**18
PREIMAGE_TOL = 1e-12
PREIMAGE_MAX_ITER = 500
CHUNK = 16384


@runtime_checkable
class PeriodicField(Protocol):
    """A Z^d-periodic vector field on R^d, evaluated on point arrays of shape (N, d)."""

    @property
    def dim(self) -> int: ...

    @property
    def sup_norm(self) -> float: ...

    def __call__(self, points: Array) -> Array: ...

    def jacobian(self, points: Array) -> Array: ...


def _points(points: Array | Sequence[Sequence[float]], dim: int) -> Array:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[-1] != dim:
        raise DimensionMismatch(
            f"points have dimension {pts.shape[-1]}, expected {dim}",
            expected=dim,
            got=int(pts.shape[-1]),
        )
    return pts


def grid_nodes(n: int, dim: int) -> Array:
    """Nodes i/n of the uniform grid on [0,1)^dim, in C order."""
    axes = [np.arange(n) / n] * dim
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def torus_distance(a: Array, b: Array) -> Array:
    """Euclidean distance on R^d / Z^d, row by row."""
    diff = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    diff -= np.round(diff)
    return np.linalg.norm(diff, axis=-1)


@final
@dataclass(frozen=True)
class ZeroField:
    """The zero displacement."""

    dim: int

    @property
    def sup_norm(self) -> float:
        return 0.0

    def __call__(self, points: Array) -> Array:
        return np.zeros_like(_points(points, self.dim))

    def jacobian(self, points: Array) -> Array:
        pts = _points(points, self.dim)
        return np.zeros((pts.shape[0], self.dim, self.dim))


@final
@dataclass(frozen=True)
class TrigMode:
    k: tuple[int, ...]
    amp: tuple[float, ...]
    phase: Literal["sin", "cos"] = "sin"


@final
@dataclass(frozen=True)
class TrigField:
    """Trigonometric polynomial sum amp * sin(2 pi k.x) (or cos), evaluated exactly."""

    dim: int
    modes: tuple[TrigMode, ...]

    @classmethod
    def from_spec(cls, spec: Mapping[str, Any], dim: int | None = None) -> "TrigField":
        """Build from ``{"modes": [{"k": [...], "amp": [...], "phase": "sin"}]}``."""
        modes = []
        for m in spec.get("modes", []):
            modes.append(
                TrigMode(
                    k=tuple(int(x) for x in m["k"]),
                    amp=tuple(float(x) for x in m["amp"]),
                    phase=m.get("phase", "sin"),
                )
            )
        d = dim if dim is not None else int(spec.get("dim", len(modes[0].k) if modes else 0))
        for m in modes:
            if len(m.k) != d or len(m.amp) != d:
                raise DimensionMismatch("mode does not match field dimension", dim=d)
            if m.phase not in ("sin", "cos"):
                raise InputError(f"unknown phase '{m.phase}'", phase=m.phase)
        return cls(dim=d, modes=tuple(modes))

    @property
    def sup_norm(self) -> float:
        return float(sum(np.linalg.norm(m.amp) for m in self.modes))

    def __call__(self, points: Array) -> Array:
        pts = _points(points, self.dim)
        out = np.zeros_like(pts)
        for m in self.modes:
            s = 2 * np.pi * (pts @ np.asarray(m.k, dtype=float))
            wave = np.sin(s) if m.phase == "sin" else np.cos(s)
            out += wave[:, None] * np.asarray(m.amp)
        return out

    def jacobian(self, points: Array) -> Array:
        pts = _points(points, self.dim)
        out = np.zeros((pts.shape[0], self.dim, self.dim))
        for m in self.modes:
            k = np.asarray(m.k, dtype=float)
            s = 2 * np.pi * (pts @ k)
            slope = 2 * np.pi * (np.cos(s) if m.phase == "sin" else -np.sin(s))
            out += slope[:, None, None] * np.outer(m.amp, k)[None, :, :]
        return out


@final
@dataclass(frozen=True, eq=False)
class PeriodicDisplacement:
    """Vector field sampled on a uniform torus grid, multilinearly interpolated.

    ``values`` has shape (n, ..., n, d). Nodes sit at i/n; the node at 1 is the
    node at 0, so periodicity holds by construction.
    """

    values: Array

    @classmethod
    def sample(cls, fn: Callable[[Array], Array], n: int, dim: int) -> "PeriodicDisplacement":
        nodes = grid_nodes(n, dim)
        return cls(values=np.asarray(fn(nodes), dtype=float).reshape((n,) * dim + (dim,)))

    @property
    def dim(self) -> int:
        return int(self.values.shape[-1])

    @property
    def grid_shape(self) -> tuple[int, ...]:
        return tuple(int(n) for n in self.values.shape[:-1])

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.linalg.norm(self.values, axis=-1))) if self.values.size else 0.0

    def __call__(self, points: Array) -> Array:
        pts = _points(points, self.dim)
        coords = (pts * np.asarray(self.grid_shape, dtype=float)).T
        out = np.empty_like(pts)
        for c in range(self.dim):
            out[:, c] = ndimage.map_coordinates(
                self.values[..., c], coords, order=1, mode="grid-wrap"
            )
        return out

    def jacobian(self, points: Array) -> Array:
        pts = _points(points, self.dim)
        out = np.empty((pts.shape[0], self.dim, self.dim))
        for j, n in enumerate(self.grid_shape):
            h = 0.5 / n
            step = np.zeros(self.dim)
            step[j] = h
            out[:, :, j] = (self(pts + step) - self(pts - step)) / (2 * h)
        return out


@final
@dataclass(frozen=True, eq=False)
class CallableField:
    """Wraps a vectorized periodic function; the Jacobian is a central difference."""

    fn: Callable[[Array], Array]
    dim: int
    bound: float
    step: float = 1e-6

    @property
    def sup_norm(self) -> float:
        return self.bound

    def __call__(self, points: Array) -> Array:
        return np.asarray(self.fn(_points(points, self.dim)), dtype=float)

    def jacobian(self, points: Array) -> Array:
        pts = _points(points, self.dim)
        out = np.empty((pts.shape[0], self.dim, self.dim))
        for j in range(self.dim):
            e = np.zeros(self.dim)
            e[j] = self.step
            out[:, :, j] = (self(pts + e) - self(pts - e)) / (2 * self.step)
        return out


@final
@dataclass(frozen=True, eq=False)
class ConjugatedField:
    """Perturbation u with A + u = T A T^{-1} for T = id + t.

    The semiconjugacy of this map is T^{-1}, which gives a reference solution.
    """

    matrix: Array
    t: PeriodicField

    @property
    def dim(self) -> int:
        return self.t.dim

    @property
    def sup_norm(self) -> float:
        return float((np.linalg.norm(self.matrix, 2) + 1.0) * self.t.sup_norm)

    def inverse_conjugacy(self, points: Array, tol: float = 1e-14, max_iter: int = 200) -> Array:
        """T^{-1}(x) by the fixed point y = x - t(y)."""
        x = _points(points, self.dim)
        y = x.copy()
        for _ in range(max_iter):
            nxt = x - self.t(y)
            if np.max(np.abs(nxt - y), initial=0.0) < tol:
                return nxt
            y = nxt
        raise NotInvertible("T = id + t is not invertible by fixed-point iteration")

    def __call__(self, points: Array) -> Array:
        x = _points(points, self.dim)
        y = self.inverse_conjugacy(x)
        ay = y @ self.matrix.T
        return (y - x) @ self.matrix.T + self.t(ay)

    def jacobian(self, points: Array) -> Array:
        x = _points(points, self.dim)
        y = self.inverse_conjugacy(x)
        eye = np.eye(self.dim)
        d_inv = np.linalg.inv(eye + self.t.jacobian(y))
        dt = self.t.jacobian(y @ self.matrix.T)
        return self.matrix @ (d_inv - eye) + dt @ self.matrix @ d_inv


@final
@dataclass(frozen=True, eq=False)
class ToralMap:
    """The map f(x) = Ax + u(x) on the torus, with its preimage solver."""

    matrix: Array
    field: PeriodicField
    matrix_inverse: Array = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix_inverse", np.linalg.inv(self.matrix))

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def lift(self, points: Array) -> Array:
        pts = _points(points, self.dim)
        return pts @ self.matrix.T + self.field(pts)

    def forward(self, points: Array) -> Array:
        """f on the torus, reduced into [0,1)^d."""
        return np.mod(self.lift(points), 1.0)

    def derivative(self, points: Array) -> Array:
        return self.matrix[None, :, :] + self.field.jacobian(points)

    def preimage(self, points: Array) -> Array:
        """f^{-1} on the torus by the contraction x -> A^{-1}(y - u(x)), seeded at A^{-1}y.

        Newton steps take over once the contraction is seen to converge.

        Raises:
            NotInvertible: If the iteration fails to contract
        """
        y = _points(points, self.dim)
        x = y @ self.matrix_inverse.T
        steps: list[float] = []
        for it in range(PREIMAGE_MAX_ITER):
            nxt = (y - self.field(x)) @ self.matrix_inverse.T
            step = float(np.max(np.abs(nxt - x), initial=0.0))
            x = nxt
            if step < PREIMAGE_TOL:
                return np.mod(x, 1.0)
            steps.append(step)
            if len(steps) >= 4 and steps[-1] < steps[-4]:
                return np.mod(self._newton(y, x), 1.0)
            if it >= 8 and step > 10.0 * max(steps[0], 1.0):
                break
        raise NotInvertible(
            "preimage iteration does not contract",
            iterations=len(steps),
            last_step=steps[-1] if steps else None,
        )

    def _newton(self, y: Array, x: Array) -> Array:
        for _ in range(50):
            residual = self.lift(x) - y
            delta = np.linalg.solve(self.derivative(x), residual[..., None])[..., 0]
            x = x - delta
            if float(np.max(np.abs(delta), initial=0.0)) < PREIMAGE_TOL:
                return x
        # fall back to plain contraction from the Newton iterate
        for _ in range(PREIMAGE_MAX_ITER):
            nxt = (y - self.field(x)) @ self.matrix_inverse.T
            if float(np.max(np.abs(nxt - x), initial=0.0)) < PREIMAGE_TOL:
                return nxt
            x = nxt
        raise NotInvertible("preimage iteration does not converge")


@final
@dataclass(frozen=True, eq=False)
class CorrectionSeries:
    """Truncated stable/unstable correction series for a toral map.

    The series is itself the corrector w: it is continuous, Z^d-periodic and
    can be evaluated at any point.
    """

    toral_map: ToralMap
    splitting: HyperbolicSplitting
    terms: int
    unstable_ops: tuple[Array, ...]
    stable_ops: tuple[Array, ...]

    @classmethod
    def build(cls, toral_map: ToralMap, splitting: HyperbolicSplitting, terms: int) -> "CorrectionSeries":
        s = splitting.stable_dim
        inv = splitting.basis_inverse
        pi_s, pi_u = inv[:s], inv[s:]
        unstable_ops = []
        stable_ops = []
        if splitting.unstable_dim:
            a_u_inv = np.linalg.inv(splitting.unstable_block)
            power = a_u_inv.copy()
            for _ in range(terms):
                unstable_ops.append(splitting.e_unstable @ power @ pi_u)
                power = a_u_inv @ power
        if s:
            power = np.eye(s)
            for _ in range(terms):
                stable_ops.append(splitting.e_stable @ power @ pi_s)
                power = splitting.stable_block @ power
        return cls(
            toral_map=toral_map,
            splitting=splitting,
            terms=terms,
            unstable_ops=tuple(unstable_ops),
            stable_ops=tuple(stable_ops),
        )

    @property
    def dim(self) -> int:
        return self.toral_map.dim

    @property
    def sup_norm(self) -> float:
        """Upper bound sum ||op|| * sup|u| over the series terms."""
        ops = self.unstable_ops + self.stable_ops
        return float(sum(np.linalg.norm(op, 2) for op in ops) * self.toral_map.field.sup_norm)

    def _evaluate_chunk(self, points: Array) -> Array:
        u = self.toral_map.field
        x = np.mod(points, 1.0)
        w = np.zeros_like(x)
        current = x
        for op in self.unstable_ops:
            w += u(current) @ op.T
            current = self.toral_map.forward(current)
        current = x
        for op in self.stable_ops:
            current = self.toral_map.preimage(current)
            w -= u(current) @ op.T
        return w

    def _residual_chunk(self, points: Array) -> float:
        """Residual at points from one orbit walk.

        w(f(x)) reuses the samples u(f^k x) and u(f^-k x) taken for w(x), so
        only one extra forward step is needed.
        """
        u = self.toral_map.field
        x = np.mod(points, 1.0)
        w_x = np.zeros_like(x)
        w_fx = np.zeros_like(x)
        current = x
        u_current = u(current)
        for op in self.unstable_ops:
            w_x += u_current @ op.T
            current = self.toral_map.forward(current)
            u_current = u(current)
            w_fx += u_current @ op.T
        current = x
        u_current = u(current)
        for op in self.stable_ops:
            w_fx -= u_current @ op.T
            current = self.toral_map.preimage(current)
            u_current = u(current)
            w_x -= u_current @ op.T
        a = self.toral_map.matrix
        lhs = (x + w_x) @ a.T
        rhs = self.toral_map.lift(x) + w_fx
        return float(np.max(torus_distance(lhs, rhs), initial=0.0))

    def residual(self, points: Array) -> float:
        """Same value as ``residual(A, u, self, points)`` at about half the cost."""
        pts = _points(points, self.dim)
        if pts.shape[0] == 0:
            return 0.0
        chunks = [pts[i : i + CHUNK] for i in range(0, pts.shape[0], CHUNK)]
        return max(parallel_map(self._residual_chunk, chunks))

    def __call__(self, points: Array) -> Array:
        pts = _points(points, self.dim)
        if self.terms == 0 or pts.shape[0] == 0:
            return np.zeros_like(pts)
        chunks = [pts[i : i + CHUNK] for i in range(0, pts.shape[0], CHUNK)]
        return np.concatenate(parallel_map(self._evaluate_chunk, chunks), axis=0)


def residual(
    matrix: MatrixLike,
    u: PeriodicField,
    w: Callable[[Array], Array],
    samples: Array | Sequence[Sequence[float]],
) -> float:
    """Sup over samples of the torus distance between A(x + w(x)) and f(x) + w(f(x)).

    Args:
        matrix: The linear part A
        u: Periodic perturbation
        w: Candidate corrector (any vectorized callable)
        samples: Points of shape (N, d)

    Returns:
        The sup residual

    Raises:
        DimensionMismatch: If the dimensions of A, u and the samples disagree
    """
    a = as_float_matrix(matrix)
    d = a.shape[0]
    if u.dim != d:
        raise DimensionMismatch(f"field has dimension {u.dim}, matrix {d}", expected=d, got=u.dim)
    x = _points(samples, d)
    if x.shape[0] == 0:
        return 0.0
    fx = x @ a.T + u(x)
    lhs = (x + np.asarray(w(x))) @ a.T
    rhs = fx + np.asarray(w(fx))
    return float(np.max(torus_distance(lhs, rhs)))


def truncation_terms(
    norm: AdaptedNorm, sup_u: float, tol: float, max_terms: int
) -> int:
    """Smallest K with kappa * p * sup|u| * lambda^K <= tol/4.

    kappa is the condition number between the adapted and Euclidean norms and
    p bounds the splitting projections.

    Raises:
        Budget: If K would exceed max_terms
    """
    if sup_u == 0.0:
        return 0
    split = norm.splitting
    kappa = float(np.linalg.cond(norm.to_adapted_coords, 2))
    s = split.stable_dim
    inv = split.basis_inverse
    p = 0.0
    if s:
        p += float(np.linalg.norm(split.e_stable @ inv[:s], 2))
    if split.unstable_dim:
        p += float(np.linalg.norm(split.e_unstable @ inv[s:], 2))
    bound = kappa * p * sup_u
    k = 0
    while bound * norm.certified_rate**k > tol / 4:
        k += 1
        if k > max_terms:
            raise Budget(
                f"series needs more than {max_terms} terms",
                max_terms=max_terms,
                rate=norm.certified_rate,
            )
    return k


@final
@dataclass(frozen=True, eq=False)
class SemiconjugacySolution:
    """h = id + w with A h = h f.

    ``w`` is the truncated series, valid at any point, and ``residual_sup`` is
    measured on it. ``grid_field`` samples w on the solve grid for export;
    its own interpolation residual is ``grid_residual_sup``.
    """

    w: CorrectionSeries
    residual_sup: float
    series_terms_used: int
    splitting: HyperbolicSplitting
    norm: AdaptedNorm
    tol: float
    grid: int
    verification: Array = field(repr=False)

    @property
    def grid_shape(self) -> tuple[int, ...]:
        return (self.grid,) * self.w.dim

    @property
    def verification_nodes(self) -> int:
        return int(self.verification.shape[0])

    def evaluate(self, points: Array) -> Array:
        return self.w(points)

    def __call__(self, points: Array) -> Array:
        return self.w(points)

    @cached_property
    def grid_field(self) -> PeriodicDisplacement:
        return PeriodicDisplacement.sample(self.w, self.grid, self.w.dim)

    @cached_property
    def grid_residual_sup(self) -> float:
        return residual(self.splitting.matrix, self.w.toral_map.field, self.grid_field, self.verification)


def _check_limits(d: int, grid: int) -> None:
    if d > MAX_DIM:
        raise DimensionMismatch(f"dimension {d} exceeds the limit {MAX_DIM}", dim=d, limit=MAX_DIM)
    if not 1 <= grid <= MAX_GRID:
        raise InputError(f"grid must lie in [1, {MAX_GRID}], got {grid}", grid=grid, limit=MAX_GRID)


def verification_points(n: int, d: int, seed: int = 0) -> Array:
    """Nodes of the grid twice as fine as n, or a seeded subset when there are too many."""
    fine = 2 * n
    total = fine**d
    if total <= MAX_VERIFY_NODES:
        return grid_nodes(fine, d)
    rng = np.random.default_rng(seed)
    index = np.sort(rng.choice(total, size=MAX_VERIFY_NODES, replace=False))
    coords = np.stack(np.unravel_index(index, (fine,) * d), axis=-1)
    return coords / fine


def solve_semiconjugacy(
    matrix: MatrixLike,
    u: PeriodicField,
    tol: float = 1e-8,
    max_terms: int = 200,
    grid: int = 64,
    margin: float = 0.01,
    seed: int = 0,
) -> SemiconjugacySolution:
    """Solve A h = h f for f = A + u.

    Args:
        matrix: Hyperbolic integer matrix A
        u: Periodic perturbation
        tol: Residual tolerance
        max_terms: Cap on the number of series terms
        grid: Solve-grid resolution per axis
        margin: Adapted-norm margin
        seed: Seed for subsampling the verification grid

    Returns:
        The solution with its verified residual

    Raises:
        NotHyperbolic: If A is not hyperbolic
        NotInvertible: If f fails the preimage contraction check
        Budget: If max_terms is reached before the tolerance
    """
    exact = as_exact_matrix(matrix)
    d = int(exact.rows)
    if u.dim != d:
        raise DimensionMismatch(f"field has dimension {u.dim}, matrix {d}", expected=d, got=u.dim)
    _check_limits(d, grid)
    split = hyperbolic_splitting(exact)
    norm = adapted_norm(split, margin)
    toral = ToralMap(matrix=split.matrix, field=u)

    nodes = grid_nodes(grid, d)
    # invertibility check on the solve grid
    parallel_map(toral.preimage, [nodes[i : i + CHUNK] for i in range(0, nodes.shape[0], CHUNK)])

    terms = truncation_terms(norm, u.sup_norm, tol, max_terms)
    series = CorrectionSeries.build(toral, split, terms)
    logger.debug("solve_semiconjugacy: K=%d lambda=%.6g sup|u|=%.6g", terms, norm.certified_rate, u.sup_norm)

    check = verification_points(grid, d, seed)
    res = series.residual(check)
    if res > tol:
        raise Budget(
            f"residual {res:.3e} exceeds tolerance {tol:.3e} after {terms} terms",
            residual=res,
            tol=tol,
            terms=terms,
        )
    return SemiconjugacySolution(
        w=series,
        residual_sup=res,
        series_terms_used=terms,
        splitting=split,
        norm=norm,
        tol=tol,
        grid=grid,
        verification=check,
    )


def picard_semiconjugacy(
    matrix: MatrixLike,
    u: PeriodicField,
    points: Array,
    tol: float = 1e-8,
    max_terms: int = 200,
    margin: float = 0.01,
) -> Array:
    """Corrector values at points by Picard iteration on orbit windows.

    On the window x_{-K}, ..., x_K around each point the iteration

        W[j] <- P_u A^{-1}(u(x_j) + W[j+1]) + P_s(A W[j-1] - u(x_{j-1}))

    runs from W = 0 until the increment drops below tol/10.

    Raises:
        Budget: If the iteration does not settle within max_terms sweeps
    """
    exact = as_exact_matrix(matrix)
    d = int(exact.rows)
    split = hyperbolic_splitting(exact)
    norm = adapted_norm(split, margin)
    toral = ToralMap(matrix=split.matrix, field=u)
    x0 = np.mod(_points(points, d), 1.0)
    k = truncation_terms(norm, u.sup_norm, tol, max_terms)
    if k == 0:
        return np.zeros_like(x0)

    orbit = [x0]
    for _ in range(k):
        orbit.append(toral.forward(orbit[-1]))
    back = [x0]
    for _ in range(k + 1):
        back.append(toral.preimage(back[-1]))
    # window index j + k + 1 holds x_j for j in [-k-1, k]
    window = back[::-1] + orbit[1:]
    u_vals = [u(x) for x in window]

    p_s = split.e_stable @ split.basis_inverse[: split.stable_dim]
    p_u = split.e_unstable @ split.basis_inverse[split.stable_dim :]
    a = split.matrix
    a_inv = np.linalg.inv(a)
    size = 2 * k + 1
    w = np.zeros((size + 2,) + x0.shape)
    for sweep in range(max_terms):
        new = np.zeros_like(w)
        for idx in range(1, size + 1):
            unstable = (u_vals[idx] + w[idx + 1]) @ (p_u @ a_inv).T
            stable = (w[idx - 1] @ a.T - u_vals[idx - 1]) @ p_s.T
            new[idx] = unstable + stable
        increment = float(np.max(np.abs(new - w)))
        w = new
        if increment < tol / 10:
            logger.debug("picard_semiconjugacy: settled after %d sweeps", sweep + 1)
            return w[k + 1]
    raise Budget(f"Picard iteration did not settle in {max_terms} sweeps", max_terms=max_terms)


def holder_exponent_estimate(
    w: Callable[[Array], Array],
    matrix: MatrixLike,
    u: PeriodicField,
    pair_samples: int = 64,
    seed: int = 0,
    min_scale: float = 1e-4,
    max_scale: float = 1e-1,
) -> float:
    """Least-squares slope of log dist(h(x), h(y)) against log dist(x, y).

    Diagnostic only. Pairs are drawn at log-spaced separations.

    Raises:
        InsufficientSamples: If fewer than 8 usable pairs are available
    """
    a = as_float_matrix(matrix)
    d = a.shape[0]
    if u.dim != d:
        raise DimensionMismatch(f"field has dimension {u.dim}, matrix {d}", expected=d, got=u.dim)
    if pair_samples < 8:
        raise InsufficientSamples("at least 8 pairs are needed", pair_samples=pair_samples)
    rng = np.random.default_rng(seed)
    x = rng.random((pair_samples, d))
    directions = rng.normal(size=(pair_samples, d))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    scales = np.logspace(np.log10(min_scale), np.log10(max_scale), pair_samples)
    y = x + scales[:, None] * directions
    hx = x + np.asarray(w(x))
    hy = y + np.asarray(w(y))
    dx = torus_distance(x, y)
    dh = torus_distance(hx, hy)
    usable = (dx > 0) & (dh > 0)
    if int(np.count_nonzero(usable)) < 8:
        raise InsufficientSamples("too few separated pairs", usable=int(np.count_nonzero(usable)))
    slope, _ = np.polyfit(np.log(dx[usable]), np.log(dh[usable]), 1)
    return float(slope)


def linear_data(
    lift: Callable[[Array], Array], dim: int, samples: int = 8, seed: int = 0
) -> tuple[list[list[int]], CallableField]:
    """Split a lift F of a torus map as F(x) = Ax + u(x) with A integer and u periodic.

    A is read off from F(x + e_j) - F(x) and checked at several sample points.

    Raises:
        InputError: If the differences are not integer and constant
    """
    rng = np.random.default_rng(seed)
    sample_points = np.vstack([np.zeros((1, dim)), rng.random((samples - 1, dim))])
    base = np.asarray(lift(sample_points), dtype=float)
    columns = []
    for j in range(dim):
        e = np.zeros(dim)
        e[j] = 1.0
        diff = np.asarray(lift(sample_points + e), dtype=float) - base
        col = np.round(diff[0])
        if not np.allclose(diff, col, atol=1e-9):
            raise InputError(
                "lift differences are not constant integers", column=j
            )
        columns.append(col)
    a = np.stack(columns, axis=1)
    sample = grid_nodes(16, dim)
    remainder = np.asarray(lift(sample), dtype=float) - sample @ a.T
    bound = float(np.max(np.linalg.norm(remainder, axis=1))) * 1.1

    def u(points: Array) -> Array:
        return np.asarray(lift(points), dtype=float) - points @ a.T

    return a.astype(int).tolist(), CallableField(fn=u, dim=dim, bound=bound)


def field_from_spec(spec: Mapping[str, Any], dim: int) -> PeriodicField:
    """Load a perturbation from a JSON document: trigonometric modes or grid samples."""
    if "modes" in spec:
        return TrigField.from_spec(spec, dim)
    if "values" in spec:
        values = np.asarray(spec["values"], dtype=float)
        if values.shape[-1] != dim or values.ndim != dim + 1:
            raise DimensionMismatch(
                "grid values must have shape (n,)*d + (d,)", dim=dim, shape=list(values.shape)
            )
        return PeriodicDisplacement(values=values)
    if not spec or spec.get("zero"):
        return ZeroField(dim=dim)
    raise InputError("field document needs 'modes' or 'values'", keys=sorted(spec))
