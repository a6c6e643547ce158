"""Cone-field certificates for compositions f^N g f^N.

All cone arithmetic happens in adapted coordinates z = (z_s, z_u) of the
reference hyperbolic map f, with the box norm max(|z_s|, |z_u|). The
derivative of g is split into blocks

    [[a, b],
     [c, d]]

and the certificate needs a lower bound r on the conorm of d together with
an upper bound C on the box operator norm. The same bounds are taken for the
inverse derivative so that the stable cones are covered as well.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any, Literal, Protocol, final, runtime_checkable

import numpy as np
from fastmcp.utilities.logging import get_logger
from numpy.typing import NDArray

from rigidity_lab.config import parallel_map
from rigidity_lab.core.matrix_core import (
    AdaptedNorm,
    HyperbolicSplitting,
    MatrixLike,
    adapted_norm,
    as_float_matrix,
)
from rigidity_lab.core.semiconj import PeriodicField
from rigidity_lab.errors import (
    ConeViolation,
    DimensionMismatch,
    InsufficientSamples,
    NoFinitePower,
    ToleranceOutOfRange,
    TransversalityFailure,
)

logger = get_logger(__name__)

Array = NDArray[np.float64]

TRANSVERSALITY_TOL = 1e-9
MAX_POWER = 1_000_000
SAMPLE_CHUNK = 4096
EMPIRICAL_R_FACTOR = 0.9
EMPIRICAL_C_FACTOR = 1.1


@runtime_checkable
class MapData(Protocol):
    """A differentiable map of R^d descending to the torus."""

    @property
    def dim(self) -> int: ...

    @property
    def is_linear(self) -> bool: ...

    def apply(self, points: Array) -> Array: ...

    def derivative(self, points: Array) -> Array: ...


@final
@dataclass(frozen=True, eq=False)
class LinearMapData:
    """x -> Bx."""

    matrix: Array

    @classmethod
    def of(cls, matrix: MatrixLike) -> "LinearMapData":
        return cls(matrix=as_float_matrix(matrix))

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def is_linear(self) -> bool:
        return True

    def apply(self, points: Array) -> Array:
        return np.asarray(points, dtype=float) @ self.matrix.T

    def derivative(self, points: Array) -> Array:
        pts = np.atleast_2d(points)
        return np.broadcast_to(self.matrix, (pts.shape[0],) + self.matrix.shape).copy()


@final
@dataclass(frozen=True, eq=False)
class ToralMapData:
    """x -> Bx + v(x) with v periodic; the Jacobian comes from the field."""

    matrix: Array
    field: PeriodicField

    def __post_init__(self) -> None:
        if self.field.dim != self.matrix.shape[0]:
            raise DimensionMismatch(
                "field dimension does not match the matrix",
                expected=int(self.matrix.shape[0]),
                got=self.field.dim,
            )

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def is_linear(self) -> bool:
        return False

    def apply(self, points: Array) -> Array:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return pts @ self.matrix.T + self.field(pts)

    def derivative(self, points: Array) -> Array:
        return self.matrix[None, :, :] + self.field.jacobian(points)


@final
@dataclass(frozen=True, eq=False)
class ComposedMap:
    """Composition of map data; ``maps[0]`` is applied first."""

    maps: tuple[MapData, ...]

    def __post_init__(self) -> None:
        dims = {m.dim for m in self.maps}
        if len(dims) != 1:
            raise DimensionMismatch("composed maps have different dimensions", dims=sorted(dims))

    @classmethod
    def sandwich(cls, f: MapData, g: MapData, power: int) -> "ComposedMap":
        """f^power then g then f^power."""
        return cls(maps=(f,) * power + (g,) + (f,) * power)

    @property
    def dim(self) -> int:
        return self.maps[0].dim

    @property
    def is_linear(self) -> bool:
        return all(m.is_linear for m in self.maps)

    def apply(self, points: Array) -> Array:
        x = np.atleast_2d(np.asarray(points, dtype=float))
        for m in self.maps:
            x = m.apply(x)
        return x

    def derivative(self, points: Array) -> Array:
        x = np.atleast_2d(np.asarray(points, dtype=float))
        jac = np.broadcast_to(np.eye(self.dim), (x.shape[0], self.dim, self.dim)).copy()
        for m in self.maps:
            jac = m.derivative(x) @ jac
            x = m.apply(x)
        return jac


@final
@dataclass(frozen=True, eq=False)
class ConeSpec:
    """Unstable cones |z_s| <= eps |z_u| and stable cones |z_u| <= eps |z_s|."""

    splitting: HyperbolicSplitting
    epsilon: float
    norm: AdaptedNorm

    def __post_init__(self) -> None:
        _check_eps(self.epsilon)

    @classmethod
    def build(cls, split: HyperbolicSplitting, epsilon: float, margin: float = 0.01) -> "ConeSpec":
        return cls(splitting=split, epsilon=epsilon, norm=adapted_norm(split, margin))

    def in_unstable_cone(self, vectors: Array, aperture: float | None = None) -> NDArray[np.bool_]:
        zs, zu = self.norm.components(vectors)
        eps = self.epsilon if aperture is None else aperture
        return np.linalg.norm(zs, axis=-1) <= eps * np.linalg.norm(zu, axis=-1)

    def in_stable_cone(self, vectors: Array, aperture: float | None = None) -> NDArray[np.bool_]:
        zs, zu = self.norm.components(vectors)
        eps = self.epsilon if aperture is None else aperture
        return np.linalg.norm(zu, axis=-1) <= eps * np.linalg.norm(zs, axis=-1)


def _check_eps(eps: float) -> None:
    if not 0.0 < eps <= 1.0:
        raise ToleranceOutOfRange(f"epsilon must lie in (0, 1], got {eps}", epsilon=eps)


def _blocks(m: Array, k: int) -> tuple[Array, Array, Array, Array]:
    return m[..., :k, :k], m[..., :k, k:], m[..., k:, :k], m[..., k:, k:]


def _op_norm(m: Array) -> Array:
    if m.shape[-1] == 0 or m.shape[-2] == 0:
        return np.zeros(m.shape[:-2])
    return np.linalg.norm(m, ord=2, axis=(-2, -1))


def _conorm(m: Array) -> Array:
    if m.shape[-1] == 0:
        return np.full(m.shape[:-2], np.inf)
    return np.linalg.svd(m, compute_uv=False)[..., -1]


def _box_bounds(adapted: Array, k: int) -> tuple[Array, Array, Array]:
    """Conorm of the unstable block, conorm of the stable block and the box-norm bound."""
    a, b, c, d = _blocks(adapted, k)
    bound = np.maximum(_op_norm(a) + _op_norm(b), _op_norm(c) + _op_norm(d))
    return _conorm(d), _conorm(a), bound


@final
@dataclass(frozen=True, eq=False)
class ConeConstants:
    """Constants r, C and lambda for a perturbing map g.

    ``empirical`` is set when g is nonlinear: r and C are then sampled
    extrema widened by the factors 0.9 and 1.1 and certify nothing.
    """

    r: float
    C: float
    lam: float
    empirical: bool
    samples: int
    norm: AdaptedNorm = field(repr=False)

    @property
    def label(self) -> Literal["exact", "empirical"]:
        return "empirical" if self.empirical else "exact"


def cone_constants(
    split: HyperbolicSplitting,
    g: MapData,
    eps: float = 1.0,
    margin: float = 0.01,
    samples: int = 4096,
    seed: int = 0,
) -> ConeConstants:
    """Compute r, C and lambda for g against the splitting of f.

    Args:
        split: Splitting of the reference hyperbolic map f
        g: Linear or toral map data
        eps: Cone aperture in (0, 1]
        margin: Adapted-norm margin
        samples: Sample points for a nonlinear g
        seed: Seed for the sample points

    Returns:
        The constants, labelled exact or empirical

    Raises:
        TransversalityFailure: If the unstable block of Dg (or the stable block of Dg^-1) is singular
    """
    _check_eps(eps)
    if g.dim != split.dim:
        raise DimensionMismatch("g does not match the splitting dimension", expected=split.dim, got=g.dim)
    norm = adapted_norm(split, margin)
    if g.is_linear:
        points = np.zeros((1, split.dim))
    else:
        if samples < 1:
            raise InsufficientSamples("at least one sample is needed", samples=samples)
        points = np.random.default_rng(seed).random((samples, split.dim))

    def evaluate(chunk: Array) -> tuple[float, float, int]:
        jac = g.derivative(chunk)
        forward = norm.to_adapted_coords @ jac @ norm.from_adapted_coords
        try:
            backward = np.linalg.inv(forward)
        except np.linalg.LinAlgError:
            return 0.0, float("inf"), 0
        k = split.stable_dim
        r_fwd, _, c_fwd = _box_bounds(forward, k)
        _, r_bwd, c_bwd = _box_bounds(backward, k)
        r_all = np.minimum(r_fwd, r_bwd)
        worst = int(np.argmin(r_all))
        return float(r_all[worst]), float(max(np.max(c_fwd), np.max(c_bwd))), worst

    chunks = [points[i : i + SAMPLE_CHUNK] for i in range(0, points.shape[0], SAMPLE_CHUNK)]
    results = parallel_map(evaluate, chunks)
    r = min(res[0] for res in results)
    c = max(res[1] for res in results)
    if not math.isfinite(r):
        r = 1.0
    if r <= TRANSVERSALITY_TOL or not math.isfinite(c):
        index = min(range(len(results)), key=lambda i: results[i][0])
        at = chunks[index][results[index][2]]
        raise TransversalityFailure(
            "Dg does not map the unstable space transversally to the stable space",
            r=r,
            point=[float(t) for t in at],
        )
    empirical = not g.is_linear
    if empirical:
        r *= EMPIRICAL_R_FACTOR
        c *= EMPIRICAL_C_FACTOR
    logger.debug("cone_constants: r=%.12g C=%.12g lam=%.12g empirical=%s", r, c, norm.certified_rate, empirical)
    return ConeConstants(r=r, C=c, lam=norm.certified_rate, empirical=empirical, samples=int(points.shape[0]), norm=norm)


@final
@dataclass(frozen=True)
class PowerInequality:
    name: str
    lhs: float
    rhs: float
    slack: float
    holds: bool


@final
@dataclass(frozen=True)
class ConeCertificate:
    """Constants and minimal power N placing f^N g f^N in the Anosov semigroup."""

    r: float
    C: float
    lam: float
    epsilon: float
    delta0: float
    T: float
    N: int
    inequalities: tuple[PowerInequality, ...]
    empirical: bool = False

    @property
    def slacks(self) -> tuple[float, ...]:
        return tuple(q.slack for q in self.inequalities)


def power_inequalities(
    r: float, c: float, lam: float, eps: float, delta0: float, t: float, n: int
) -> tuple[PowerInequality, ...]:
    """Evaluate the three conditions on the power n."""
    contraction = lam ** (2 * n)
    expansion = lam ** (-n) * (r * lam ** (-n) - c * lam**n * eps)
    return (
        _upper("stable_into_delta0", contraction * eps, delta0),
        _upper("aperture_halved", contraction * t, eps / 2),
        _lower("expansion_by_two", expansion, 2.0),
    )


def _upper(name: str, lhs: float, rhs: float) -> PowerInequality:
    return PowerInequality(name=name, lhs=lhs, rhs=rhs, slack=rhs - lhs, holds=lhs <= rhs)


def _lower(name: str, lhs: float, rhs: float) -> PowerInequality:
    return PowerInequality(name=name, lhs=lhs, rhs=rhs, slack=lhs - rhs, holds=lhs >= rhs)


def certify_power(
    constants: ConeConstants | tuple[float, float, float],
    eps: float = 1.0,
    delta0: float | None = None,
    max_power: int = MAX_POWER,
) -> ConeCertificate:
    """Find the smallest N satisfying the three cone inequalities.

    Args:
        constants: ConeConstants, or a raw (r, C, lambda) triple
        eps: Cone aperture in (0, 1]
        delta0: Override for delta0 = r/(2C); must satisfy 0 < delta0 < r/C
        max_power: Search cap

    Returns:
        The certificate with the slack of each inequality at N

    Raises:
        NoFinitePower: If r <= 0, lambda >= 1 or the cap is reached
    """
    _check_eps(eps)
    if isinstance(constants, ConeConstants):
        r, c, lam, empirical = constants.r, constants.C, constants.lam, constants.empirical
    else:
        r, c, lam = (float(x) for x in constants)
        empirical = False
    if r <= 0.0 or c <= 0.0 or not 0.0 <= lam < 1.0:
        raise NoFinitePower("certificate needs r > 0, C > 0 and lambda < 1", r=r, C=c, lam=lam)
    d0 = r / (2.0 * c) if delta0 is None else float(delta0)
    if not 0.0 < d0 < r / c:
        raise ToleranceOutOfRange(f"delta0 must lie in (0, r/C) = (0, {r / c:.6g})", delta0=d0)
    t = c * (d0 + 1.0) / (r - c * d0)

    for n in range(1, max_power + 1):
        checks = power_inequalities(r, c, lam, eps, d0, t, n)
        if all(q.holds for q in checks):
            logger.debug("certify_power: N=%d delta0=%.6g T=%.6g", n, d0, t)
            return ConeCertificate(
                r=r,
                C=c,
                lam=lam,
                epsilon=eps,
                delta0=d0,
                T=t,
                N=n,
                inequalities=checks,
                empirical=empirical,
            )
    raise NoFinitePower(f"no power up to {max_power} satisfies the inequalities", max_power=max_power)


@final
@dataclass(frozen=True)
class ConeCheckReport:
    """Worst cone ratios and expansions over the sampled points and vectors.

    Ratios are |image off-axis| / |image on-axis| divided by eps/2, so values
    at most 1 pass. Expansions are box-norm growth factors, required >= 2.
    """

    samples: int
    epsilon: float
    violations: int
    worst_unstable_ratio: float
    worst_stable_ratio: float
    worst_unstable_expansion: float
    worst_stable_expansion: float
    first_violation: dict[str, Any] | None = None

    @property
    def passed(self) -> bool:
        return self.violations == 0

    @property
    def expansion_margin(self) -> float:
        return min(self.worst_unstable_expansion, self.worst_stable_expansion) - 2.0


def _boundary_vectors(rng: np.random.Generator, count: int, k: int, d: int, eps: float, stable: bool) -> Array:
    """Adapted vectors with |z_off| = eps |z_on| = eps; stable picks the stable axis."""

    def unit(n: int) -> Array:
        if n == 0:
            return np.zeros((count, 0))
        raw = rng.normal(size=(count, n))
        return raw / np.linalg.norm(raw, axis=1, keepdims=True)

    on_dim, off_dim = (k, d - k) if stable else (d - k, k)
    on, off = unit(on_dim), eps * unit(off_dim)
    return np.hstack([on, off]) if stable else np.hstack([off, on])


def numeric_cone_check(
    candidate: MapData,
    spec: ConeSpec,
    samples: int = 10000,
    seed: int = 0,
    raise_on_violation: bool = True,
) -> ConeCheckReport:
    """Sample points and cone-boundary vectors and test invariance and expansion.

    Unstable cones are pushed forward by DF and must land in the eps/2 cone
    with box norm at least doubled; stable cones are pushed by DF^-1.

    Raises:
        ConeViolation: On the first failing sample when raise_on_violation is set
    """
    if samples < 1:
        raise InsufficientSamples("at least one sample is needed", samples=samples)
    if candidate.dim != spec.splitting.dim:
        raise DimensionMismatch(
            "candidate does not match the splitting dimension",
            expected=spec.splitting.dim,
            got=candidate.dim,
        )
    d = spec.splitting.dim
    k = spec.splitting.stable_dim
    eps = spec.epsilon
    q, q_inv = spec.norm.to_adapted_coords, spec.norm.from_adapted_coords

    rng = np.random.default_rng(seed)
    points = rng.random((samples, d))
    v_unstable = _boundary_vectors(rng, samples, k, d, eps, stable=False)
    v_stable = _boundary_vectors(rng, samples, k, d, eps, stable=True)

    def evaluate(index: slice) -> dict[str, Any]:
        forward = q @ candidate.derivative(points[index]) @ q_inv
        backward = np.linalg.inv(forward)
        wu = np.einsum("nij,nj->ni", forward, v_unstable[index])
        ws = np.einsum("nij,nj->ni", backward, v_stable[index])
        off_u, on_u = np.linalg.norm(wu[:, :k], axis=1), np.linalg.norm(wu[:, k:], axis=1)
        on_s, off_s = np.linalg.norm(ws[:, :k], axis=1), np.linalg.norm(ws[:, k:], axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio_u = np.where(on_u > 0, off_u / (0.5 * eps * on_u), np.inf)
            ratio_s = np.where(on_s > 0, off_s / (0.5 * eps * on_s), np.inf)
        grow_u = np.maximum(off_u, on_u)
        grow_s = np.maximum(off_s, on_s)
        bad = (ratio_u > 1.0) | (ratio_s > 1.0) | (grow_u < 2.0) | (grow_s < 2.0)
        return {
            "ratio_u": float(np.max(ratio_u)),
            "ratio_s": float(np.max(ratio_s)),
            "grow_u": float(np.min(grow_u)),
            "grow_s": float(np.min(grow_s)),
            "bad": np.flatnonzero(bad) + (index.start or 0),
            "ratios": (ratio_u, ratio_s, grow_u, grow_s),
        }

    slices = [slice(i, min(i + SAMPLE_CHUNK, samples)) for i in range(0, samples, SAMPLE_CHUNK)]
    parts = parallel_map(evaluate, slices)
    bad = np.concatenate([p["bad"] for p in parts])
    first = None
    if bad.size:
        i = int(bad[0])
        part = parts[i // SAMPLE_CHUNK]
        j = i - i // SAMPLE_CHUNK * SAMPLE_CHUNK
        ratio_u, ratio_s, grow_u, grow_s = (float(arr[j]) for arr in part["ratios"])
        first = {
            "index": i,
            "x": [float(t) for t in points[i]],
            "v_unstable": [float(t) for t in q_inv @ v_unstable[i]],
            "v_stable": [float(t) for t in q_inv @ v_stable[i]],
            "unstable_ratio": ratio_u,
            "stable_ratio": ratio_s,
            "unstable_expansion": grow_u,
            "stable_expansion": grow_s,
        }
    report = ConeCheckReport(
        samples=samples,
        epsilon=eps,
        violations=int(bad.size),
        worst_unstable_ratio=max(p["ratio_u"] for p in parts),
        worst_stable_ratio=max(p["ratio_s"] for p in parts),
        worst_unstable_expansion=min(p["grow_u"] for p in parts),
        worst_stable_expansion=min(p["grow_s"] for p in parts),
        first_violation=first,
    )
    logger.debug(
        "numeric_cone_check: samples=%d violations=%d margin=%.6g",
        samples,
        report.violations,
        report.expansion_margin,
    )
    if first is not None and raise_on_violation:
        raise ConeViolation(
            f"{report.violations} of {samples} samples leave the cones or fail to expand",
            x=first["x"],
            v=first["v_unstable"],
            margin=min(
                1.0 - max(first["unstable_ratio"], first["stable_ratio"]),
                min(first["unstable_expansion"], first["stable_expansion"]) - 2.0,
            ),
            violations=report.violations,
        )
    return report


@final
@dataclass(frozen=True)
class SemigroupReport:
    member: bool
    check: ConeCheckReport


def semigroup_member(
    split: HyperbolicSplitting,
    candidate: MapData,
    eps: float = 1.0,
    samples: int = 10000,
    seed: int = 0,
    margin: float = 0.01,
) -> SemigroupReport:
    """Sampled membership test of a single map in the Anosov semigroup."""
    spec = ConeSpec.build(split, eps, margin)
    report = numeric_cone_check(candidate, spec, samples=samples, seed=seed, raise_on_violation=False)
    return SemigroupReport(member=report.passed, check=report)


def certified_composition(
    f: MatrixLike | MapData, g: MapData, certificate: ConeCertificate
) -> ComposedMap:
    """The map f^N g f^N for a certificate's N."""
    f_data = f if isinstance(f, MapData) else LinearMapData.of(f)
    return ComposedMap.sandwich(f_data, g, certificate.N)


def map_data(matrix: MatrixLike, field_: PeriodicField | None = None) -> MapData:
    """Linear map data, or toral map data when a perturbation field is given."""
    if field_ is None:
        return LinearMapData.of(matrix)
    return ToralMapData(matrix=as_float_matrix(matrix), field=field_)


def compose(maps: Sequence[MapData]) -> ComposedMap:
    return ComposedMap(maps=tuple(maps))
