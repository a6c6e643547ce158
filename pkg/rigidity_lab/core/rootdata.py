"""Root systems, representation weights and non-resonance.

Vectors live in the usual epsilon-coordinate model and are stored as tuples
of ``Fraction`` so that proportionality tests are exact. Highest-weight
saturation runs on integer Dynkin labels and is converted back to epsilon
coordinates at the end.
"""

import math
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Literal, final

import sympy
from fastmcp.utilities.logging import get_logger

from rigidity_lab.errors import (
    DimensionMismatch,
    EmptyWeightSet,
    InputError,
    InvalidRank,
    NotDominant,
    NotIntegral,
)

logger = get_logger(__name__)

Vec = tuple[Fraction, ...]
Classification = Literal["strong", "weak", "none"]

FAMILIES = ("A", "B", "C", "D", "BC", "E6", "E7", "E8", "F4", "G2")
MIN_RANK = {"A": 1, "B": 2, "C": 2, "D": 2, "BC": 1}
FIXED_RANK = {"E6": 6, "E7": 7, "E8": 8, "F4": 4, "G2": 2}

BC_CAVEAT = (
    "non-reduced BC system: root-sum closure is used as a proxy for Lie "
    "generation without checking that every bracket of root spaces is nonzero"
)


def vec(values: Iterable[int | str | Fraction]) -> Vec:
    """Build an exact vector from ints, Fractions or strings like '1/2'."""
    return tuple(Fraction(v) for v in values)


def inner(u: Vec, v: Vec) -> Fraction:
    return sum((a * b for a, b in zip(u, v, strict=True)), Fraction(0))


def add(u: Vec, v: Vec) -> Vec:
    return tuple(a + b for a, b in zip(u, v, strict=True))


def scale(c: Fraction | int, v: Vec) -> Vec:
    return tuple(c * a for a in v)


def neg(v: Vec) -> Vec:
    return tuple(-a for a in v)


def is_zero(v: Vec) -> bool:
    return all(a == 0 for a in v)


def reflect(v: Vec, beta: Vec) -> Vec:
    """Reflection s_beta(v) = v - 2<v,beta>/<beta,beta> beta."""
    c = 2 * inner(v, beta) / inner(beta, beta)
    return tuple(a - c * b for a, b in zip(v, beta, strict=True))


def _unit(i: int, n: int, c: Fraction | int = 1) -> Vec:
    return tuple(Fraction(c) if j == i else Fraction(0) for j in range(n))


def _chain(n: int, count: int) -> list[Vec]:
    """e_i - e_{i+1} for i < count."""
    return [add(_unit(i, n), _unit(i + 1, n, -1)) for i in range(count)]


def _e8_simple_roots() -> list[Vec]:
    half = Fraction(1, 2)
    first = tuple([half] + [-half] * 6 + [half])
    roots = [first, add(_unit(0, 8), _unit(1, 8))]
    roots += [add(_unit(i + 1, 8), _unit(i, 8, -1)) for i in range(6)]
    return roots


def _simple_roots(family: str, rank: int) -> tuple[int, list[Vec]]:
    """Ambient dimension and ordered simple roots."""
    match family:
        case "A":
            return rank + 1, _chain(rank + 1, rank)
        case "B":
            return rank, _chain(rank, rank - 1) + [_unit(rank - 1, rank)]
        case "C" | "BC":
            return rank, _chain(rank, rank - 1) + [_unit(rank - 1, rank, 2)]
        case "D":
            last = add(_unit(rank - 2, rank), _unit(rank - 1, rank))
            return rank, _chain(rank, rank - 1) + [last]
        case "G2":
            return 3, [vec([1, -1, 0]), vec([-2, 1, 1])]
        case "F4":
            h = Fraction(1, 2)
            return 4, [vec([0, 1, -1, 0]), vec([0, 0, 1, -1]), vec([0, 0, 0, 1]), (h, -h, -h, -h)]
        case "E6" | "E7" | "E8":
            return 8, _e8_simple_roots()[:rank]
    raise InputError(f"unknown root system family '{family}'", family=family)


def weyl_closure(seeds: Iterable[Vec], generators: Sequence[Vec]) -> set[Vec]:
    """Smallest set containing seeds and closed under the given reflections."""
    seen: set[Vec] = set(seeds)
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        for beta in generators:
            w = reflect(v, beta)
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def _to_fraction(x: sympy.Basic) -> Fraction:
    r = sympy.Rational(x)
    return Fraction(int(r.p), int(r.q))


def _inverse(rows: Sequence[Sequence[Fraction | int]]) -> list[list[Fraction]]:
    m = sympy.Matrix(
        [[sympy.Rational(a.numerator, a.denominator) for a in map(Fraction, row)] for row in rows]
    )
    inv = m.inv()
    return [[_to_fraction(inv[i, j]) for j in range(inv.cols)] for i in range(inv.rows)]


@final
@dataclass(frozen=True)
class PositiveRoot:
    """A positive root of the weight-bearing (reduced) system with its Dynkin labels."""

    root: Vec
    labels: tuple[int, ...]


@final
@dataclass(frozen=True)
class RootSystem:
    """Root data of a restricted root system.

    For the non-reduced BC family ``roots`` is the union of the B and C roots
    while the simple roots, Cartan matrix and fundamental weights are those
    of C.
    """

    family: str
    rank: int
    ambient_dim: int
    simple_roots: tuple[Vec, ...]
    roots: tuple[Vec, ...]
    cartan: tuple[tuple[int, ...], ...]
    fundamental_weights: tuple[Vec, ...]
    positive_roots: tuple[PositiveRoot, ...] = field(repr=False)
    _gram_inverse: tuple[tuple[Fraction, ...], ...] = field(repr=False)

    @property
    def reduced(self) -> bool:
        return self.family != "BC"

    @property
    def root_set(self) -> frozenset[Vec]:
        return frozenset(self.roots)

    def simple_reflection(self, i: int, v: Vec) -> Vec:
        return reflect(v, self.simple_roots[i])

    def check_dimension(self, v: Sequence[object]) -> None:
        if len(v) != self.ambient_dim:
            raise DimensionMismatch(
                f"expected a vector of length {self.ambient_dim}, got {len(v)}",
                expected=self.ambient_dim,
                got=len(v),
            )

    def project(self, v: Vec) -> Vec:
        """Orthogonal projection of an ambient vector onto the span of the roots."""
        self.check_dimension(v)
        pairings = [inner(v, beta) for beta in self.simple_roots]
        result = tuple(Fraction(0) for _ in range(self.ambient_dim))
        for row, beta in zip(self._gram_inverse, self.simple_roots, strict=True):
            c = sum((a * b for a, b in zip(row, pairings, strict=True)), Fraction(0))
            result = add(result, scale(c, beta))
        return result

    def dynkin_labels(self, v: Vec) -> tuple[Fraction, ...]:
        """Coefficients 2<v,beta_i>/<beta_i,beta_i> on the simple coroots."""
        self.check_dimension(v)
        return tuple(2 * inner(v, b) / inner(b, b) for b in self.simple_roots)

    def from_labels(self, labels: Sequence[int | Fraction]) -> Vec:
        """Weight with the given Dynkin labels, in epsilon coordinates."""
        if len(labels) != self.rank:
            raise DimensionMismatch(
                f"expected {self.rank} Dynkin labels, got {len(labels)}",
                expected=self.rank,
                got=len(labels),
            )
        result = tuple(Fraction(0) for _ in range(self.ambient_dim))
        for a, w in zip(labels, self.fundamental_weights, strict=True):
            result = add(result, scale(Fraction(a), w))
        return result

    def is_dominant(self, v: Vec) -> bool:
        return all(inner(v, b) >= 0 for b in self.simple_roots)

    def is_integral(self, v: Vec) -> bool:
        return all(x.denominator == 1 for x in self.dynkin_labels(v))


def _resolve_family(family: str, rank: int | None) -> tuple[str, int]:
    name = family.strip().upper()
    if name in ("E", "F", "G"):
        if rank is None:
            raise InvalidRank(f"family {name} needs an explicit rank", family=name)
        name = f"{name}{rank}"
    if name not in FAMILIES:
        raise InputError(f"unknown root system family '{family}'", family=family)
    if name in FIXED_RANK:
        fixed = FIXED_RANK[name]
        if rank is not None and rank != fixed:
            raise InvalidRank(f"{name} has rank {fixed}, got {rank}", family=name, rank=rank)
        return name, fixed
    if rank is None or rank < MIN_RANK[name]:
        raise InvalidRank(
            f"{name} requires rank >= {MIN_RANK[name]}, got {rank}",
            family=name,
            rank=rank,
        )
    return name, rank


def build_root_system(family: str, rank: int | None = None) -> RootSystem:
    """Construct the root system of a family and rank.

    Args:
        family: One of A, B, C, D, BC, E6, E7, E8, F4, G2 (E, F, G with a rank also accepted)
        rank: Rank; optional for the exceptional families

    Returns:
        The root system with all invariants checked

    Raises:
        InvalidRank: If the rank is not valid for the family
    """
    name, ell = _resolve_family(family, rank)
    n, simple = _simple_roots(name, ell)

    roots = weyl_closure(simple, simple)
    roots |= {neg(r) for r in roots}
    if name == "BC":
        _, b_simple = _simple_roots("B", ell) if ell >= 2 else (n, [_unit(0, n)])
        b_roots = weyl_closure(b_simple, b_simple)
        roots |= b_roots | {neg(r) for r in b_roots}

    cartan = tuple(
        tuple(int(2 * inner(bi, bj) / inner(bj, bj)) for bj in simple) for bi in simple
    )
    cartan_inv = _inverse(cartan)
    fundamental = []
    for i in range(ell):
        w = tuple(Fraction(0) for _ in range(n))
        for k in range(ell):
            w = add(w, scale(cartan_inv[i][k], simple[k]))
        fundamental.append(w)

    gram = [[inner(a, b) for b in simple] for a in simple]
    gram_inv = tuple(tuple(row) for row in _inverse(gram))

    reduced_roots = weyl_closure(simple, simple)
    reduced_roots |= {neg(r) for r in reduced_roots}
    height = tuple(Fraction(0) for _ in range(n))
    for w in fundamental:
        height = add(height, w)
    positive = []
    for alpha in sorted(reduced_roots):
        if inner(alpha, height) <= 0:
            continue
        labels = tuple(int(2 * inner(alpha, b) / inner(b, b)) for b in simple)
        positive.append(PositiveRoot(root=alpha, labels=labels))

    rs = RootSystem(
        family=name,
        rank=ell,
        ambient_dim=n,
        simple_roots=tuple(simple),
        roots=tuple(sorted(roots, reverse=True)),
        cartan=cartan,
        fundamental_weights=tuple(fundamental),
        positive_roots=tuple(positive),
        _gram_inverse=gram_inv,
    )
    _check_invariants(rs)
    logger.debug("build_root_system: %s%d with %d roots", name, ell, len(rs.roots))
    return rs


def _check_invariants(rs: RootSystem) -> None:
    """Recompute the Cartan matrix from the root set and check the weight duality."""
    roots = rs.root_set
    if any(neg(r) not in roots for r in roots):
        raise RuntimeError(f"{rs.family}{rs.rank}: roots not closed under negation")
    if rs.reduced:
        positives = [p.root for p in rs.positive_roots]
        pos_set = set(positives)
        indecomposable = [
            a for a in positives
            if not any(add(a, neg(b)) in pos_set for b in positives if b != a)
        ]
        if set(indecomposable) != set(rs.simple_roots):
            raise RuntimeError(f"{rs.family}{rs.rank}: simple roots do not match the root set")
        recomputed = tuple(
            tuple(int(2 * inner(a, b) / inner(b, b)) for b in rs.simple_roots)
            for a in rs.simple_roots
        )
        if recomputed != rs.cartan:
            raise RuntimeError(f"{rs.family}{rs.rank}: Cartan matrix mismatch")
    for i, w in enumerate(rs.fundamental_weights):
        for j, b in enumerate(rs.simple_roots):
            expected = 1 if i == j else 0
            if 2 * inner(w, b) / inner(b, b) != expected:
                raise RuntimeError(f"{rs.family}{rs.rank}: fundamental weight {i} is not dual")


def weyl_orbit(rs: RootSystem, v: Sequence[int | str | Fraction]) -> set[Vec]:
    """Weyl orbit of a vector under the simple reflections.

    Raises:
        DimensionMismatch: If v does not have the ambient dimension
    """
    rs.check_dimension(v)
    return weyl_closure([vec(v)], rs.simple_roots)


def _to_chamber(v: Vec, simple_roots: Sequence[Vec]) -> Vec:
    current = v
    while True:
        for beta in simple_roots:
            if inner(current, beta) < 0:
                current = reflect(current, beta)
                break
        else:
            return current


def to_dominant(rs: RootSystem, v: Vec) -> Vec:
    """The unique dominant element of the Weyl orbit of v."""
    return _to_chamber(v, rs.simple_roots)


@final
@dataclass(frozen=True)
class WeightSet:
    """Weyl-invariant weight support, stored by its dominant representatives.

    The full support is expanded from the orbits on first access to
    ``weights``.
    """

    dominant: tuple[Vec, ...]
    simple_roots: tuple[Vec, ...] = field(repr=False)
    source: Literal["explicit", "highest_weight"]
    highest_weight: Vec | None = None

    @cached_property
    def weights(self) -> tuple[Vec, ...]:
        return tuple(sorted(weyl_closure(self.dominant, self.simple_roots), reverse=True))

    @property
    def has_zero(self) -> bool:
        return any(is_zero(d) for d in self.dominant)

    def __len__(self) -> int:
        return len(self.weights)

    def __contains__(self, v: object) -> bool:
        if not isinstance(v, tuple) or len(v) != len(self.simple_roots[0]):
            return False
        return _to_chamber(vec(v), self.simple_roots) in self.dominant


def explicit_weights(rs: RootSystem, vectors: Iterable[Sequence[int | str | Fraction]]) -> WeightSet:
    """Weight set from explicit vectors, projected and closed under the Weyl group."""
    dominant: set[Vec] = set()
    for v in vectors:
        rs.check_dimension(v)
        dominant.add(to_dominant(rs, rs.project(vec(v))))
    return WeightSet(
        dominant=tuple(sorted(dominant, reverse=True)),
        simple_roots=rs.simple_roots,
        source="explicit",
    )


def dominant_weights_below(rs: RootSystem, labels: Sequence[int]) -> list[tuple[int, ...]]:
    """Dominant weights mu <= lambda, in Dynkin labels.

    Each dominant mu below lambda is reached from lambda through dominant
    weights by subtracting one positive root at a time.
    """
    start = tuple(labels)
    seen = {start}
    queue = deque([start])
    while queue:
        mu = queue.popleft()
        for pos in rs.positive_roots:
            nu = tuple(a - b for a, b in zip(mu, pos.labels, strict=True))
            if min(nu) >= 0 and nu not in seen:
                seen.add(nu)
                queue.append(nu)
    return sorted(seen, reverse=True)


def weights_from_highest(rs: RootSystem, highest: Sequence[int | str | Fraction]) -> WeightSet:
    """Saturated weight support of the irreducible representation with this highest weight.

    Args:
        rs: Root system
        highest: Dominant integral weight in epsilon coordinates

    Returns:
        Weight set closed under root strings

    Raises:
        DimensionMismatch: If the weight has the wrong length
        NotDominant: If some simple root pairs negatively with the weight
        NotIntegral: If some Dynkin label is not an integer
    """
    rs.check_dimension(highest)
    lam = rs.project(vec(highest))
    labels = rs.dynkin_labels(lam)
    if not rs.is_dominant(lam):
        raise NotDominant(
            "highest weight is not dominant",
            labels=[str(x) for x in labels],
        )
    if any(x.denominator != 1 for x in labels):
        raise NotIntegral(
            "highest weight is not algebraically integral",
            labels=[str(x) for x in labels],
        )

    below = dominant_weights_below(rs, [int(x) for x in labels])
    logger.debug("weights_from_highest: %d dominant weights below %s", len(below), below[0])
    return WeightSet(
        dominant=tuple(rs.from_labels(mu) for mu in below),
        simple_roots=rs.simple_roots,
        source="highest_weight",
        highest_weight=lam,
    )


def _positively_proportional(root: Vec, weight: Vec) -> bool:
    pivot = next((i for i, x in enumerate(weight) if x != 0), None)
    if pivot is None:
        return False
    c = root[pivot] / weight[pivot]
    if c <= 0:
        return False
    return all(r == c * w for r, w in zip(root, weight, strict=True))


def root_closure(seed: Iterable[Vec], roots: frozenset[Vec]) -> tuple[set[Vec], list[Vec]]:
    """Close a set of roots under addition of non-opposite pairs whose sum is a root.

    Returns:
        The closure and the roots added, in order of addition
    """
    current = set(seed)
    queue = deque(sorted(current, reverse=True))
    trace: list[Vec] = []
    while queue:
        a = queue.popleft()
        for b in sorted(current, reverse=True):
            s = add(a, b)
            if is_zero(s) or s not in roots or s in current:
                continue
            current.add(s)
            trace.append(s)
            queue.append(s)
    return current, trace


@final
@dataclass(frozen=True)
class ResonanceReport:
    """Partition of the roots into resonant and non-resonant ones."""

    resonant: tuple[Vec, ...]
    nonresonant: tuple[Vec, ...]
    classification: Classification
    generation_trace: tuple[Vec, ...]
    caveat: str | None = None


def resonant_dominant_roots(rs: RootSystem, ws: WeightSet) -> list[Vec]:
    """Dominant roots positively proportional to a dominant weight.

    Every Weyl orbit of roots meets the dominant chamber in exactly one root
    and the weight set is Weyl-invariant, so these decide every orbit.
    """
    return [
        theta
        for theta in rs.roots
        if rs.is_dominant(theta) and any(_positively_proportional(theta, mu) for mu in ws.dominant)
    ]


def resonance_analysis(rs: RootSystem, ws: WeightSet) -> ResonanceReport:
    """Classify each root as resonant (positively proportional to a weight) or not.

    Args:
        rs: Root system
        ws: Nonempty weight set

    Returns:
        Resonance report with the strong/weak/none classification

    Raises:
        EmptyWeightSet: If ws is empty
    """
    if not ws.dominant:
        raise EmptyWeightSet("resonance analysis needs at least one weight")
    for w in ws.dominant:
        rs.check_dimension(w)
    orbits = weyl_closure(resonant_dominant_roots(rs, ws), rs.simple_roots)
    resonant = [r for r in rs.roots if r in orbits]
    nonresonant = [r for r in rs.roots if r not in orbits]

    trace: list[Vec] = []
    if not resonant:
        classification: Classification = "strong"
    else:
        closure, trace = root_closure(nonresonant, rs.root_set)
        classification = "weak" if closure == rs.root_set else "none"

    caveat = None
    if not rs.reduced:
        caveat = BC_CAVEAT
        logger.warning("resonance_analysis: %s", BC_CAVEAT)
    return ResonanceReport(
        resonant=tuple(resonant),
        nonresonant=tuple(nonresonant),
        classification=classification,
        generation_trace=tuple(trace),
        caveat=caveat,
    )


def nonresonance_class(rs: RootSystem, ws: WeightSet) -> Classification:
    """Classification only: strong, weak or none."""
    return resonance_analysis(rs, ws).classification


def cartan_row_gcds(rs: RootSystem) -> list[int]:
    """gcd of the absolute values of each Cartan matrix row."""
    return [math.gcd(*(abs(x) for x in row)) for row in rs.cartan]


def weights_all_nontrivial(ws: WeightSet | Iterable[Vec]) -> bool:
    """True iff the zero weight is absent. An empty set is vacuously nontrivial."""
    if isinstance(ws, WeightSet):
        empty, has_zero = not ws.dominant, ws.has_zero
    else:
        weights = tuple(ws)
        empty, has_zero = not weights, any(is_zero(w) for w in weights)
    if empty:
        logger.warning("weights_all_nontrivial: empty weight set, vacuously true")
        return True
    return not has_zero
