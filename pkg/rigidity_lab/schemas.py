"""JSON input documents and versioned report models.

Input documents are what the CLI reads from files and what the MCP tools take
inline. Reports carry ``"schema": "v1"`` and a ``kind`` and parse back under
their own model.
"""

import json
from collections.abc import Mapping
from typing import Annotated, Any, ClassVar, Literal

from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError

from rigidity_lab.errors import InputError

SCHEMA_VERSION = "v1"

Scalar = int | float | str
MatrixRows = list[list[Scalar]]
Exact = int | str


class InputDocument(BaseModel):
    """Base for JSON input documents.

    A document whose ``bare_field`` is set may also be given as the bare value
    of that field, e.g. a matrix as a plain list of rows.
    """

    bare_field: ClassVar[str | None] = None

    @classmethod
    def load(cls, raw: Any) -> Self:
        """Validate a decoded JSON value.

        Raises:
            InputError: If the value does not match the document
        """
        if cls.bare_field is not None and not isinstance(raw, Mapping):
            raw = {cls.bare_field: raw}
        try:
            return cls.model_validate(raw)
        except ValidationError as e:
            problems = [f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()]
            raise InputError(f"invalid {cls.__name__} document", problems=problems) from e

    @classmethod
    def loads(cls, text: str) -> Self:
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise InputError(f"invalid JSON: {e.msg}", line=e.lineno, column=e.colno) from e
        return cls.load(raw)


class MatrixDocument(InputDocument):
    bare_field: ClassVar[str | None] = "matrix"

    matrix: MatrixRows


class VectorsDocument(InputDocument):
    bare_field: ClassVar[str | None] = "vectors"

    vectors: list[list[float]]


class WeightsDocument(InputDocument):
    bare_field: ClassVar[str | None] = "weights"

    weights: list[list[Scalar]]


class BracketEntry(BaseModel):
    i: int
    j: int
    coeffs: list[Scalar]


class AlgebraDocument(InputDocument):
    """Structure constants: nonzero brackets [e_i, e_j] with 0-based indices."""

    dim: int = Field(ge=0)
    brackets: list[BracketEntry] = Field(default_factory=list)
    lattice_basis: MatrixRows | None = None


class ModeEntry(BaseModel):
    k: list[int]
    amp: list[float]
    phase: Literal["sin", "cos"] = "sin"


class FieldDocument(InputDocument):
    """A periodic field: trigonometric modes, grid samples, or zero."""

    modes: list[ModeEntry] | None = None
    values: list[Any] | None = None
    zero: bool = False

    def to_spec(self) -> dict[str, Any]:
        if self.modes is not None:
            return {"modes": [m.model_dump() for m in self.modes]}
        if self.values is not None:
            return {"values": self.values}
        return {"zero": True}


class MapDocument(InputDocument):
    """x -> Bx, or x -> Bx + v(x) when a field is given."""

    bare_field: ClassVar[str | None] = "matrix"

    matrix: MatrixRows
    field: FieldDocument | None = None


class PresentationDocument(InputDocument):
    generators: list[str]
    relators: list[list[str | int]] = Field(default_factory=list)


class RhoDocument(InputDocument):
    """One matrix per generator, keyed by name or in generator order."""

    bare_field: ClassVar[str | None] = "rho"

    rho: dict[str, MatrixRows] | list[MatrixRows]

    @classmethod
    def load(cls, raw: Any) -> Self:
        # a bare generator -> matrix mapping
        if isinstance(raw, Mapping) and "rho" not in raw:
            raw = {"rho": raw}
        return super().load(raw)


class DefectsDocument(InputDocument):
    bare_field: ClassVar[str | None] = "defects"

    defects: list[list[Scalar]]


# reports


class Report(BaseModel):
    """Base for versioned reports."""

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    schema_version: Literal["v1"] = Field(default=SCHEMA_VERSION, alias="schema")
    kind: str

    def to_dict(self) -> dict[str, Any]:
        return self.model_dump(mode="json", by_alias=True)

    def to_json(self) -> str:
        """Canonical text: sorted keys, two-space indent."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


class HyperbolicReport(Report):
    kind: Literal["hyperbolic"] = "hyperbolic"
    hyperbolic: bool
    moduli: list[float]
    tol: float


class SplittingReport(Report):
    kind: Literal["splitting"] = "splitting"
    dim: int
    stable_dim: int
    unstable_dim: int
    lambda_s: float | None
    lambda_u: float | None
    e_stable: list[list[float]]
    e_unstable: list[list[float]]
    certified_rate: float
    target_rate: float
    margin: float
    verified: bool
    gram: list[list[float]]


class RegularityReport(Report):
    kind: Literal["regularity"] = "regularity"
    dimension: int
    ad_unit_eigen_count: int
    ad_circle_eigen_count: int
    ambient_minimum: int
    regular: bool
    r_regular: bool
    ratio_moduli: list[float]


class RankOneReportModel(Report):
    kind: Literal["rank1"] = "rank1"
    rank: int
    is_rank_one: bool
    dimension: int
    count: int


class ResonanceReportModel(Report):
    kind: Literal["nonres"] = "nonres"
    family: str
    rank: int
    highest_weight: list[Exact] | None
    weights: list[list[Exact]]
    resonant: list[list[Exact]]
    nonresonant: list[list[Exact]]
    classification: Literal["strong", "weak", "none"]
    generation_trace: list[list[Exact]]
    caveat: str | None
    weights_all_nontrivial: bool
    vacuous: bool


class GcdRowsReport(Report):
    kind: Literal["gcd-rows"] = "gcd-rows"
    family: str
    rank: int
    cartan: list[list[int]]
    row_gcds: list[int]


class TowerLayerModel(BaseModel):
    level: int
    dim: int
    center_dim: int
    center_basis: list[list[Exact]]


class LayerHyperbolicityModel(BaseModel):
    level: int
    center_dim: int
    center_moduli: list[float]
    hyperbolic: bool


class AutomorphismModel(BaseModel):
    layers: list[LayerHyperbolicityModel]
    hyperbolic: bool


class NilpotentReport(Report):
    kind: Literal["nilpotent"] = "nilpotent"
    dim: int
    degree: int
    lower_central_dims: list[int]
    center_dims: list[int]
    layers: list[TowerLayerModel]
    automorphism: AutomorphismModel | None = None


class SemiconjReport(Report):
    kind: Literal["semiconj"] = "semiconj"
    dim: int
    residual_sup: float
    grid_residual_sup: float
    series_terms_used: int
    grid_shape: list[int]
    tol: float
    certified_rate: float
    verification_nodes: int
    w_sup: float
    picard_difference: float | None = None
    picard_points: int | None = None


class InequalityModel(BaseModel):
    name: str
    lhs: float
    rhs: float
    slack: float
    holds: bool


class ConeCheckModel(BaseModel):
    samples: int
    epsilon: float
    violations: int
    passed: bool
    worst_unstable_ratio: float | None
    worst_stable_ratio: float | None
    worst_unstable_expansion: float | None
    worst_stable_expansion: float | None
    expansion_margin: float | None
    first_violation: dict[str, Any] | None = None


class ConeCertificateReport(Report):
    kind: Literal["cone-cert"] = "cone-cert"
    r: float
    C: float
    lambda_: float = Field(alias="lambda")
    epsilon: float
    delta0: float
    T: float
    N: int
    label: Literal["exact", "empirical"]
    inequalities: list[InequalityModel]
    verification: ConeCheckModel | None = None


class LiftReport(Report):
    kind: Literal["lift"] = "lift"
    status: Literal["SOLVED"] = "SOLVED"
    scope: str = "presentation-level"
    generators: list[str]
    q: int
    eta: dict[str, list[Exact]]
    eta_mod_one: dict[str, list[Exact]]
    lifts_on_gamma: bool
    free_parameters: int
    corrected_defect: list[list[Exact]]


class ErrorReport(BaseModel):
    """Structured error emitted on exit codes 1 and 2."""

    model_config = ConfigDict(populate_by_name=True)

    schema_version: Literal["v1"] = Field(default=SCHEMA_VERSION, alias="schema")
    error: str
    message: str
    details: dict[str, Any] = Field(default_factory=dict)


AnyReport = Annotated[
    HyperbolicReport
    | SplittingReport
    | RegularityReport
    | RankOneReportModel
    | ResonanceReportModel
    | GcdRowsReport
    | NilpotentReport
    | SemiconjReport
    | ConeCertificateReport
    | LiftReport,
    Field(discriminator="kind"),
]

_REPORT_ADAPTER: TypeAdapter[Any] = TypeAdapter(AnyReport)


def parse_report(text: str | Mapping[str, Any]) -> Report:
    """Parse a report by its ``kind``.

    Raises:
        InputError: If the text is not a valid report
    """
    try:
        if isinstance(text, str):
            return _REPORT_ADAPTER.validate_json(text)
        return _REPORT_ADAPTER.validate_python(dict(text))
    except ValidationError as e:
        raise InputError("not a valid report", problems=[err["msg"] for err in e.errors()]) from e
