"""Analyses as report builders, shared by the CLI and the MCP tools.

Each ``*_report`` function takes validated input documents and options and
returns a report model. ``build_report`` maps a ``RunConfig`` onto them.
"""

import json
import math
from collections.abc import Sequence
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np
import sympy
from fastmcp.utilities.logging import get_logger

from rigidity_lab.config import RunConfig
from rigidity_lab.core import cohomology, cones, matrix_core, nilpotent, rootdata, semiconj
from rigidity_lab.errors import InputError, NotHyperbolic, ToleranceOutOfRange, Unsolvable
from rigidity_lab.schemas import (
    AlgebraDocument,
    AutomorphismModel,
    ConeCertificateReport,
    ConeCheckModel,
    DefectsDocument,
    FieldDocument,
    GcdRowsReport,
    HyperbolicReport,
    InequalityModel,
    LayerHyperbolicityModel,
    LiftReport,
    MapDocument,
    MatrixDocument,
    NilpotentReport,
    PresentationDocument,
    RankOneReportModel,
    RegularityReport,
    Report,
    ResonanceReportModel,
    RhoDocument,
    SemiconjReport,
    SplittingReport,
    TowerLayerModel,
    VectorsDocument,
    WeightsDocument,
)

logger = get_logger(__name__)

SEMICONJ_DEFAULT_TOL = 1e-8
PICARD_POINTS = 64


def exact_json(x: Fraction | sympy.Basic | int) -> int | str:
    """An exact rational as an int or a 'p/q' string."""
    q = x if isinstance(x, Fraction) else Fraction(str(sympy.Rational(x)))
    return q.numerator if q.denominator == 1 else str(q)


def exact_vector(v: Sequence[Any]) -> list[int | str]:
    return [exact_json(x) for x in v]


def _finite(x: float) -> float | None:
    return float(x) if math.isfinite(x) else None


def load_json_file(path: str | Path) -> Any:
    """Read and decode a JSON input file.

    Raises:
        InputError: If the file is missing or not valid JSON
    """
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise InputError(f"cannot read input file {p}: {e.strerror}", path=str(p)) from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{p} is not valid JSON: {e.msg}", path=str(p), line=e.lineno) from e


def parse_number_list(text: str) -> list[Fraction]:
    """Parse '1,0' or '1/2, -1/2' into exact numbers."""
    try:
        return [Fraction(part.strip()) for part in text.split(",") if part.strip()]
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(f"cannot parse number list '{text}'", text=text) from e


# matrix-core


def hyperbolic_report(doc: MatrixDocument, tol: float = matrix_core.DEFAULT_TOL) -> HyperbolicReport:
    """Hyperbolicity test; a non-hyperbolic matrix is a domain error."""
    report = matrix_core.is_hyperbolic(doc.matrix, tol)
    if not report.hyperbolic:
        raise NotHyperbolic(
            "matrix has an eigenvalue of modulus 1 within tolerance",
            moduli=report.moduli,
            tol=tol,
        )
    return HyperbolicReport(hyperbolic=True, moduli=report.moduli, tol=tol)


def splitting_report(
    doc: MatrixDocument, tol: float = matrix_core.DEFAULT_TOL, margin: float = 0.01
) -> SplittingReport:
    split = matrix_core.hyperbolic_splitting(doc.matrix, tol)
    norm = matrix_core.adapted_norm(split, margin)
    return SplittingReport(
        dim=split.dim,
        stable_dim=split.stable_dim,
        unstable_dim=split.unstable_dim,
        lambda_s=split.lambda_s,
        lambda_u=split.lambda_u,
        e_stable=split.e_stable.T.tolist(),
        e_unstable=split.e_unstable.T.tolist(),
        certified_rate=norm.certified_rate,
        target_rate=norm.target_rate,
        margin=margin,
        verified=norm.verified,
        gram=norm.gram.tolist(),
    )


def regularity_report(doc: MatrixDocument, tol: float = matrix_core.DEFAULT_TOL) -> RegularityReport:
    profile = matrix_core.regularity_profile(doc.matrix, tol)
    return RegularityReport(
        dimension=profile.dimension,
        ad_unit_eigen_count=profile.ad_unit_eigen_count,
        ad_circle_eigen_count=profile.ad_circle_eigen_count,
        ambient_minimum=profile.ambient_minimum,
        regular=profile.regular,
        r_regular=profile.r_regular,
        ratio_moduli=profile.ratio_moduli,
    )


def rank_one_report(doc: VectorsDocument) -> RankOneReportModel:
    result = matrix_core.rank_one_factor_test(doc.vectors)
    return RankOneReportModel(
        rank=result.rank,
        is_rank_one=result.is_rank_one,
        dimension=result.dimension,
        count=result.count,
    )


# rootdata


def nonres_report(
    family: str,
    rank: int | None = None,
    highest_weight: str | Sequence[Any] | None = None,
    epsilon_coords: bool = False,
    weights: WeightsDocument | None = None,
) -> ResonanceReportModel:
    """Resonance classification from a highest weight or explicit weights.

    Highest weights are Dynkin labels unless ``epsilon_coords`` is set.
    """
    rs = rootdata.build_root_system(family, rank)
    if weights is not None:
        ws = rootdata.explicit_weights(rs, [rootdata.vec(w) for w in weights.weights])
    elif highest_weight is not None:
        values = parse_number_list(highest_weight) if isinstance(highest_weight, str) else rootdata.vec(highest_weight)
        highest = tuple(values) if epsilon_coords else rs.from_labels(values)
        ws = rootdata.weights_from_highest(rs, highest)
    else:
        raise InputError("nonres needs a highest weight or a weights document")
    vacuous = not ws.dominant
    nontrivial = rootdata.weights_all_nontrivial(ws)
    analysis = rootdata.resonance_analysis(rs, ws)
    return ResonanceReportModel(
        family=rs.family,
        rank=rs.rank,
        highest_weight=exact_vector(ws.highest_weight) if ws.highest_weight is not None else None,
        weights=[exact_vector(w) for w in ws.weights],
        resonant=[exact_vector(r) for r in analysis.resonant],
        nonresonant=[exact_vector(r) for r in analysis.nonresonant],
        classification=analysis.classification,
        generation_trace=[exact_vector(r) for r in analysis.generation_trace],
        caveat=analysis.caveat,
        weights_all_nontrivial=nontrivial,
        vacuous=vacuous,
    )


def gcd_rows_report(family: str, rank: int | None = None) -> GcdRowsReport:
    rs = rootdata.build_root_system(family, rank)
    return GcdRowsReport(
        family=rs.family,
        rank=rs.rank,
        cartan=[list(row) for row in rs.cartan],
        row_gcds=rootdata.cartan_row_gcds(rs),
    )


# nilpotent


def nilpotent_report(
    doc: AlgebraDocument,
    automorphism: MatrixDocument | None = None,
    tol: float = matrix_core.DEFAULT_TOL,
) -> NilpotentReport:
    alg = nilpotent.NilpotentAlgebra.from_brackets(
        doc.dim,
        [b.model_dump() for b in doc.brackets],
        lattice_basis=doc.lattice_basis,
    )
    tower = nilpotent.central_series(alg)
    series = nilpotent.lower_central_series(alg)
    layers = [
        TowerLayerModel(
            level=layer.level,
            dim=layer.dim,
            center_dim=layer.center_dim,
            center_basis=[exact_vector(layer.center_basis[:, c]) for c in range(layer.center_dim)],
        )
        for layer in tower.layers
    ]
    auto_model = None
    if automorphism is not None:
        phi = nilpotent.check_automorphism(alg, automorphism.matrix)
        result = nilpotent.layer_hyperbolicity(alg, phi, tol)
        auto_model = AutomorphismModel(
            layers=[
                LayerHyperbolicityModel(
                    level=r.level,
                    center_dim=r.center_dim,
                    center_moduli=r.center_moduli,
                    hyperbolic=r.hyperbolic,
                )
                for r in result.layers
            ],
            hyperbolic=result.hyperbolic,
        )
    return NilpotentReport(
        dim=alg.dim,
        degree=tower.degree,
        lower_central_dims=[int(m.cols) for m in series],
        center_dims=tower.center_dims,
        layers=layers,
        automorphism=auto_model,
    )


# semiconj


def semiconj_report(
    matrix: MatrixDocument,
    field: FieldDocument,
    tol: float = SEMICONJ_DEFAULT_TOL,
    grid: int = 64,
    max_terms: int = 200,
    margin: float = 0.01,
    seed: int = 0,
    verify: bool = False,
) -> SemiconjReport:
    """Solve the semiconjugacy; ``verify`` compares against the Picard path at seeded points."""
    if not 0.0 < tol < 1.0:
        raise ToleranceOutOfRange(f"tol must lie in (0, 1), got {tol}", tol=tol)
    dim = len(matrix.matrix)
    u = semiconj.field_from_spec(field.to_spec(), dim)
    solution = semiconj.solve_semiconjugacy(
        matrix.matrix, u, tol=tol, max_terms=max_terms, grid=grid, margin=margin, seed=seed
    )
    picard_difference = None
    picard_points = None
    if verify:
        points = np.random.default_rng(seed).random((PICARD_POINTS, dim))
        series_values = solution.evaluate(points)
        picard_values = semiconj.picard_semiconjugacy(
            matrix.matrix, u, points, tol=tol, max_terms=max_terms, margin=margin
        )
        picard_difference = float(np.max(np.abs(series_values - picard_values)))
        picard_points = PICARD_POINTS
    return SemiconjReport(
        dim=dim,
        residual_sup=solution.residual_sup,
        grid_residual_sup=solution.grid_residual_sup,
        series_terms_used=solution.series_terms_used,
        grid_shape=list(solution.grid_shape),
        tol=tol,
        certified_rate=solution.norm.certified_rate,
        verification_nodes=solution.verification_nodes,
        w_sup=solution.grid_field.sup_norm,
        picard_difference=picard_difference,
        picard_points=picard_points,
    )


# cones


def _map_data(doc: MapDocument) -> cones.MapData:
    field = None
    if doc.field is not None:
        field = semiconj.field_from_spec(doc.field.to_spec(), len(doc.matrix))
    return cones.map_data(doc.matrix, field)


def cone_check_model(check: cones.ConeCheckReport) -> ConeCheckModel:
    return ConeCheckModel(
        samples=check.samples,
        epsilon=check.epsilon,
        violations=check.violations,
        passed=check.passed,
        worst_unstable_ratio=_finite(check.worst_unstable_ratio),
        worst_stable_ratio=_finite(check.worst_stable_ratio),
        worst_unstable_expansion=_finite(check.worst_unstable_expansion),
        worst_stable_expansion=_finite(check.worst_stable_expansion),
        expansion_margin=_finite(check.expansion_margin),
        first_violation=check.first_violation,
    )


def cone_cert_report(
    f: MatrixDocument,
    g: MapDocument,
    eps: float = 1.0,
    delta0: float | None = None,
    margin: float = 0.01,
    samples: int = 10000,
    seed: int = 0,
    verify: bool = False,
    tol: float = matrix_core.DEFAULT_TOL,
) -> ConeCertificateReport:
    """Certificate for f^N g f^N; ``verify`` appends the sampled cone check."""
    split = matrix_core.hyperbolic_splitting(f.matrix, tol)
    g_data = _map_data(g)
    constants = cones.cone_constants(split, g_data, eps, margin=margin, samples=samples, seed=seed)
    cert = cones.certify_power(constants, eps, delta0)
    verification = None
    if verify:
        spec = cones.ConeSpec(splitting=split, epsilon=eps, norm=constants.norm)
        composed = cones.certified_composition(f.matrix, g_data, cert)
        check = cones.numeric_cone_check(composed, spec, samples=samples, seed=seed, raise_on_violation=False)
        verification = cone_check_model(check)
    return ConeCertificateReport(
        r=cert.r,
        C=cert.C,
        lambda_=cert.lam,
        epsilon=cert.epsilon,
        delta0=cert.delta0,
        T=cert.T,
        N=cert.N,
        label=constants.label,
        inequalities=[
            InequalityModel(name=q.name, lhs=q.lhs, rhs=q.rhs, slack=q.slack, holds=q.holds)
            for q in cert.inequalities
        ],
        verification=verification,
    )


# cohomology


def lift_report(
    presentation: PresentationDocument,
    rho: RhoDocument,
    defects: DefectsDocument | None = None,
) -> LiftReport:
    """Solve the lifting problem; an unsolvable system is a domain error."""
    pres = cohomology.GroupPresentation.from_document(presentation.model_dump())
    system = cohomology.TwistedSystem.build(
        pres, rho.rho, defects.defects if defects is not None else None
    )
    solution = cohomology.solve_lifting(system)
    if not solution.solvable or solution.eta is None or solution.q is None:
        raise Unsolvable(
            "no rational correction of the generator lifts satisfies every relator",
            scope="presentation-level",
            relators=len(pres.relators),
        )
    mod_one = solution.eta_mod_one or ()
    corrected = cohomology.corrected_defect(system, solution.eta)
    return LiftReport(
        generators=list(pres.generators),
        q=solution.q,
        eta={g: exact_vector(v) for g, v in zip(pres.generators, solution.eta, strict=True)},
        eta_mod_one={g: exact_vector(v) for g, v in zip(pres.generators, mod_one, strict=True)},
        lifts_on_gamma=solution.lifts_on_gamma,
        free_parameters=solution.free_parameters,
        corrected_defect=[exact_vector(v) for v in corrected],
    )


# dispatch


def _input(config: RunConfig, name: str, required: bool = True) -> Any:
    path = config.inputs.get(name)
    if path is None:
        if required:
            raise InputError(f"missing input --{name}", input=name)
        return None
    return load_json_file(path)


def _optional(config: RunConfig, name: str, model: type[Any]) -> Any:
    raw = _input(config, name, required=False)
    return None if raw is None else model.load(raw)


def build_report(config: RunConfig) -> Report:
    """Run the analysis named by ``config.subcommand``.

    Raises:
        InputError: For an unknown subcommand or missing input
        RigidityLabError: Whatever the analysis raises
    """
    tol = config.tol if config.tol is not None else matrix_core.DEFAULT_TOL
    logger.debug("build_report: %s inputs=%s", config.subcommand, sorted(config.inputs))
    match config.subcommand:
        case "hyperbolic":
            return hyperbolic_report(MatrixDocument.load(_input(config, "matrix")), tol)
        case "splitting":
            return splitting_report(MatrixDocument.load(_input(config, "matrix")), tol, config.margin)
        case "regularity":
            return regularity_report(MatrixDocument.load(_input(config, "matrix")), tol)
        case "rank1":
            return rank_one_report(VectorsDocument.load(_input(config, "vectors")))
        case "nonres":
            if config.family is None:
                raise InputError("nonres needs --family", input="family")
            return nonres_report(
                config.family,
                config.rank,
                highest_weight=config.highest_weight,
                epsilon_coords=config.epsilon_coords,
                weights=_optional(config, "weights", WeightsDocument),
            )
        case "gcd-rows":
            if config.family is None:
                raise InputError("gcd-rows needs --family", input="family")
            return gcd_rows_report(config.family, config.rank)
        case "nilpotent":
            return nilpotent_report(
                AlgebraDocument.load(_input(config, "algebra")),
                _optional(config, "automorphism", MatrixDocument),
                tol,
            )
        case "semiconj":
            return semiconj_report(
                MatrixDocument.load(_input(config, "matrix")),
                _optional(config, "field", FieldDocument) or FieldDocument(zero=True),
                tol=config.tol if config.tol is not None else SEMICONJ_DEFAULT_TOL,
                grid=config.grid,
                max_terms=config.max_terms,
                margin=config.margin,
                seed=config.seed,
                verify=config.verify,
            )
        case "cone-cert":
            return cone_cert_report(
                MatrixDocument.load(_input(config, "f")),
                MapDocument.load(_input(config, "g")),
                eps=config.eps,
                delta0=config.delta0,
                margin=config.margin,
                samples=config.samples,
                seed=config.seed,
                verify=config.verify,
                tol=tol,
            )
        case "lift":
            return lift_report(
                PresentationDocument.load(_input(config, "presentation")),
                RhoDocument.load(_input(config, "rho")),
                _optional(config, "defects", DefectsDocument),
            )
    raise InputError(f"unknown subcommand '{config.subcommand}'", subcommand=config.subcommand)
