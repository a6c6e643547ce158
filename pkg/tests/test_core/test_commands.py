"""Tests for the report builders shared by the CLI and the MCP tools."""

from fractions import Fraction

import pytest

from rigidity_lab.commands import (
    build_report,
    cone_cert_report,
    exact_json,
    gcd_rows_report,
    hyperbolic_report,
    lift_report,
    load_json_file,
    nonres_report,
    parse_number_list,
    semiconj_report,
)
from rigidity_lab.config import RunConfig
from rigidity_lab.errors import InputError, NotHyperbolic, ToleranceOutOfRange, Unsolvable
from rigidity_lab.schemas import (
    DefectsDocument,
    FieldDocument,
    MapDocument,
    MatrixDocument,
    PresentationDocument,
    RhoDocument,
)

Z2 = {"generators": ["a", "b"], "relators": [["a", "b", "a^-1", "b^-1"]]}
HEISENBERG = {"dim": 3, "brackets": [{"i": 0, "j": 1, "coeffs": [0, 0, 1]}]}
WOBBLE = {"modes": [{"k": [0, 1], "amp": [0.05, 0.0]}]}


class TestHelpers:
    """Input parsing helpers."""

    def test_parse_number_list(self):
        assert parse_number_list("1, 0") == [1, 0]
        assert parse_number_list("1/2,-1/2") == [Fraction(1, 2), Fraction(-1, 2)]

    def test_parse_number_list_rejects_garbage(self):
        with pytest.raises(InputError):
            parse_number_list("1,x")

    def test_exact_json(self):
        assert exact_json(Fraction(4, 2)) == 2
        assert exact_json(Fraction(-1, 3)) == "-1/3"

    def test_missing_file(self, temp_dir):
        with pytest.raises(InputError) as excinfo:
            load_json_file(f"{temp_dir}/absent.json")
        assert excinfo.value.details["path"].endswith("absent.json")

    def test_bad_json_file(self, temp_dir):
        path = f"{temp_dir}/broken.json"
        with open(path, "w") as f:
            f.write("{")
        with pytest.raises(InputError):
            load_json_file(path)


class TestBuilders:
    """Direct calls to the report builders."""

    def test_hyperbolic(self, cat_map):
        report = hyperbolic_report(MatrixDocument.load(cat_map))
        assert report.hyperbolic
        assert report.moduli[0] > 1 > report.moduli[1]

    def test_identity_is_a_domain_error(self):
        with pytest.raises(NotHyperbolic) as excinfo:
            hyperbolic_report(MatrixDocument.load([[1, 0], [0, 1]]))
        assert excinfo.value.to_dict()["error"] == "NotHyperbolic"
        assert excinfo.value.exit_code == 2

    def test_nonres_c2(self):
        report = nonres_report("C", 2, highest_weight="1,0")
        assert report.classification == "weak"
        assert not report.vacuous
        assert report.weights_all_nontrivial

    def test_nonres_needs_weights(self):
        with pytest.raises(InputError):
            nonres_report("A", 2)

    def test_gcd_rows(self):
        report = gcd_rows_report("B", 2)
        assert report.row_gcds == [2, 1]
        assert report.to_dict()["kind"] == "gcd-rows"

    def test_semiconj_with_picard_check(self, cat_map):
        report = semiconj_report(
            MatrixDocument.load(cat_map), FieldDocument.load(WOBBLE), grid=8, verify=True
        )
        assert report.residual_sup <= 1e-8
        assert report.picard_points == 64
        assert report.picard_difference is not None
        assert report.picard_difference < 1e-6

    @pytest.mark.parametrize("tol", [0.0, 1.0])
    def test_semiconj_tolerance_range(self, cat_map, tol):
        with pytest.raises(ToleranceOutOfRange):
            semiconj_report(MatrixDocument.load(cat_map), FieldDocument(zero=True), tol=tol)

    def test_cone_certificate_with_verification(self, cat_map):
        report = cone_cert_report(
            MatrixDocument.load(cat_map), MapDocument.load([[1, 0], [0, 1]]), samples=2000, verify=True
        )
        assert report.N == 1
        assert report.label == "exact"
        assert report.verification is not None
        assert report.verification.passed
        assert report.to_dict()["lambda"] == pytest.approx((3 - 5**0.5) / 2)

    def test_lift(self, cat_map):
        report = lift_report(
            PresentationDocument.load(Z2),
            RhoDocument.load({"a": cat_map, "b": cat_map}),
            DefectsDocument.load([[1, 0]]),
        )
        assert report.q == 1
        assert report.lifts_on_gamma
        assert report.free_parameters == 2
        assert report.corrected_defect == [[0, 0]]

    def test_lift_unsolvable(self):
        identity = [[1, 0], [0, 1]]
        with pytest.raises(Unsolvable) as excinfo:
            lift_report(
                PresentationDocument.load(Z2),
                RhoDocument.load([identity, identity]),
                DefectsDocument.load([[1, 0]]),
            )
        assert excinfo.value.to_dict()["error"] == "UNSOLVABLE"


class TestBuildReport:
    """Dispatch from a run configuration with file inputs."""

    def test_hyperbolic_from_file(self, write_json, cat_map):
        config = RunConfig(subcommand="hyperbolic", inputs={"matrix": write_json("m.json", cat_map)})
        assert build_report(config).kind == "hyperbolic"

    def test_not_hyperbolic_from_file(self, write_json):
        config = RunConfig(subcommand="hyperbolic", inputs={"matrix": write_json("m.json", [[1, 0], [0, 1]])})
        with pytest.raises(NotHyperbolic):
            build_report(config)

    def test_regularity(self, write_json, cat_map):
        config = RunConfig(subcommand="regularity", inputs={"matrix": write_json("m.json", {"matrix": cat_map})})
        report = build_report(config)
        assert report.regular
        assert report.r_regular

    def test_rank_one(self, write_json):
        config = RunConfig(subcommand="rank1", inputs={"vectors": write_json("v.json", [[1, 2], [2, 4]])})
        assert build_report(config).is_rank_one

    def test_nonres_from_flags(self):
        config = RunConfig(subcommand="nonres", family="C", rank=2, highest_weight="1,0")
        assert build_report(config).classification == "weak"

    def test_nonres_needs_family(self):
        with pytest.raises(InputError):
            build_report(RunConfig(subcommand="nonres", highest_weight="1,0"))

    def test_nilpotent_with_automorphism(self, write_json, cat_map):
        phi = [[2, 1, 0], [1, 1, 0], [0, 0, 1]]
        config = RunConfig(
            subcommand="nilpotent",
            inputs={"algebra": write_json("alg.json", HEISENBERG), "automorphism": write_json("phi.json", phi)},
        )
        report = build_report(config)
        assert report.lower_central_dims == [3, 1, 0]
        assert report.center_dims == [1, 2]
        assert report.automorphism is not None
        assert not report.automorphism.hyperbolic

    def test_semiconj_zero_field_default(self, write_json, cat_map):
        config = RunConfig(subcommand="semiconj", inputs={"matrix": write_json("m.json", cat_map)}, grid=8)
        report = build_report(config)
        assert report.series_terms_used == 0
        assert report.tol == 1e-8

    def test_cone_cert(self, write_json, cat_map):
        config = RunConfig(
            subcommand="cone-cert",
            inputs={"f": write_json("f.json", cat_map), "g": write_json("g.json", [[0, 1], [1, 0]])},
        )
        report = build_report(config)
        assert report.N == 2

    def test_lift(self, write_json, cat_map):
        config = RunConfig(
            subcommand="lift",
            inputs={
                "presentation": write_json("p.json", Z2),
                "rho": write_json("rho.json", {"rho": {"a": cat_map, "b": cat_map}}),
                "defects": write_json("d.json", [[1, 0]]),
            },
        )
        report = build_report(config)
        assert report.q == 1
        assert all(v == [0, 0] for v in report.eta_mod_one.values())

    def test_missing_input(self):
        with pytest.raises(InputError) as excinfo:
            build_report(RunConfig(subcommand="splitting"))
        assert excinfo.value.details["input"] == "matrix"

    def test_unknown_subcommand(self):
        with pytest.raises(InputError):
            build_report(RunConfig(subcommand="spectrum"))
