"""Tests for input documents, report models and error serialization."""

import json

import numpy as np
import pytest

from rigidity_lab.errors import DimensionMismatch, InputError, NotHyperbolic, Unsolvable
from rigidity_lab.schemas import (
    ConeCertificateReport,
    ErrorReport,
    FieldDocument,
    GcdRowsReport,
    HyperbolicReport,
    LiftReport,
    MapDocument,
    MatrixDocument,
    RhoDocument,
    WeightsDocument,
    parse_report,
)


class TestInputDocuments:
    """Loading JSON documents."""

    def test_bare_matrix(self, cat_map):
        assert MatrixDocument.load(cat_map).matrix == cat_map
        assert MatrixDocument.load({"matrix": cat_map}).matrix == cat_map

    def test_loads_text(self):
        doc = WeightsDocument.loads('[[1, "1/2"], [0, -1]]')
        assert doc.weights == [[1, "1/2"], [0, -1]]

    def test_invalid_json(self):
        with pytest.raises(InputError) as excinfo:
            MatrixDocument.loads("[[1, 2], ")
        assert "line" in excinfo.value.details

    def test_invalid_document(self):
        with pytest.raises(InputError) as excinfo:
            MatrixDocument.load({"matrix": "identity"})
        assert excinfo.value.details["problems"]

    def test_rho_by_name_or_order(self, cat_map):
        assert RhoDocument.load({"a": cat_map}).rho == {"a": cat_map}
        assert RhoDocument.load([cat_map, cat_map]).rho == [cat_map, cat_map]

    def test_field_spec(self):
        modes = FieldDocument.load({"modes": [{"k": [1, 0], "amp": [0.1, 0.0]}]})
        assert modes.to_spec() == {"modes": [{"k": [1, 0], "amp": [0.1, 0.0], "phase": "sin"}]}
        assert FieldDocument.load({}).to_spec() == {"zero": True}

    def test_map_without_field(self, cat_map):
        doc = MapDocument.load(cat_map)
        assert doc.field is None


class TestReports:
    """Versioned report models."""

    def test_schema_and_kind(self):
        report = HyperbolicReport(hyperbolic=True, moduli=[2.618, 0.382], tol=1e-9)
        data = report.to_dict()
        assert data["schema"] == "v1"
        assert data["kind"] == "hyperbolic"

    def test_to_json_is_sorted(self):
        report = GcdRowsReport(family="B", rank=2, cartan=[[2, -2], [-1, 2]], row_gcds=[2, 1])
        text = report.to_json()
        keys = list(json.loads(text))
        assert keys == sorted(keys)
        assert text.startswith("{\n  ")

    def test_lambda_alias(self):
        report = ConeCertificateReport(
            r=1.0,
            C=1.0,
            lambda_=0.38,
            epsilon=1.0,
            delta0=0.5,
            T=3.0,
            N=1,
            label="exact",
            inequalities=[],
        )
        data = report.to_dict()
        assert data["lambda"] == 0.38
        assert "lambda_" not in data

    def test_parse_report_by_kind(self):
        report = LiftReport(
            generators=["a"],
            q=2,
            eta={"a": ["1/2"]},
            eta_mod_one={"a": ["1/2"]},
            lifts_on_gamma=False,
            free_parameters=0,
            corrected_defect=[[0]],
        )
        parsed = parse_report(report.to_json())
        assert isinstance(parsed, LiftReport)
        assert parsed.status == "SOLVED"
        assert parsed.scope == "presentation-level"
        assert isinstance(parse_report(report.to_dict()), LiftReport)

    def test_parse_report_rejects_unknown_kind(self):
        with pytest.raises(InputError):
            parse_report({"schema": "v1", "kind": "spectrum"})

    def test_parse_report_rejects_extra_fields(self):
        data = HyperbolicReport(hyperbolic=True, moduli=[2.0], tol=1e-9).to_dict()
        data["verdict"] = "yes"
        with pytest.raises(InputError):
            parse_report(data)


class TestErrorSerialization:
    """Structured error documents."""

    def test_error_document(self):
        error = NotHyperbolic("not hyperbolic", moduli=np.array([1.0, 1.0]), tol=1e-9)
        data = error.to_dict()
        assert data == {
            "schema": "v1",
            "error": "NotHyperbolic",
            "message": "not hyperbolic",
            "details": {"moduli": [1.0, 1.0], "tol": 1e-9},
        }
        assert ErrorReport.model_validate(data).error == "NotHyperbolic"

    def test_exit_codes(self):
        assert DimensionMismatch("x").exit_code == 1
        assert NotHyperbolic("x").exit_code == 2
        assert Unsolvable("x").exit_code == 2
        assert Unsolvable("x").code == "UNSOLVABLE"
