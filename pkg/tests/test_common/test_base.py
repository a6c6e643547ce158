"""Tests for the analysis tool base class."""

import json
from unittest.mock import MagicMock

import pytest

from rigidity_lab.errors import DimensionMismatch
from rigidity_lab.schemas import RankOneReportModel
from rigidity_lab.tools.common.base import AnalysisTool, ToolRegistry, handle_connection_errors
from rigidity_lab.tools.common.validation import ValidationResult
from rigidity_lab.tools.linear import RankOneTool


class TestRunAnalysis:
    """Rendering of reports and errors."""

    @pytest.fixture
    def tool(self) -> AnalysisTool:
        return RankOneTool()

    @pytest.mark.asyncio
    async def test_success_returns_report_json(self, tool, tool_context, mcp_context: MagicMock):
        tool.set_tool_context_info(tool_context)
        report = RankOneReportModel(rank=1, is_rank_one=True, dimension=2, count=3)

        result = await tool.run_analysis(tool_context, lambda: report)

        assert json.loads(result) == report.to_dict()
        mcp_context.report_progress.assert_any_call(0, 1)

    @pytest.mark.asyncio
    async def test_library_error_is_structured(self, tool, tool_context, mcp_context: MagicMock):
        def fail():
            raise DimensionMismatch("ragged rows", lengths=[1, 2])

        result = await tool.run_analysis(tool_context, fail)

        assert result.startswith("Error: ")
        document = json.loads(result.removeprefix("Error: "))
        assert document == {
            "schema": "v1",
            "error": "DimensionMismatch",
            "message": "ragged rows",
            "details": {"lengths": [1, 2]},
        }

    @pytest.mark.asyncio
    async def test_unexpected_error_is_plain(self, tool, tool_context, mcp_context: MagicMock):
        def fail():
            raise ZeroDivisionError("division by zero")

        result = await tool.run_analysis(tool_context, fail)

        assert result == "Error: division by zero"
        mcp_context.error.assert_called_once_with("Unexpected failure: division by zero")

    @pytest.mark.asyncio
    async def test_first_error(self, tool, tool_context):
        result = await tool.first_error(
            tool_context,
            ValidationResult(is_valid=True),
            ValidationResult(is_valid=False, error_message="first"),
            ValidationResult(is_valid=False, error_message="second"),
        )

        assert result == "Error: first"


class TestConnectionErrors:
    @pytest.mark.asyncio
    async def test_disconnect_becomes_message(self):
        class ClosedResourceError(Exception):
            pass

        @handle_connection_errors
        async def analysis() -> str:
            raise ClosedResourceError()

        assert await analysis() == "Client disconnected during operation: ClosedResourceError"

    @pytest.mark.asyncio
    async def test_other_errors_propagate(self):
        @handle_connection_errors
        async def analysis() -> str:
            raise ValueError("bad")

        with pytest.raises(ValueError):
            await analysis()


def test_register_tools():
    mcp = MagicMock()
    ToolRegistry.register_tools(mcp, [RankOneTool()])
    mcp.tool.assert_called_once()
