"""Tests for the linear-algebra tools."""

import json
from unittest.mock import MagicMock, patch

import pytest

from rigidity_lab.tools.common.context import ToolContext
from rigidity_lab.tools.linear import (
    HyperbolicTool,
    RankOneTool,
    RegularityTool,
    SplittingTool,
    get_linear_tools,
)


def error_document(result: str) -> dict:
    assert result.startswith("Error: ")
    return json.loads(result.removeprefix("Error: "))


class TestLinearTools:
    """Calls to the linear-algebra tools through a real tool context."""

    @pytest.fixture(autouse=True)
    def patched_context(self, tool_context: ToolContext):
        with patch("rigidity_lab.tools.common.base.create_tool_context", return_value=tool_context):
            yield

    def test_tool_names(self):
        assert [tool.name for tool in get_linear_tools()] == [
            "hyperbolic",
            "splitting",
            "regularity",
            "rank_one",
        ]

    @pytest.mark.asyncio
    async def test_hyperbolic(self, mcp_context: MagicMock, cat_map):
        result = await HyperbolicTool().call(ctx=mcp_context, matrix=json.dumps(cat_map))

        report = json.loads(result)
        assert report["kind"] == "hyperbolic"
        assert report["hyperbolic"] is True
        mcp_context.info.assert_any_call("[hyperbolic] Testing hyperbolicity with tol=1e-09")

    @pytest.mark.asyncio
    async def test_not_hyperbolic_is_structured_error(self, mcp_context: MagicMock):
        result = await HyperbolicTool().call(ctx=mcp_context, matrix="[[1, 0], [0, 1]]")

        assert error_document(result)["error"] == "NotHyperbolic"
        logged = mcp_context.error.call_args[0][0]
        assert logged.startswith("[hyperbolic] NotHyperbolic:")

    @pytest.mark.asyncio
    async def test_invalid_json(self, mcp_context: MagicMock):
        result = await HyperbolicTool().call(ctx=mcp_context, matrix="[[1, 0]")

        assert result.startswith("Error: Parameter 'matrix' is not valid JSON")
        mcp_context.error.assert_called_once()

    @pytest.mark.asyncio
    async def test_tolerance_out_of_range(self, mcp_context: MagicMock, cat_map):
        result = await HyperbolicTool().call(ctx=mcp_context, matrix=json.dumps(cat_map), tol=0.7)

        assert "must lie in (0, 0.5)" in result

    @pytest.mark.asyncio
    async def test_splitting(self, mcp_context: MagicMock, cat_map):
        result = await SplittingTool().call(ctx=mcp_context, matrix=json.dumps(cat_map), margin=0.05)

        report = json.loads(result)
        assert report["stable_dim"] == 1
        assert report["verified"] is True
        assert report["margin"] == 0.05
        assert "lam" not in report
        assert report["certified_rate"] == pytest.approx(2 / (3 + 5**0.5), rel=1e-9)
        assert report["target_rate"] == pytest.approx(1.05 * 2 / (3 + 5**0.5))

    @pytest.mark.asyncio
    async def test_regularity_not_unimodular(self, mcp_context: MagicMock):
        result = await RegularityTool().call(ctx=mcp_context, matrix="[[2, 0], [0, 1]]")

        document = error_document(result)
        assert document["error"] == "NotUnimodular"
        assert document["schema"] == "v1"

    @pytest.mark.asyncio
    async def test_rank_one(self, mcp_context: MagicMock):
        result = await RankOneTool().call(ctx=mcp_context, vectors="[[1, 2], [-1, -2]]")

        report = json.loads(result)
        assert report["rank"] == 1
        assert report["is_rank_one"] is True
        finished = [c.args[0] for c in mcp_context.info.call_args_list if "Finished" in c.args[0]]
        assert finished and finished[0].startswith("[rank_one] Finished rank1 report in ")
        mcp_context.report_progress.assert_any_call(1, 1)
