"""Tests for the lift tool."""

import json
from unittest.mock import MagicMock, patch

import pytest

from rigidity_lab.tools.cohomology import LiftTool
from rigidity_lab.tools.common.context import ToolContext

Z2 = json.dumps({"generators": ["a", "b"], "relators": [["a", "b", "a^-1", "b^-1"]]})


class TestLiftTool:
    """Presentation-level lifting through the tool interface."""

    @pytest.fixture(autouse=True)
    def patched_context(self, tool_context: ToolContext):
        with patch("rigidity_lab.tools.common.base.create_tool_context", return_value=tool_context):
            yield

    @pytest.mark.asyncio
    async def test_cat_map_lift(self, mcp_context: MagicMock, cat_map):
        rho = json.dumps({"a": cat_map, "b": cat_map})
        result = await LiftTool().call(ctx=mcp_context, presentation=Z2, rho=rho, defects="[[1, 0]]")

        report = json.loads(result)
        assert report["status"] == "SOLVED"
        assert report["scope"] == "presentation-level"
        assert report["q"] == 1
        assert report["corrected_defect"] == [[0, 0]]

    @pytest.mark.asyncio
    async def test_fractional_correction(self, mcp_context: MagicMock):
        result = await LiftTool().call(ctx=mcp_context, presentation=Z2, rho="[[[3]], [[1]]]", defects="[[1]]")

        report = json.loads(result)
        assert report["q"] == 2
        assert report["lifts_on_gamma"] is False
        assert report["eta_mod_one"]["b"] == ["1/2"]

    @pytest.mark.asyncio
    async def test_unsolvable(self, mcp_context: MagicMock):
        identity = [[1, 0], [0, 1]]
        rho = json.dumps([identity, identity])
        result = await LiftTool().call(ctx=mcp_context, presentation=Z2, rho=rho, defects="[[1, 0]]")

        document = json.loads(result.removeprefix("Error: "))
        assert document["error"] == "UNSOLVABLE"
        mcp_context.error.assert_called_once()

    @pytest.mark.asyncio
    async def test_unknown_generator(self, mcp_context: MagicMock, cat_map):
        rho = json.dumps({"a": cat_map, "c": cat_map})
        result = await LiftTool().call(ctx=mcp_context, presentation=Z2, rho=rho)

        assert json.loads(result.removeprefix("Error: "))["error"] == "UnknownGenerator"

    @pytest.mark.asyncio
    async def test_missing_presentation(self, mcp_context: MagicMock):
        result = await LiftTool().call(ctx=mcp_context, presentation="", rho="[]")

        assert result == "Error: Parameter 'presentation' is required but was empty"
