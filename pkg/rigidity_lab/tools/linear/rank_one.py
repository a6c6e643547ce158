"""Rank-one factor test tool."""

from typing import Annotated, final

from typing_extensions import TypedDict, Unpack, override

from fastmcp import Context as MCPContext
from fastmcp import FastMCP
from fastmcp.server.dependencies import get_context
from pydantic import Field

from rigidity_lab.commands import rank_one_report
from rigidity_lab.schemas import VectorsDocument
from rigidity_lab.tools.common.base import AnalysisTool
from rigidity_lab.tools.common.validation import validate_json_parameter

Vectors = Annotated[
    str,
    Field(
        description="Weight logarithm vectors as JSON, a list of equal-length numeric lists",
        min_length=1,
    ),
]


class RankOneToolParams(TypedDict):
    vectors: Vectors


@final
class RankOneTool(AnalysisTool):
    """Rank of the span of weight logarithm vectors."""

    @property
    @override
    def name(self) -> str:
        return "rank_one"

    @property
    @override
    def description(self) -> str:
        return """Rank of the real span of the logarithm vectors of weights across a maximal split torus.
A rank of at most one signals a rank-one algebraic factor action."""

    @override
    async def call(self, ctx: MCPContext, **params: Unpack[RankOneToolParams]) -> str:
        tool_ctx = self.create_tool_context(ctx)
        self.set_tool_context_info(tool_ctx)

        vectors = params.get("vectors")
        error = await self.first_error(tool_ctx, validate_json_parameter(vectors, "vectors"))
        if error or vectors is None:
            return error or "Error: Parameter 'vectors' is required"

        return await self.run_analysis(tool_ctx, lambda: rank_one_report(VectorsDocument.loads(vectors)))

    @override
    def register(self, mcp_server: FastMCP) -> None:
        tool_self = self

        @mcp_server.tool(name=self.name, description=self.description)
        async def rank_one(ctx: MCPContext, vectors: Vectors) -> str:
            ctx = get_context()
            return await tool_self.call(ctx, vectors=vectors)
