"""Cartan matrix row gcd tool."""

from typing import Annotated, final

from typing_extensions import TypedDict, Unpack, override

from fastmcp import Context as MCPContext
from fastmcp import FastMCP
from fastmcp.server.dependencies import get_context
from pydantic import Field

from rigidity_lab.commands import gcd_rows_report
from rigidity_lab.tools.common.base import AnalysisTool
from rigidity_lab.tools.common.validation import validate_positive_int

Family = Annotated[
    str,
    Field(description="Root system family: A, B, C, D, BC, E6, E7, E8, F4 or G2", min_length=1),
]

Rank = Annotated[
    int | None,
    Field(default=None, description="Rank; optional for the exceptional families"),
]


class CartanGcdsToolParams(TypedDict, total=False):
    family: Family
    rank: Rank


@final
class CartanGcdsTool(AnalysisTool):
    @property
    @override
    def name(self) -> str:
        return "cartan_gcds"

    @property
    @override
    def description(self) -> str:
        return """Cartan matrix of a root system with the gcd of the entries of each row.
A row gcd of 1 means the corresponding simple root is not divisible in the root lattice."""

    @override
    async def call(self, ctx: MCPContext, **params: Unpack[CartanGcdsToolParams]) -> str:
        tool_ctx = self.create_tool_context(ctx)
        self.set_tool_context_info(tool_ctx)

        family = params.get("family")
        rank = params.get("rank")
        if not family:
            await tool_ctx.error("Parameter 'family' is required")
            return "Error: Parameter 'family' is required"
        error = await self.first_error(tool_ctx, validate_positive_int(rank, "rank"))
        if error:
            return error

        return await self.run_analysis(tool_ctx, lambda: gcd_rows_report(family, rank))

    @override
    def register(self, mcp_server: FastMCP) -> None:
        tool_self = self

        @mcp_server.tool(name=self.name, description=self.description)
        async def cartan_gcds(ctx: MCPContext, family: Family, rank: Rank = None) -> str:
            ctx = get_context()
            return await tool_self.call(ctx, family=family, rank=rank)
