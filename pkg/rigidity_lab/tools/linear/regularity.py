"""Regularity profile tool for SL(n) elements."""

from typing import Annotated, final

from typing_extensions import TypedDict, Unpack, override

from fastmcp import Context as MCPContext
from fastmcp import FastMCP
from fastmcp.server.dependencies import get_context
from pydantic import Field

from rigidity_lab.commands import regularity_report
from rigidity_lab.core.matrix_core import DEFAULT_TOL
from rigidity_lab.schemas import MatrixDocument
from rigidity_lab.tools.common.base import AnalysisTool
from rigidity_lab.tools.common.validation import validate_json_parameter, validate_tolerance

Matrix = Annotated[
    str,
    Field(
        description='Determinant-one matrix as JSON; rational entries such as "1/6" are allowed',
        min_length=1,
    ),
]

Tolerance = Annotated[
    float,
    Field(default=DEFAULT_TOL, description="Tolerance for eigenvalue ratios, in (0, 0.5)"),
]


class RegularityToolParams(TypedDict, total=False):
    matrix: Matrix
    tol: Tolerance


@final
class RegularityTool(AnalysisTool):
    """Counts of adjoint eigenvalues equal to one and of modulus one."""

    @property
    @override
    def name(self) -> str:
        return "regularity"

    @property
    @override
    def description(self) -> str:
        return """Regularity profile of an element of SL(n): how many adjoint eigenvalues equal 1 and how many
have modulus 1, against the minimum n-1. The element is regular (resp. R-regular) when the count
attains the minimum. Fails with NotUnimodular when the determinant is not exactly 1."""

    @override
    async def call(self, ctx: MCPContext, **params: Unpack[RegularityToolParams]) -> str:
        tool_ctx = self.create_tool_context(ctx)
        self.set_tool_context_info(tool_ctx)

        matrix = params.get("matrix")
        tol = params.get("tol", DEFAULT_TOL)

        error = await self.first_error(
            tool_ctx,
            validate_json_parameter(matrix, "matrix"),
            validate_tolerance(tol, "tol"),
        )
        if error or matrix is None:
            return error or "Error: Parameter 'matrix' is required"

        return await self.run_analysis(
            tool_ctx, lambda: regularity_report(MatrixDocument.loads(matrix), tol)
        )

    @override
    def register(self, mcp_server: FastMCP) -> None:
        tool_self = self

        @mcp_server.tool(name=self.name, description=self.description)
        async def regularity(
            ctx: MCPContext,
            matrix: Matrix,
            tol: Tolerance = DEFAULT_TOL,
        ) -> str:
            ctx = get_context()
            return await tool_self.call(ctx, matrix=matrix, tol=tol)
