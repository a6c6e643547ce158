"""Hyperbolicity test tool."""

from typing import Annotated, final

from typing_extensions import TypedDict, Unpack, override

from fastmcp import Context as MCPContext
from fastmcp import FastMCP
from fastmcp.server.dependencies import get_context
from pydantic import Field

from rigidity_lab.commands import hyperbolic_report
from rigidity_lab.core.matrix_core import DEFAULT_TOL
from rigidity_lab.schemas import MatrixDocument
from rigidity_lab.tools.common.base import AnalysisTool
from rigidity_lab.tools.common.validation import validate_json_parameter, validate_tolerance

Matrix = Annotated[
    str,
    Field(
        description='Square integer or rational matrix as JSON, e.g. [[2,1],[1,1]] or {"matrix": [[2,1],[1,1]]}',
        min_length=1,
    ),
]

Tolerance = Annotated[
    float,
    Field(default=DEFAULT_TOL, description="Separation of eigenvalue moduli from 1, in (0, 0.5)"),
]


class HyperbolicToolParams(TypedDict, total=False):
    """Parameters for the HyperbolicTool.

    Attributes:
        matrix: Matrix as JSON
        tol: Separation tolerance
    """

    matrix: Matrix
    tol: Tolerance


@final
class HyperbolicTool(AnalysisTool):
    """Decide whether a matrix has no eigenvalue of modulus one."""

    @property
    @override
    def name(self) -> str:
        return "hyperbolic"

    @property
    @override
    def description(self) -> str:
        return """Test whether an integer or rational matrix is hyperbolic (no eigenvalue of modulus 1).

Moduli come from the exact characteristic polynomial, so repeated eigenvalues are located exactly.
Returns a JSON report with the sorted moduli, or a NotHyperbolic error when some modulus lies within tol of 1."""

    @override
    async def call(self, ctx: MCPContext, **params: Unpack[HyperbolicToolParams]) -> str:
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

        await tool_ctx.info(f"Testing hyperbolicity with tol={tol}")
        return await self.run_analysis(
            tool_ctx, lambda: hyperbolic_report(MatrixDocument.loads(matrix), tol)
        )

    @override
    def register(self, mcp_server: FastMCP) -> None:
        tool_self = self

        @mcp_server.tool(name=self.name, description=self.description)
        async def hyperbolic(
            ctx: MCPContext,
            matrix: Matrix,
            tol: Tolerance = DEFAULT_TOL,
        ) -> str:
            ctx = get_context()
            return await tool_self.call(ctx, matrix=matrix, tol=tol)
