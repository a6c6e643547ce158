"""Stable/unstable splitting and adapted norm tool."""

from typing import Annotated, final

from typing_extensions import TypedDict, Unpack, override

from fastmcp import Context as MCPContext
from fastmcp import FastMCP
from fastmcp.server.dependencies import get_context
from pydantic import Field

from rigidity_lab.commands import splitting_report
from rigidity_lab.core.matrix_core import DEFAULT_TOL
from rigidity_lab.schemas import MatrixDocument
from rigidity_lab.tools.common.base import AnalysisTool
from rigidity_lab.tools.common.validation import validate_json_parameter, validate_tolerance

Matrix = Annotated[
    str,
    Field(description="Hyperbolic square matrix as JSON", min_length=1),
]

Tolerance = Annotated[
    float,
    Field(default=DEFAULT_TOL, description="Separation of eigenvalue moduli from 1, in (0, 0.5)"),
]

Margin = Annotated[
    float,
    Field(default=0.01, description="Relative slack of the adapted rate above the spectral rate, in (0, 1)"),
]


class SplittingToolParams(TypedDict, total=False):
    matrix: Matrix
    tol: Tolerance
    margin: Margin


@final
class SplittingTool(AnalysisTool):
    """Invariant subspaces of a hyperbolic matrix with an adapted norm."""

    @property
    @override
    def name(self) -> str:
        return "splitting"

    @property
    @override
    def description(self) -> str:
        return """Compute the stable and unstable subspaces of a hyperbolic matrix and an adapted norm.

The report lists orthonormal bases of both subspaces, the spectral rates lambda_s and lambda_u,
the Gram matrix of the adapted norm and the one-step rate it certifies (certified_rate, at most target_rate and below 1)."""

    @override
    async def call(self, ctx: MCPContext, **params: Unpack[SplittingToolParams]) -> str:
        tool_ctx = self.create_tool_context(ctx)
        self.set_tool_context_info(tool_ctx)

        matrix = params.get("matrix")
        tol = params.get("tol", DEFAULT_TOL)
        margin = params.get("margin", 0.01)

        error = await self.first_error(
            tool_ctx,
            validate_json_parameter(matrix, "matrix"),
            validate_tolerance(tol, "tol"),
            validate_tolerance(margin, "margin", upper=1.0),
        )
        if error or matrix is None:
            return error or "Error: Parameter 'matrix' is required"

        await tool_ctx.info(f"Splitting with tol={tol} margin={margin}")
        return await self.run_analysis(
            tool_ctx, lambda: splitting_report(MatrixDocument.loads(matrix), tol, margin)
        )

    @override
    def register(self, mcp_server: FastMCP) -> None:
        tool_self = self

        @mcp_server.tool(name=self.name, description=self.description)
        async def splitting(
            ctx: MCPContext,
            matrix: Matrix,
            tol: Tolerance = DEFAULT_TOL,
            margin: Margin = 0.01,
        ) -> str:
            ctx = get_context()
            return await tool_self.call(ctx, matrix=matrix, tol=tol, margin=margin)
