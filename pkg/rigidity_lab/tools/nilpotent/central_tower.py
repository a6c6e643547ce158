"""Central series tower tool for nilpotent Lie algebras."""

from typing import Annotated, final

from typing_extensions import TypedDict, Unpack, override

from fastmcp import Context as MCPContext
from fastmcp import FastMCP
from fastmcp.server.dependencies import get_context
from pydantic import Field

from rigidity_lab.commands import nilpotent_report
from rigidity_lab.core.matrix_core import DEFAULT_TOL
from rigidity_lab.schemas import AlgebraDocument, MatrixDocument
from rigidity_lab.tools.common.base import AnalysisTool
from rigidity_lab.tools.common.validation import validate_json_parameter, validate_tolerance

Algebra = Annotated[
    str,
    Field(
        description=(
            'Nilpotent Lie algebra as JSON: {"dim": 3, "brackets": [{"i": 0, "j": 1, "coeffs": [0, 0, 1]}]}'
            " with optional lattice_basis"
        ),
        min_length=1,
    ),
]

Automorphism = Annotated[
    str | None,
    Field(default=None, description="Optional automorphism matrix as JSON, acting on the algebra basis"),
]

Tolerance = Annotated[
    float,
    Field(default=DEFAULT_TOL, description="Separation of eigenvalue moduli from 1 on each layer, in (0, 0.5)"),
]


class CentralTowerToolParams(TypedDict, total=False):
    """Parameters for the CentralTowerTool.

    Attributes:
        algebra: Structure constants document
        automorphism: Optional automorphism to descend through the tower
        tol: Hyperbolicity tolerance per layer
    """

    algebra: Algebra
    automorphism: Automorphism
    tol: Tolerance


@final
class CentralTowerTool(AnalysisTool):
    """Tower of quotients by the center, with layerwise hyperbolicity."""

    @property
    @override
    def name(self) -> str:
        return "central_tower"

    @property
    @override
    def description(self) -> str:
        return """Build the tower n = n_0 -> n_1 -> ... -> 0 of quotients by the center for a nilpotent Lie algebra.

Reports the nilpotency degree, the dimensions of the lower central series and of each center.
With an automorphism, checks that it preserves the bracket, descends it to every layer and
tests hyperbolicity of its restriction to each center."""

    @override
    async def call(self, ctx: MCPContext, **params: Unpack[CentralTowerToolParams]) -> str:
        tool_ctx = self.create_tool_context(ctx)
        self.set_tool_context_info(tool_ctx)

        algebra = params.get("algebra")
        automorphism = params.get("automorphism")
        tol = params.get("tol", DEFAULT_TOL)

        checks = [validate_json_parameter(algebra, "algebra"), validate_tolerance(tol, "tol")]
        if automorphism is not None:
            checks.append(validate_json_parameter(automorphism, "automorphism"))
        error = await self.first_error(tool_ctx, *checks)
        if error or algebra is None:
            return error or "Error: Parameter 'algebra' is required"

        if automorphism is not None:
            await tool_ctx.info("Descending automorphism through the central tower")
        return await self.run_analysis(
            tool_ctx,
            lambda: nilpotent_report(
                AlgebraDocument.loads(algebra),
                MatrixDocument.loads(automorphism) if automorphism is not None else None,
                tol,
            ),
        )

    @override
    def register(self, mcp_server: FastMCP) -> None:
        tool_self = self

        @mcp_server.tool(name=self.name, description=self.description)
        async def central_tower(
            ctx: MCPContext,
            algebra: Algebra,
            automorphism: Automorphism = None,
            tol: Tolerance = DEFAULT_TOL,
        ) -> str:
            ctx = get_context()
            return await tool_self.call(ctx, algebra=algebra, automorphism=automorphism, tol=tol)
