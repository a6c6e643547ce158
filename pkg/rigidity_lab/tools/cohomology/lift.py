"""Affine lifting tool for group presentations."""

from typing import Annotated, final

from typing_extensions import TypedDict, Unpack, override

from fastmcp import Context as MCPContext
from fastmcp import FastMCP
from fastmcp.server.dependencies import get_context
from pydantic import Field

from rigidity_lab.commands import lift_report
from rigidity_lab.schemas import DefectsDocument, PresentationDocument, RhoDocument
from rigidity_lab.tools.common.base import AnalysisTool
from rigidity_lab.tools.common.validation import validate_json_parameter

Presentation = Annotated[
    str,
    Field(
        description='Group presentation as JSON: {"generators": ["a", "b"], "relators": [["a", "b", "a^-1", "b^-1"]]}',
        min_length=1,
    ),
]

Rho = Annotated[
    str,
    Field(description="Linear part per generator as JSON, a list of matrices or a mapping by generator name", min_length=1),
]

Defects = Annotated[
    str | None,
    Field(
        default=None,
        description="Translation defect of each relator as JSON, one vector per relator; zero when omitted",
    ),
]


class LiftToolParams(TypedDict, total=False):
    presentation: Presentation
    rho: Rho
    defects: Defects


@final
class LiftTool(AnalysisTool):
    """Correct generator lifts so every relator acts trivially."""

    @property
    @override
    def name(self) -> str:
        return "lift"

    @property
    @override
    def description(self) -> str:
        return """Solve for rational translations eta_s, one per generator, such that the affine lifts
x -> rho(s)x + eta_s satisfy every relator up to the given defects.

Each relator contributes a linear equation through Fox derivatives twisted by rho. Reports eta,
the common denominator q (so lifts with translations q*eta preserve the integer lattice), eta mod 1
and the corrected defects, which are zero. Fails with UNSOLVABLE when the system has no rational solution."""

    @override
    async def call(self, ctx: MCPContext, **params: Unpack[LiftToolParams]) -> str:
        tool_ctx = self.create_tool_context(ctx)
        self.set_tool_context_info(tool_ctx)

        presentation = params.get("presentation")
        rho = params.get("rho")
        defects = params.get("defects")

        checks = [
            validate_json_parameter(presentation, "presentation"),
            validate_json_parameter(rho, "rho"),
        ]
        if defects is not None:
            checks.append(validate_json_parameter(defects, "defects"))
        error = await self.first_error(tool_ctx, *checks)
        if error or presentation is None or rho is None:
            return error or "Error: Parameters 'presentation' and 'rho' are required"

        return await self.run_analysis(
            tool_ctx,
            lambda: lift_report(
                PresentationDocument.loads(presentation),
                RhoDocument.loads(rho),
                DefectsDocument.loads(defects) if defects is not None else None,
            ),
        )

    @override
    def register(self, mcp_server: FastMCP) -> None:
        tool_self = self

        @mcp_server.tool(name=self.name, description=self.description)
        async def lift(
            ctx: MCPContext,
            presentation: Presentation,
            rho: Rho,
            defects: Defects = None,
        ) -> str:
            ctx = get_context()
            return await tool_self.call(ctx, presentation=presentation, rho=rho, defects=defects)
