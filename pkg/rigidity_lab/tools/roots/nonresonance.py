"""Resonance classification tool for root systems and weight sets."""

from typing import Annotated, final

from typing_extensions import TypedDict, Unpack, override

from fastmcp import Context as MCPContext
from fastmcp import FastMCP
from fastmcp.server.dependencies import get_context
from pydantic import Field

from rigidity_lab.commands import nonres_report
from rigidity_lab.schemas import WeightsDocument
from rigidity_lab.tools.common.base import AnalysisTool
from rigidity_lab.tools.common.validation import validate_json_parameter, validate_positive_int

Family = Annotated[
    str,
    Field(description="Root system family: A, B, C, D, BC, E6, E7, E8, F4 or G2", min_length=1),
]

Rank = Annotated[
    int | None,
    Field(default=None, description="Rank; optional for the exceptional families"),
]

HighestWeight = Annotated[
    str | None,
    Field(
        default=None,
        description='Highest weight as comma separated numbers, e.g. "1,0,0"; Dynkin labels by default',
    ),
]

EpsilonCoords = Annotated[
    bool,
    Field(default=False, description="Read the highest weight in epsilon coordinates instead of Dynkin labels"),
]

Weights = Annotated[
    str | None,
    Field(
        default=None,
        description="Explicit weights as JSON, a list of vectors in epsilon coordinates; overrides the highest weight",
    ),
]


class NonresonanceToolParams(TypedDict, total=False):
    family: Family
    rank: Rank
    highest_weight: HighestWeight
    epsilon_coords: EpsilonCoords
    weights: Weights


@final
class NonresonanceTool(AnalysisTool):
    """Split roots into resonant and nonresonant for a representation."""

    @property
    @override
    def name(self) -> str:
        return "nonresonance"

    @property
    @override
    def description(self) -> str:
        return """Classify the roots of a root system as resonant or nonresonant for a set of weights.

A root is resonant when it is a difference of two weights. The weights are either the orbit
of a highest weight under the Weyl group (dominant weights below it included) or given explicitly.
The report says whether the nonresonant roots generate the whole root system, only a proper
subsystem, or nothing, and lists the generation trace."""

    @override
    async def call(self, ctx: MCPContext, **params: Unpack[NonresonanceToolParams]) -> str:
        tool_ctx = self.create_tool_context(ctx)
        self.set_tool_context_info(tool_ctx)

        family = params.get("family")
        rank = params.get("rank")
        highest_weight = params.get("highest_weight")
        epsilon_coords = params.get("epsilon_coords", False)
        weights = params.get("weights")

        if not family:
            await tool_ctx.error("Parameter 'family' is required")
            return "Error: Parameter 'family' is required"
        if weights is None and highest_weight is None:
            message = "One of 'highest_weight' or 'weights' is required"
            await tool_ctx.error(message)
            return f"Error: {message}"

        checks = [validate_positive_int(rank, "rank")]
        if weights is not None:
            checks.append(validate_json_parameter(weights, "weights"))
        error = await self.first_error(tool_ctx, *checks)
        if error:
            return error

        await tool_ctx.info(f"Resonance analysis for {family}{rank or ''}")
        return await self.run_analysis(
            tool_ctx,
            lambda: nonres_report(
                family,
                rank,
                highest_weight=highest_weight,
                epsilon_coords=epsilon_coords,
                weights=WeightsDocument.loads(weights) if weights is not None else None,
            ),
        )

    @override
    def register(self, mcp_server: FastMCP) -> None:
        tool_self = self

        @mcp_server.tool(name=self.name, description=self.description)
        async def nonresonance(
            ctx: MCPContext,
            family: Family,
            rank: Rank = None,
            highest_weight: HighestWeight = None,
            epsilon_coords: EpsilonCoords = False,
            weights: Weights = None,
        ) -> str:
            ctx = get_context()
            return await tool_self.call(
                ctx,
                family=family,
                rank=rank,
                highest_weight=highest_weight,
                epsilon_coords=epsilon_coords,
                weights=weights,
            )
