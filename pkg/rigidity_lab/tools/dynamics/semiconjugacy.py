"""Semiconjugacy solver tool for perturbed toral automorphisms."""

from typing import Annotated, final

from typing_extensions import TypedDict, Unpack, override

from fastmcp import Context as MCPContext
from fastmcp import FastMCP
from fastmcp.server.dependencies import get_context
from pydantic import Field

from rigidity_lab.commands import SEMICONJ_DEFAULT_TOL, semiconj_report
from rigidity_lab.schemas import FieldDocument, MatrixDocument
from rigidity_lab.tools.common.base import AnalysisTool, handle_connection_errors
from rigidity_lab.tools.common.validation import (
    validate_json_parameter,
    validate_positive_int,
    validate_tolerance,
)

MAX_GRID = 1024
MAX_TERMS = 10_000

Matrix = Annotated[
    str,
    Field(description="Hyperbolic integer matrix A defining the toral automorphism, as JSON", min_length=1),
]

PeriodicField = Annotated[
    str | None,
    Field(
        default=None,
        description=(
            'Periodic displacement u as JSON: {"modes": [{"k": [1, 0], "amp": [0.01, 0], "phase": "sin"}]},'
            ' {"values": <grid samples>} or {"zero": true}; zero when omitted'
        ),
    ),
]

Tolerance = Annotated[
    float,
    Field(default=SEMICONJ_DEFAULT_TOL, description="Target sup-norm residual, in (0, 1)"),
]

Grid = Annotated[
    int,
    Field(default=64, description="Grid points per axis for tabulating w and checking the residual"),
]

MaxTerms = Annotated[
    int,
    Field(default=200, description="Upper bound on correction series terms per direction"),
]

Seed = Annotated[
    int,
    Field(default=0, description="Seed for off-grid verification points"),
]

Verify = Annotated[
    bool,
    Field(default=False, description="Also solve by Picard iteration at seeded points and report the difference"),
]


class SemiconjugacyToolParams(TypedDict, total=False):
    """Parameters for the SemiconjugacyTool.

    Attributes:
        matrix: Hyperbolic automorphism A
        field: Periodic displacement u with f(x) = Ax + u(x)
        tol: Target residual
        grid: Grid size per axis
        max_terms: Series truncation cap
        seed: Verification seed
        verify: Cross-check against Picard iteration
    """

    matrix: Matrix
    field: PeriodicField
    tol: Tolerance
    grid: Grid
    max_terms: MaxTerms
    seed: Seed
    verify: Verify


@final
class SemiconjugacyTool(AnalysisTool):
    """Solve A(x + w(x)) = f(x) + w(f(x)) for a periodic w."""

    @property
    @override
    def name(self) -> str:
        return "semiconjugacy"

    @property
    @override
    def description(self) -> str:
        return """Find the periodic correction w semiconjugating f(x) = Ax + u(x) on the torus to the linear map A.

The stable and unstable components of w are summed as convergent series along forward and backward
orbits. Reports the residual sup-norm on the grid and at seeded off-grid points, the number of
series terms used and the adapted contraction rate. Fails with Budget when the residual
misses tol within max_terms."""

    @override
    async def call(self, ctx: MCPContext, **params: Unpack[SemiconjugacyToolParams]) -> str:
        tool_ctx = self.create_tool_context(ctx)
        self.set_tool_context_info(tool_ctx)

        matrix = params.get("matrix")
        field = params.get("field")
        tol = params.get("tol", SEMICONJ_DEFAULT_TOL)
        grid = params.get("grid", 64)
        max_terms = params.get("max_terms", 200)
        seed = params.get("seed", 0)
        verify = params.get("verify", False)

        checks = [
            validate_json_parameter(matrix, "matrix"),
            validate_tolerance(tol, "tol", upper=1.0),
            validate_positive_int(grid, "grid", maximum=MAX_GRID),
            validate_positive_int(max_terms, "max_terms", maximum=MAX_TERMS),
        ]
        if field is not None:
            checks.append(validate_json_parameter(field, "field"))
        error = await self.first_error(tool_ctx, *checks)
        if error or matrix is None:
            return error or "Error: Parameter 'matrix' is required"

        await tool_ctx.info(f"Solving semiconjugacy on a grid of {grid} per axis, tol={tol}")
        return await self.run_analysis(
            tool_ctx,
            lambda: semiconj_report(
                MatrixDocument.loads(matrix),
                FieldDocument.loads(field) if field is not None else FieldDocument(zero=True),
                tol=tol,
                grid=grid,
                max_terms=max_terms,
                seed=seed,
                verify=verify,
            ),
        )

    @override
    def register(self, mcp_server: FastMCP) -> None:
        tool_self = self

        @mcp_server.tool(name=self.name, description=self.description)
        @handle_connection_errors
        async def semiconjugacy(
            ctx: MCPContext,
            matrix: Matrix,
            field: PeriodicField = None,
            tol: Tolerance = SEMICONJ_DEFAULT_TOL,
            grid: Grid = 64,
            max_terms: MaxTerms = 200,
            seed: Seed = 0,
            verify: Verify = False,
        ) -> str:
            ctx = get_context()
            return await tool_self.call(
                ctx,
                matrix=matrix,
                field=field,
                tol=tol,
                grid=grid,
                max_terms=max_terms,
                seed=seed,
                verify=verify,
            )
