"""Cone certificate tool for compositions f^N g f^N."""

from typing import Annotated, final

from typing_extensions import TypedDict, Unpack, override

from fastmcp import Context as MCPContext
from fastmcp import FastMCP
from fastmcp.server.dependencies import get_context
from pydantic import Field

from rigidity_lab.commands import cone_cert_report
from rigidity_lab.core.matrix_core import DEFAULT_TOL
from rigidity_lab.schemas import MapDocument, MatrixDocument
from rigidity_lab.tools.common.base import AnalysisTool, handle_connection_errors
from rigidity_lab.tools.common.validation import (
    validate_json_parameter,
    validate_positive_int,
    validate_tolerance,
)

MAX_SAMPLES = 1_000_000

HyperbolicMatrix = Annotated[
    str,
    Field(description="Hyperbolic matrix f as JSON", min_length=1),
]

Perturbation = Annotated[
    str,
    Field(
        description='The map g as JSON: a matrix, or {"matrix": ..., "field": <periodic field>} for x -> Bx + v(x)',
        min_length=1,
    ),
]

Epsilon = Annotated[
    float,
    Field(default=1.0, description="Cone aperture, in (0, 1]"),
]

Delta0 = Annotated[
    float | None,
    Field(default=None, description="Override for delta0; must lie in (0, r/C). Defaults to r/(2C)"),
]

Samples = Annotated[
    int,
    Field(default=10000, description="Sample count for the derivative bounds of a nonlinear g and for verification"),
]

Seed = Annotated[
    int,
    Field(default=0, description="Sampling seed"),
]

Verify = Annotated[
    bool,
    Field(default=False, description="Sample the cone conditions on the certified composition"),
]


class ConeCertificateToolParams(TypedDict, total=False):
    f: HyperbolicMatrix
    g: Perturbation
    eps: Epsilon
    delta0: Delta0
    samples: Samples
    seed: Seed
    verify: Verify


@final
class ConeCertificateTool(AnalysisTool):
    """Smallest N for which f^N g f^N maps the unstable cone strictly into itself."""

    @property
    @override
    def name(self) -> str:
        return "cone_certificate"

    @property
    @override
    def description(self) -> str:
        return """Certify that f^N g f^N is hyperbolic with the cone field of f, for the smallest N.

Computes the transversality constants r and C of g in the adapted coordinates of f, the adapted
rate lambda, the threshold T and the least N satisfying the three power inequalities, each with
its slack. Constants for a nonlinear g are sampled and labelled empirical. With verify, the cone
conditions are sampled on the composition and any violation is reported."""

    @override
    async def call(self, ctx: MCPContext, **params: Unpack[ConeCertificateToolParams]) -> str:
        tool_ctx = self.create_tool_context(ctx)
        self.set_tool_context_info(tool_ctx)

        f = params.get("f")
        g = params.get("g")
        eps = params.get("eps", 1.0)
        delta0 = params.get("delta0")
        samples = params.get("samples", 10000)
        seed = params.get("seed", 0)
        verify = params.get("verify", False)

        error = await self.first_error(
            tool_ctx,
            validate_json_parameter(f, "f"),
            validate_json_parameter(g, "g"),
            validate_tolerance(eps, "eps", upper=1.0, inclusive_upper=True),
            validate_positive_int(samples, "samples", maximum=MAX_SAMPLES),
        )
        if error or f is None or g is None:
            return error or "Error: Parameters 'f' and 'g' are required"

        await tool_ctx.info(f"Certifying cone power with eps={eps}, samples={samples}")
        return await self.run_analysis(
            tool_ctx,
            lambda: cone_cert_report(
                MatrixDocument.loads(f),
                MapDocument.loads(g),
                eps=eps,
                delta0=delta0,
                samples=samples,
                seed=seed,
                verify=verify,
                tol=DEFAULT_TOL,
            ),
        )

    @override
    def register(self, mcp_server: FastMCP) -> None:
        tool_self = self

        @mcp_server.tool(name=self.name, description=self.description)
        @handle_connection_errors
        async def cone_certificate(
            ctx: MCPContext,
            f: HyperbolicMatrix,
            g: Perturbation,
            eps: Epsilon = 1.0,
            delta0: Delta0 = None,
            samples: Samples = 10000,
            seed: Seed = 0,
            verify: Verify = False,
        ) -> str:
            ctx = get_context()
            return await tool_self.call(
                ctx,
                f=f,
                g=g,
                eps=eps,
                delta0=delta0,
                samples=samples,
                seed=seed,
                verify=verify,
            )
