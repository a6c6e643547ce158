"""Base classes for rigidity-lab MCP tools.

Every analysis is exposed as a tool whose parameters are inline JSON
documents (the same documents the CLI reads from files) and whose result is
the JSON report, or an ``Error: ...`` string carrying the structured error.
"""

import asyncio
import functools
import json
from abc import ABC, abstractmethod
from collections.abc import Awaitable, Callable
from typing import Any, final

from fastmcp import Context as MCPContext
from fastmcp import FastMCP

from rigidity_lab.errors import RigidityLabError
from rigidity_lab.schemas import Report
from rigidity_lab.tools.common.context import ToolContext, create_tool_context
from rigidity_lab.tools.common.validation import ValidationResult


def handle_connection_errors(
    func: Callable[..., Awaitable[str]],
) -> Callable[..., Awaitable[str]]:
    """Turn a client disconnect during a long analysis into a plain message.

    Args:
        func: The async tool function to wrap

    Returns:
        Wrapped function
    """

    @functools.wraps(func)
    async def wrapper(*args: Any, **kwargs: Any) -> str:
        try:
            return await func(*args, **kwargs)
        except Exception as e:
            error_name = type(e).__name__
            if any(
                name in error_name
                for name in ["ClosedResourceError", "ConnectionError", "BrokenPipeError"]
            ):
                return f"Client disconnected during operation: {error_name}"
            raise

    return wrapper


class BaseTool(ABC):
    """Abstract base class for all rigidity-lab tools."""

    @property
    @abstractmethod
    def name(self) -> str:
        """Get the tool name.

        Returns:
            The tool name as it will appear in the MCP server
        """
        pass

    @property
    @abstractmethod
    def description(self) -> str:
        """Get the tool description.

        Returns:
            Description of the analysis and its inputs
        """
        pass

    @abstractmethod
    async def call(self, ctx: MCPContext, **params: Any) -> Any:
        """Execute the tool with the given parameters.

        Args:
            ctx: MCP context for the tool call
            **params: Tool parameters provided by the caller

        Returns:
            Tool execution result as a string
        """
        pass

    @abstractmethod
    def register(self, mcp_server: FastMCP) -> None:
        """Register this tool with the MCP server.

        Args:
            mcp_server: The FastMCP server instance
        """
        pass


class AnalysisTool(BaseTool, ABC):
    """Base class for tools that run one analysis and return its report."""

    def create_tool_context(self, ctx: MCPContext) -> ToolContext:
        return create_tool_context(ctx)

    def set_tool_context_info(self, tool_ctx: ToolContext) -> None:
        tool_ctx.set_tool_info(self.name)

    async def first_error(self, tool_ctx: ToolContext, *results: ValidationResult) -> str | None:
        """Log and return the first failed validation as an error string, if any."""
        for result in results:
            if result.is_error:
                await tool_ctx.error(result.error_message)
                return f"Error: {result.error_message}"
        return None

    async def run_analysis(self, tool_ctx: ToolContext, builder: Callable[[], Report]) -> str:
        """Run a report builder off the event loop and render the outcome.

        Args:
            tool_ctx: Tool context for logging
            builder: Zero-argument callable producing the report

        Returns:
            The report JSON, or "Error: " followed by the error JSON
        """
        await tool_ctx.report_progress(0, 1)
        try:
            report = await asyncio.to_thread(builder)
        except RigidityLabError as e:
            await tool_ctx.report_failure(e)
            return f"Error: {json.dumps(e.to_dict(), sort_keys=True)}"
        except Exception as e:
            await tool_ctx.error(f"Unexpected failure: {e}")
            return f"Error: {e}"
        await tool_ctx.report_progress(1, 1)
        await tool_ctx.info(f"Finished {report.kind} report in {tool_ctx.elapsed:.3f}s")
        return report.to_json()


@final
class ToolRegistry:
    """Registers tool implementations with an MCP server."""

    @staticmethod
    def register_tool(mcp_server: FastMCP, tool: BaseTool) -> None:
        tool.register(mcp_server)

    @staticmethod
    def register_tools(mcp_server: FastMCP, tools: list[BaseTool]) -> None:
        """Register multiple tools with the MCP server.

        Args:
            mcp_server: The FastMCP server instance
            tools: List of tools to register
        """
        for tool in tools:
            ToolRegistry.register_tool(mcp_server, tool)
