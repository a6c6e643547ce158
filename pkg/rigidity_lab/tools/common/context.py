"""Tool context for rigidity-lab MCP tools.

Wraps the fastmcp Context so that every log line carries the tool name and
so that a client that has gone away never turns a finished analysis into a
failure.
"""

import contextlib
import time
from typing import final

from fastmcp import Context as MCPContext

from rigidity_lab.errors import RigidityLabError


@final
class ToolContext:
    """Per-call context of an analysis tool."""

    def __init__(self, mcp_context: MCPContext) -> None:
        """Initialize the tool context.

        Args:
            mcp_context: The underlying MCP Context
        """
        self._mcp_context: MCPContext = mcp_context
        self._tool_name: str | None = None
        self._started: float = time.perf_counter()

    @property
    def mcp_context(self) -> MCPContext:
        return self._mcp_context

    @property
    def request_id(self) -> str:
        return self._mcp_context.request_id

    @property
    def client_id(self) -> str | None:
        return self._mcp_context.client_id

    @property
    def tool_name(self) -> str | None:
        return self._tool_name

    @property
    def elapsed(self) -> float:
        """Seconds since the context was created."""
        return time.perf_counter() - self._started

    def set_tool_info(self, tool_name: str) -> None:
        """Set the name used to prefix log messages.

        Args:
            tool_name: The name of the tool being executed
        """
        self._tool_name = tool_name

    def _format_message(self, message: str) -> str:
        if self._tool_name:
            return f"[{self._tool_name}] {message}"
        return message

    async def _send(self, level: str, message: str) -> None:
        # client may have disconnected
        with contextlib.suppress(Exception):
            await getattr(self._mcp_context, level)(self._format_message(message))

    async def info(self, message: str) -> None:
        await self._send("info", message)

    async def debug(self, message: str) -> None:
        await self._send("debug", message)

    async def warning(self, message: str) -> None:
        await self._send("warning", message)

    async def error(self, message: str) -> None:
        await self._send("error", message)

    async def report_failure(self, error: RigidityLabError) -> None:
        """Log a structured analysis error with its code.

        Args:
            error: The error raised by the analysis
        """
        await self.error(f"{error.code}: {error.message}")

    async def report_progress(self, current: int, total: int) -> None:
        """Report progress to the client.

        Args:
            current: Current progress value
            total: Total progress value
        """
        with contextlib.suppress(Exception):
            await self._mcp_context.report_progress(current, total)


def create_tool_context(mcp_context: MCPContext) -> ToolContext:
    """Create a ToolContext from an MCP Context.

    Args:
        mcp_context: The MCP Context

    Returns:
        A new ToolContext
    """
    return ToolContext(mcp_context)
