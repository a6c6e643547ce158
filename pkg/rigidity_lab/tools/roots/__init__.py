"""Root system tools."""

from fastmcp import FastMCP

from rigidity_lab.tools.common.base import BaseTool, ToolRegistry
from rigidity_lab.tools.roots.cartan_gcds import CartanGcdsTool
from rigidity_lab.tools.roots.nonresonance import NonresonanceTool

__all__ = [
    "CartanGcdsTool",
    "NonresonanceTool",
    "get_roots_tools",
    "register_roots_tools",
]


def get_roots_tools() -> list[BaseTool]:
    return [NonresonanceTool(), CartanGcdsTool()]


def register_roots_tools(mcp_server: FastMCP) -> list[BaseTool]:
    """Register the root system tools with the MCP server.

    Args:
        mcp_server: The FastMCP server instance

    Returns:
        List of registered tools
    """
    tools = get_roots_tools()
    ToolRegistry.register_tools(mcp_server, tools)
    return tools
