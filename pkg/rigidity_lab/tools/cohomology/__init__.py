"""Group cohomology tools."""

from fastmcp import FastMCP

from rigidity_lab.tools.cohomology.lift import LiftTool
from rigidity_lab.tools.common.base import BaseTool, ToolRegistry

__all__ = [
    "LiftTool",
    "get_cohomology_tools",
    "register_cohomology_tools",
]


def get_cohomology_tools() -> list[BaseTool]:
    return [LiftTool()]


def register_cohomology_tools(mcp_server: FastMCP) -> list[BaseTool]:
    """Register the cohomology tools with the MCP server.

    Args:
        mcp_server: The FastMCP server instance

    Returns:
        List of registered tools
    """
    tools = get_cohomology_tools()
    ToolRegistry.register_tools(mcp_server, tools)
    return tools
