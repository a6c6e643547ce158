"""Nilpotent Lie algebra tools."""

from fastmcp import FastMCP

from rigidity_lab.tools.common.base import BaseTool, ToolRegistry
from rigidity_lab.tools.nilpotent.central_tower import CentralTowerTool

__all__ = [
    "CentralTowerTool",
    "get_nilpotent_tools",
    "register_nilpotent_tools",
]


def get_nilpotent_tools() -> list[BaseTool]:
    return [CentralTowerTool()]


def register_nilpotent_tools(mcp_server: FastMCP) -> list[BaseTool]:
    """Register the nilpotent algebra tools with the MCP server.

    Args:
        mcp_server: The FastMCP server instance

    Returns:
        List of registered tools
    """
    tools = get_nilpotent_tools()
    ToolRegistry.register_tools(mcp_server, tools)
    return tools
