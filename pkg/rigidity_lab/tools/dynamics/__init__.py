"""Dynamics tools: semiconjugacies and cone certificates."""

from fastmcp import FastMCP

from rigidity_lab.tools.common.base import BaseTool, ToolRegistry
from rigidity_lab.tools.dynamics.cone_certificate import ConeCertificateTool
from rigidity_lab.tools.dynamics.semiconjugacy import SemiconjugacyTool

__all__ = [
    "ConeCertificateTool",
    "SemiconjugacyTool",
    "get_dynamics_tools",
    "register_dynamics_tools",
]


def get_dynamics_tools() -> list[BaseTool]:
    """Create instances of the dynamics tools.

    Returns:
        List of tool instances
    """
    return [SemiconjugacyTool(), ConeCertificateTool()]


def register_dynamics_tools(mcp_server: FastMCP) -> list[BaseTool]:
    """Register the dynamics tools with the MCP server.

    Args:
        mcp_server: The FastMCP server instance

    Returns:
        List of registered tools
    """
    tools = get_dynamics_tools()
    ToolRegistry.register_tools(mcp_server, tools)
    return tools
