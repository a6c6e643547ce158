"""Linear-algebra tools: hyperbolicity, splittings, regularity and rank-one tests."""

from fastmcp import FastMCP

from rigidity_lab.tools.common.base import BaseTool, ToolRegistry
from rigidity_lab.tools.linear.hyperbolic import HyperbolicTool
from rigidity_lab.tools.linear.rank_one import RankOneTool
from rigidity_lab.tools.linear.regularity import RegularityTool
from rigidity_lab.tools.linear.splitting import SplittingTool

__all__ = [
    "HyperbolicTool",
    "RankOneTool",
    "RegularityTool",
    "SplittingTool",
    "get_linear_tools",
    "register_linear_tools",
]


def get_linear_tools() -> list[BaseTool]:
    """Create instances of all linear-algebra tools.

    Returns:
        List of tool instances
    """
    return [
        HyperbolicTool(),
        SplittingTool(),
        RegularityTool(),
        RankOneTool(),
    ]


def register_linear_tools(mcp_server: FastMCP) -> list[BaseTool]:
    """Register all linear-algebra tools with the MCP server.

    Args:
        mcp_server: The FastMCP server instance

    Returns:
        List of registered tools
    """
    tools = get_linear_tools()
    ToolRegistry.register_tools(mcp_server, tools)
    return tools
