"""Tools package for rigidity-lab.

Every analysis of the library is exposed as one MCP tool. Tool inputs are the
same JSON documents the CLI reads from files, passed inline as strings.
"""

from fastmcp import FastMCP

from rigidity_lab.tools.cohomology import register_cohomology_tools
from rigidity_lab.tools.common.base import BaseTool
from rigidity_lab.tools.dynamics import register_dynamics_tools
from rigidity_lab.tools.linear import register_linear_tools
from rigidity_lab.tools.nilpotent import register_nilpotent_tools
from rigidity_lab.tools.roots import register_roots_tools


def register_all_tools(mcp_server: FastMCP) -> dict[str, BaseTool]:
    """Register all rigidity-lab tools with the MCP server.

    Args:
        mcp_server: The FastMCP server instance

    Returns:
        Registered tools keyed by name
    """
    all_tools: dict[str, BaseTool] = {}

    for register in (
        register_linear_tools,
        register_roots_tools,
        register_nilpotent_tools,
        register_dynamics_tools,
        register_cohomology_tools,
    ):
        for tool in register(mcp_server):
            all_tools[tool.name] = tool

    return all_tools
