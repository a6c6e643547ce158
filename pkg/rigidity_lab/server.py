"""MCP server exposing the rigidity-lab analyses."""

from typing import Literal, cast, final

from fastmcp import FastMCP
from fastmcp.utilities.logging import get_logger

from rigidity_lab.tools import register_all_tools
from rigidity_lab.tools.common.base import BaseTool

logger = get_logger(__name__)


@final
class RigidityLabServer:
    """MCP server with one tool per analysis."""

    def __init__(
        self,
        name: str = "rigidity-lab",
        mcp_instance: FastMCP | None = None,
    ):
        """Initialize the server.

        Args:
            name: The name of the server
            mcp_instance: Optional FastMCP instance for testing
        """
        self.mcp = mcp_instance if mcp_instance is not None else FastMCP(name)
        self.tools: dict[str, BaseTool] = register_all_tools(mcp_server=self.mcp)
        logger.debug("Registered tools: %s", ", ".join(sorted(self.tools)))

    def run(self, transport: str = "stdio") -> None:
        """Run the MCP server.

        Args:
            transport: The transport to use (stdio or sse)
        """
        transport_type = cast(Literal["stdio", "sse"], transport)
        self.mcp.run(transport=transport_type)
