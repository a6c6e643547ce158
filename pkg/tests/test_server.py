"""Tests for the server module."""

from unittest.mock import MagicMock

import pytest

from rigidity_lab.server import RigidityLabServer
from rigidity_lab.tools.common.base import AnalysisTool

EXPECTED_TOOLS = {
    "hyperbolic",
    "splitting",
    "regularity",
    "rank_one",
    "nonresonance",
    "cartan_gcds",
    "central_tower",
    "semiconjugacy",
    "cone_certificate",
    "lift",
}


class TestRigidityLabServer:
    """Test the RigidityLabServer class."""

    @pytest.fixture
    def server(self) -> tuple[RigidityLabServer, MagicMock]:
        """Create a server around a mock FastMCP instance."""
        mock_mcp = MagicMock()
        return RigidityLabServer(name="test-server", mcp_instance=mock_mcp), mock_mcp

    def test_initialization(self, server: tuple[RigidityLabServer, MagicMock]) -> None:
        server_instance, mock_mcp = server

        assert server_instance.mcp is mock_mcp
        assert set(server_instance.tools) == EXPECTED_TOOLS
        assert all(isinstance(tool, AnalysisTool) for tool in server_instance.tools.values())

    def test_every_tool_registered_by_name(self, server: tuple[RigidityLabServer, MagicMock]) -> None:
        _, mock_mcp = server

        registered = {c.kwargs["name"] for c in mock_mcp.tool.call_args_list}
        assert registered == EXPECTED_TOOLS
        assert all(c.kwargs["description"] for c in mock_mcp.tool.call_args_list)

    @pytest.mark.parametrize("transport", ["stdio", "sse"])
    def test_run(self, server: tuple[RigidityLabServer, MagicMock], transport: str) -> None:
        server_instance, mock_mcp = server

        server_instance.run(transport=transport)

        mock_mcp.run.assert_called_once_with(transport=transport)

    def test_real_fastmcp_instance(self) -> None:
        server_instance = RigidityLabServer(name="rigidity-lab-test")

        assert server_instance.mcp.name == "rigidity-lab-test"
        assert len(server_instance.tools) == len(EXPECTED_TOOLS)
