"""Test fixtures for the rigidity-lab project."""

import json
import tempfile
from pathlib import Path
from unittest.mock import AsyncMock, MagicMock

import pytest

from rigidity_lab.tools.common.context import ToolContext

CAT_MAP = [[2, 1], [1, 1]]


@pytest.fixture
def temp_dir():
    """Create a temporary directory for testing."""
    with tempfile.TemporaryDirectory() as temp_dir:
        yield temp_dir


@pytest.fixture
def write_json(temp_dir):
    """Write a JSON document into the temporary directory and return its path."""

    def _write(name: str, document: object) -> str:
        path = Path(temp_dir) / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)

    return _write


@pytest.fixture
def cat_map() -> list[list[int]]:
    """The hyperbolic automorphism [[2, 1], [1, 1]] of the 2-torus."""
    return [row[:] for row in CAT_MAP]


@pytest.fixture
def rng():
    """Seeded random generator for property-style checks."""
    import numpy as np

    return np.random.default_rng(20240601)


@pytest.fixture
def mcp_context():
    """Mock MCP context for testing."""
    mock_context = MagicMock()
    mock_context.info = AsyncMock()
    mock_context.error = AsyncMock()
    mock_context.warning = AsyncMock()
    mock_context.debug = AsyncMock()
    mock_context.report_progress = AsyncMock()
    mock_context.request_id = "test-request-id"
    mock_context.client_id = "test-client-id"
    return mock_context


@pytest.fixture
def tool_context(mcp_context):
    """Create a tool context for testing."""
    return ToolContext(mcp_context)
