"""Common utilities for rigidity-lab tools."""

from rigidity_lab.tools.common.base import AnalysisTool, BaseTool, ToolRegistry
from rigidity_lab.tools.common.context import ToolContext, create_tool_context

__all__ = [
    "AnalysisTool",
    "BaseTool",
    "ToolContext",
    "ToolRegistry",
    "create_tool_context",
]
