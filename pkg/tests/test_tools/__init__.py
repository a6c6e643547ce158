"""Tests for the MCP analysis tools."""
