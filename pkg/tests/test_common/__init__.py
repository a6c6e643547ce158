"""Common test modules package."""
