"""Tests for the computational core."""
