"""Tests package for rigidity-lab."""
