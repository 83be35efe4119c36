"""Unit tests for plangen."""
