"""Tests for the shared domain types."""
