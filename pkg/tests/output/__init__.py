"""Tests for artifact provenance and atomic writes."""
