"""Tests for seed and hash helpers."""
