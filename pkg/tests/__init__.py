"""Test suite for graph_of_records."""
