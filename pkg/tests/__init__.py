"""Test suite for Agentic Tool Builder."""
