"""Tests for graphforms."""
