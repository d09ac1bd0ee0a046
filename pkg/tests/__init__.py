"""Tests for the crossings package."""
