"""Bundled run configurations (JSON)."""
