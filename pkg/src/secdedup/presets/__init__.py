"""Packaged data files: the default per-tool schema catalog."""
