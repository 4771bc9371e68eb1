"""Python package."""
