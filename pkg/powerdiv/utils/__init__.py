"""Utility functions for powerdiv."""
