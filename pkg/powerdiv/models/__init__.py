"""Data models for powerdiv."""
