"""Configuration for powerdiv."""
