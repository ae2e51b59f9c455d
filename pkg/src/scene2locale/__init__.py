"""Scene-text address reading, offline place resolution and regional-language lookup."""

__version__ = "0.1.0"
