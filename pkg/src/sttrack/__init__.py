"""Self-triggered coordination of boundary robots tracking a target."""

__version__ = "0.1.0"
