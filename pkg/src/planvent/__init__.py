"""Generate alternative floor plans, optimize them for annual thermal
discomfort with a built-in multi-zone simulator, and compare natural
ventilation behaviour scenarios."""

__version__ = "0.1.0"
