"""repairbot: a desk-scale CI repair bot over a simulated software forge."""

__version__ = "0.1.0"
