"""Daily market-trend classification from news headlines."""

__version__ = "0.1.0"
