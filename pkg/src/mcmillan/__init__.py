"""Random Hankel matrix norm bounds and McMillan degree lower bounds."""

__version__ = "0.1.0"
