"""Fixed-point toolkit for partial metric spaces."""

__version__ = "0.1.0"
