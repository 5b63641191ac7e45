"""Block Hankel operators on vector-valued Hardy spaces, at finite truncation."""

__version__ = "0.1.0"
