"""momentkit: truncated moment problems, backward extensions, and
weighted-shift completion solvers with verifiable certificates."""

__version__ = "0.1.0"
