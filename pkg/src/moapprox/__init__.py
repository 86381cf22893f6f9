"""Approximate Pareto sets for multiobjective maximum TSP and MaxSAT.

Built on a multi-color Beck-Fiala rounding with exact rational arithmetic.
"""

__version__ = "0.1.0"
