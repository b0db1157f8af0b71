"""Quanto-LV - quanto caplet pricing under local volatility.

Core package for the Gaussian proxy, second and third order expansion
formulas, the market approximation and the Monte Carlo benchmark.
"""

__version__ = "0.1.0"
