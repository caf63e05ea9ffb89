"""Exact computations for symplectic capacities of ellipsoids and shells.

All capacity values are stored in units of pi (the unit ball has Gromov
width 1), so every quantity handled here is a rational number or +inf.
"""

from capax.exact import INF, format_ext, parse_rat

__version__ = "0.1.0"

__all__ = ["INF", "format_ext", "parse_rat", "__version__"]
