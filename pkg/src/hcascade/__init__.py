"""Stationary random metrics from multiplicative cascades.

Simulation and exact analysis of the random metrics obtained by
iterated glueing on hierarchical brick graphs and on the Sierpinski
gasket: min-plus brick combinatorics and exact percolation functions
(bricks), empirical-distribution machinery with an exact atomic oracle
(dist), the Monte Carlo renormalization kernels and cut-off processes
(renorm), critical-constant estimation and stationary laws (critical),
the geometry of the limit space (geometry), and the gasket extension
(sierpinski).  `hcascade.cli` ties everything to files.
"""

from . import bricks, critical, dist, geometry, renorm, rng, sierpinski

__version__ = "0.1.0"

__all__ = [
    "bricks",
    "critical",
    "dist",
    "geometry",
    "renorm",
    "rng",
    "sierpinski",
    "__version__",
]
