"""Quenched copolymer-in-emulsion numerics.

Closed-form path entropies, exact path-count and partition-sum oracles,
single-interface free energy estimation with rigorous bounds, block free
energies and localization criteria, the delocalized variational formula,
directed-percolation order parameter estimation, and phase-diagram curves
for a 2-d directed polymer in a coarse-grained two-fluid medium.
"""

__version__ = "0.1.0"

from . import lattice_entropy
from . import path_oracle
from . import interface_fe
from . import block_fe
from . import deloc_var
from . import percolation
from . import phase

__all__ = [
    "lattice_entropy",
    "path_oracle",
    "interface_fe",
    "block_fe",
    "deloc_var",
    "percolation",
    "phase",
    "__version__",
]
