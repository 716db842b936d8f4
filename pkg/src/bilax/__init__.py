"""bilax: Hamiltonian-to-zero-curvature toolkit for open integrable lattices.

Exact verification of r-matrix / reflection Poisson algebras, algorithmic
double-row Lax pair construction, and numerical simulation of open Toda
chains with conservation diagnostics.
"""

from .backend import KERNEL_BACKEND, RATIONAL_BACKEND

__version__ = "0.1.0"
__all__ = ["KERNEL_BACKEND", "RATIONAL_BACKEND", "__version__"]
