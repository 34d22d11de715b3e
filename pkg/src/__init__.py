"""dgrates: discontinuous Galerkin solvers and convergence studies for 1D conservation laws."""

__version__ = "0.1.0"
