"""Discontinuous Galerkin solver for 1D conservation laws.

This package implements the DG spatial operator with local Lax-Friedrichs
fluxes, forward Euler and Adams-Bashforth time stepping, and the Burgers and
blood-flow manufactured-solution problems used in convergence studies.
"""
