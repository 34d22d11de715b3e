"""Convergence-study driver: refinement sweeps, rate tables and the dgconverge CLI."""
