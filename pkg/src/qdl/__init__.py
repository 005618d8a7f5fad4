"""Exact arithmetic in Z[zeta_8], complete exponential sums, local densities,
and desk-scale divisor-sum experiments, with brute-force oracles throughout."""

__version__ = "0.1.0"
