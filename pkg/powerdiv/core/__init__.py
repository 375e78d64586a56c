"""Exact arithmetic, prime, power and group kernels."""
