"""Prime divisors of P(T) versus P(T^k): sieves, certificates and group checks."""

__version__ = "0.1.0"
