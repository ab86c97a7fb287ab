"""Group-ring chain complexes and finite-quotient L2 Betti estimates for F x F x F."""

__version__ = "0.1.0"
