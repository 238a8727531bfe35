"""G2 Poisson computation services package."""
