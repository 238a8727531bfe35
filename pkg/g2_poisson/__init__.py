"""G2 Poisson - exact jet-level solver for the Poisson equation on closed G2-structures."""

__version__ = "0.1.0"
