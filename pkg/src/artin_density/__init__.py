"""Densities of primes with prescribed primitive roots, with exact correction factors."""
from . import constants, density, qgroups, sieve

__version__ = "0.1.0"

__all__ = ["constants", "density", "qgroups", "sieve", "__version__"]
