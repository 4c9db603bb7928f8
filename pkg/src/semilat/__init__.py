"""Exact verification tools for finite semilattices, their filter duals,
0/1 functions with jump ledgers, and leaps of rational functions on
sublattices of chain products."""

from .errors import OrderError, ParseError
from .order import (
    INF,
    FiniteDistributiveLattice,
    FiniteSemilattice,
    chain,
    lattice_from_covers,
    semilattice_from_covers,
    validate_lattice,
    validate_semilattice,
)

__all__ = [
    "INF", "OrderError", "ParseError", "FiniteSemilattice", "FiniteDistributiveLattice",
    "chain", "lattice_from_covers", "semilattice_from_covers", "validate_lattice",
    "validate_semilattice",
]
__version__ = "0.1.0"
