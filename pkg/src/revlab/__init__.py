"""Local reversibility, fluctuation and mean-field lab for local Hamiltonians."""

__version__ = "0.0.0"
