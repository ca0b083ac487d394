"""uq-evolve: evolutionary search for uncertainty-quantification scorers."""

__version__ = "0.1.0"
