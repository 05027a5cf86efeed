"""Reinforced quantum annealing under Kraus noise."""
__version__ = "0.1.0"
