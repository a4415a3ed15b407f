"""Simulated-annealing software selection / hardware mapping, its ILP oracle, and an active-learning tuner."""

__version__ = "0.1.0"
