"""Subgroup and representation zeta functions of finitely generated nilpotent groups, computed exactly."""

__version__ = "0.1.0"
