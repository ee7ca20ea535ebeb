"""Closed-form bound-state energies of the D-dimensional KG-Cornell problem."""
