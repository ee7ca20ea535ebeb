"""Closed-form radial wave functions and their normalisation."""
