"""Shooting eigen-solver for the reduced radial KG-Cornell equation."""
