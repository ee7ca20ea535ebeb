"""Canonical-ensemble thermodynamics of the linear-in-n spectrum."""
