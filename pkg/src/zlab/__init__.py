"""Numerics for zeta translates on vertical lines."""
