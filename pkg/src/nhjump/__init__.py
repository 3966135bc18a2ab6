"""Lindblad dynamics with quantum jumps treated as a non-Hermitian perturbation."""

__version__ = "0.1.0"
