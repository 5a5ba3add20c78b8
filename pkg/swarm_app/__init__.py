"""Harmonic attractor dynamics for statistical robot swarms"""
__version__ = "1.0.0"
