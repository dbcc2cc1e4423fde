"""Exact construction and verification of anti-self-dual Ricci-flat metrics
built from solutions of the asymmetric heavenly equation."""

__version__ = "0.1.0"
