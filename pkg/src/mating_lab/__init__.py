"""Conformal dynamics lab: Schwarz reflections of univalent rational maps,
necklace Kleinian reflection groups, critically fixed anti-polynomials, and
the exact circle combinatorics tying their fractals together."""

__version__ = "0.1.0"
