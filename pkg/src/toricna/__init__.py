"""Energy functionals and their non-Archimedean limits on toric models."""

__version__ = "0.1.0"
