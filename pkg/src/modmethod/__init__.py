"""The modular method for A x^n + B y^n = C z^m with m = 2, 3."""

__version__ = "0.1.0"
