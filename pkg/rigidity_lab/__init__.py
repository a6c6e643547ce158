"""rigidity-lab - computational toolkit for hyperbolic rigidity."""

__version__ = "0.1.0"
