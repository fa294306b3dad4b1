"""Classical genus-two DAHA: relations, mapping-class action and fixed-locus checks."""

__version__ = "0.1.0"
