"""Sign changes of Hecke eigenform coefficients along norm-form sets."""

__version__ = "0.1.0"
