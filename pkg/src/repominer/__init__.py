"""Mine public code archives for malware source-code repositories."""

__version__ = "0.1.0"
