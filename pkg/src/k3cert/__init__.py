"""Certification toolkit for quartic K3 surfaces and their hyperkahler data."""

__version__ = "0.1.0"
