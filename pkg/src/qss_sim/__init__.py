"""Exact simulation of a three-party quantum secret sharing protocol,
Bob's intercept-replace attack on it, and the decoy-photon countermeasure."""

__version__ = "0.1.0"
