"""Quantum Cramer-Rao limits of laser-interferometer GW detectors and their
reciprocity with GW radiation and gravitational decoherence."""

__version__ = "0.1.0"
