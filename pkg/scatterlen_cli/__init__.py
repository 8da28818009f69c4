"""Scatterlen: periodic-orbit length spectra of planar open billiards"""

__version__ = "0.3.0"
