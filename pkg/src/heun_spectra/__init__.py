"""Heine-Stieltjes spectra of the Heun equation and their limiting root locus."""
from .poly import Polynomial, Triangle
from .spectral import HeunOperator, SpectrumResult, VanVleckPair, solve

__all__ = ["Polynomial", "Triangle", "HeunOperator", "SpectrumResult", "VanVleckPair", "solve"]
__version__ = "0.1.0"
