"""Discrete time-frequency analysis of pseudo-differential and Fourier integral operators."""

from .errors import ConfigurationError, HypothesisError
from .fio import (
    Amplitude3D,
    PhaseFn,
    direct_pairing,
    fio_matrix,
    hessian_condition,
    kernel_map,
    parse_phase,
    tf_pairing,
)
from .grid import PhaseSpaceGrid, Signal, make_grid
from .modspace import MixedNormSpec, mod_norm, mod_norm_2d
from .quantize import OperatorMatrix, Symbol2D, apply_operator, exchange, kernel_from_symbol
from .schatten import SchattenReport, schatten_norms
from .stft import Window, gaussian_window, stft, stft_adjoint
from .weights import Weight, bracket_power, check_moderate, parse_weight

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "HypothesisError",
    "Amplitude3D",
    "PhaseFn",
    "direct_pairing",
    "fio_matrix",
    "hessian_condition",
    "kernel_map",
    "parse_phase",
    "tf_pairing",
    "PhaseSpaceGrid",
    "Signal",
    "make_grid",
    "MixedNormSpec",
    "mod_norm",
    "mod_norm_2d",
    "OperatorMatrix",
    "Symbol2D",
    "apply_operator",
    "exchange",
    "kernel_from_symbol",
    "SchattenReport",
    "schatten_norms",
    "Window",
    "gaussian_window",
    "stft",
    "stft_adjoint",
    "Weight",
    "bracket_power",
    "check_moderate",
    "parse_weight",
]
