"""t-quantized pseudo-differential operators on the periodic grid.

Kernel convention: ``K(x, y) = (2 pi)^(-1/2) (F_2^{-1} a)((1-t)x + t y, x - y)``,
so that ``a(x, xi) = xi`` quantizes to ``-i d/dx`` for every ``t``. The
difference ``x - y`` is taken on the torus (centered representative), and
the first argument of the symbol is reached by trigonometric interpolation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError
from .grid import PhaseSpaceGrid, Signal, dft_unitary, idft_unitary
from .modspace import MixedNormSpec, mod_norm_2d
from .stft import Window
from .weights import Weight, constant_weight, kernel_weight_transform

__all__ = [
    "Symbol2D",
    "OperatorMatrix",
    "kernel_from_symbol",
    "apply_operator",
    "exchange",
    "symbol_l2_norm",
    "reflect_symbol_weight",
    "pseudomod_ratio_experiment",
]


@dataclass(frozen=True)
class Symbol2D:
    values: np.ndarray
    grid: PhaseSpaceGrid

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        n = self.grid.n_points
        if vals.shape != (n, n):
            raise ValueError(f"symbol must be {n}x{n}, got {vals.shape}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, grid: PhaseSpaceGrid, fn) -> "Symbol2D":
        X, XI = np.meshgrid(grid.x_nodes, grid.xi_nodes, indexing="ij")
        return cls(np.asarray(fn(X, XI), dtype=complex) * np.ones(X.shape), grid)

    def __add__(self, other: "Symbol2D") -> "Symbol2D":
        return Symbol2D(self.values + other.values, self.grid)

    def __mul__(self, c) -> "Symbol2D":
        return Symbol2D(self.values * c, self.grid)

    __rmul__ = __mul__


@dataclass(frozen=True)
class OperatorMatrix:
    """Kernel samples ``K(x_j, y_l)``; the operator acts as ``f -> h K f``."""

    entries: np.ndarray
    grid: PhaseSpaceGrid
    convention: str = "kernel"

    def __post_init__(self):
        ent = np.asarray(self.entries, dtype=complex)
        n = self.grid.n_points
        if ent.shape != (n, n):
            raise ValueError(f"kernel must be {n}x{n}, got {ent.shape}")
        if not np.all(np.isfinite(ent)):
            raise ValueError("kernel has non-finite entries")
        if self.convention != "kernel":
            raise ValueError(f"unsupported convention {self.convention!r}")
        object.__setattr__(self, "entries", ent)

    @property
    def matrix(self) -> np.ndarray:
        """Matrix of the operator on plain sample vectors (``h * K``)."""
        return self.grid.h * self.entries

    @property
    def l2_kernel_norm(self) -> float:
        return self.grid.h * float(np.linalg.norm(self.entries))


def _difference_labels(n: int) -> np.ndarray:
    # d-index of the centered difference x_j - y_l
    j = np.arange(n)[:, None]
    l = np.arange(n)[None, :]
    return (j - l + n // 2) % n


def kernel_from_symbol(a: Symbol2D, t: float) -> OperatorMatrix:
    t = float(t)
    if not 0 <= t <= 1:
        warnings.warn(f"quantization parameter t={t} outside [0, 1]", stacklevel=2)
    g = a.grid
    n = g.n_points
    h = g.h
    nodes = g.x_nodes  # doubles as the dual (frequency) node set
    # trig coefficients in x: a(z, xi_k) = sum_m c[m, k] exp(i z x*_m)
    c = dft_unitary(a.values, axis=0) / math.sqrt(n)
    u = nodes  # centered differences x - y share the node labels
    e_u = np.exp(1j * np.outer(nodes, u))  # [k, d]
    kc = c @ e_u  # [m, d]
    shear = np.exp(-1j * t * np.outer(nodes, u))  # [m, d]
    e_x = np.exp(1j * np.outer(nodes, nodes))  # [j, m]
    M = e_x @ (kc * shear)  # [j, d]
    K = h / (2 * math.pi) * np.take_along_axis(M, _difference_labels(n), axis=1)
    return OperatorMatrix(K, g)


def apply_operator(T: OperatorMatrix, f: Signal) -> Signal:
    if T.grid.n_points != f.grid.n_points:
        raise ValueError("operator and signal live on different grids")
    return Signal(T.grid.h * (T.entries @ f.values), f.grid)


def exchange(a: Symbol2D, s: float, t: float) -> Symbol2D:
    """Symbol ``b`` with ``Op_t(b) = Op_s(a)``, via a Fourier multiplier in both slots."""
    g = a.grid
    ahat = dft_unitary(dft_unitary(a.values, axis=0), axis=1)
    dual = g.x_nodes
    mult = np.exp(-1j * (float(t) - float(s)) * np.outer(dual, dual))
    b = idft_unitary(idft_unitary(ahat * mult, axis=1), axis=0)
    return Symbol2D(b, g)


def symbol_l2_norm(a: Symbol2D) -> float:
    return a.grid.h * float(np.linalg.norm(a.values))


def reflect_symbol_weight(omega: Weight) -> Weight:
    """``omega(P, -Q, R, -S)``: symbol-side weight matching the ``x - y`` kernel convention."""
    if omega.arity != 4:
        raise ValueError("expected a weight of arity 4")
    return Weight(lambda p, q, r, s: omega.fn(p, -q, r, -s), 4, f"reflect({omega.descriptor})")


def pseudomod_ratio_experiment(symbols: Iterable[Symbol2D], t: float, p: float,
                               omega: Weight | None = None, *, chi2: Window | None = None,
                               cv_threshold: float = 0.05) -> dict:
    """Ratios of kernel to symbol modulation norms, with kernel weight from ``kernel_weight_transform``."""
    symbols: Sequence[Symbol2D] = list(symbols)
    if not symbols:
        raise ConfigurationError("empty symbol corpus")
    omega = omega or constant_weight(4)
    w0 = kernel_weight_transform(omega, t)
    if omega.descriptor == "1":
        w0, w_sym = omega, omega
    else:
        w_sym = reflect_symbol_weight(omega)
    ratios = []
    for a in symbols:
        K = kernel_from_symbol(a, t)
        num = mod_norm_2d(K.entries, chi2, MixedNormSpec(p, p, w0), grid=a.grid)
        den = mod_norm_2d(a.values, chi2, MixedNormSpec(p, p, w_sym), grid=a.grid)
        ratios.append(num / den)
    r = np.array(ratios)
    cv = float(np.std(r) / np.mean(r))
    return {"t": float(t), "p": float(p), "weight": omega.descriptor, "ratios": r.tolist(),
            "cv": cv, "pass": bool(cv < cv_threshold)}
