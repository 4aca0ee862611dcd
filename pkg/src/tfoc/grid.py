"""Periodic 1-D phase-space grid and the unitary Fourier transform on it.

The grid is "symplectic": the spatial and frequency spacings are both
``h = sqrt(2*pi/N)``, so ``h * h * N == 2*pi`` and the DFT on the centered
node set reproduces the continuous convention
``(Ff)(xi) = (2*pi)**-0.5 * int f(x) exp(-i x xi) dx`` with rectangle-rule
quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "PhaseSpaceGrid",
    "Signal",
    "make_grid",
    "fourier_unitary",
    "fourier_inverse",
    "inner_product",
    "dft_unitary",
    "idft_unitary",
]


@dataclass(frozen=True)
class PhaseSpaceGrid:
    n_points: int
    spacing_x: float
    spacing_xi: float
    length: float
    x_nodes: np.ndarray = field(repr=False, compare=False)
    xi_nodes: np.ndarray = field(repr=False, compare=False)

    @property
    def h(self) -> float:
        return self.spacing_x

    @property
    def indices(self) -> np.ndarray:
        """Centered integer labels ``-N/2 .. N/2-1`` of the nodes."""
        n = self.n_points
        return np.arange(n) - n // 2

    def signal(self, values) -> "Signal":
        return Signal(np.asarray(values, dtype=complex), self)

    def sample(self, fn: Callable[[np.ndarray], np.ndarray]) -> "Signal":
        return Signal(np.asarray(fn(self.x_nodes), dtype=complex), self)

    def wrap(self, x):
        """Map real coordinates to the centered fundamental cell ``[-L/2, L/2)``."""
        half = self.length / 2
        return np.mod(np.asarray(x) + half, self.length) - half

    def node_index(self, x: float, tol: float = 1e-9) -> int:
        """Array index of the node at coordinate ``x`` (modulo the period)."""
        k = float(x) / self.h
        k_round = round(k)
        if abs(k - k_round) > tol * max(1.0, abs(k)):
            raise ConfigurationError(f"offset {x!r} is not a grid node (h={self.h:.6g})")
        return (k_round + self.n_points // 2) % self.n_points


def make_grid(n: int) -> PhaseSpaceGrid:
    if isinstance(n, bool) or int(n) != n:
        raise ConfigurationError(f"grid size must be an integer, got {n!r}")
    n = int(n)
    if n < 8 or n % 2:
        raise ConfigurationError(f"grid size must be even and >= 8, got {n}")
    h = math.sqrt(2 * math.pi / n)
    nodes = (np.arange(n) - n // 2) * h
    nodes.setflags(write=False)
    return PhaseSpaceGrid(
        n_points=n,
        spacing_x=h,
        spacing_xi=h,
        length=n * h,
        x_nodes=nodes,
        xi_nodes=nodes,
    )


@dataclass(frozen=True)
class Signal:
    values: np.ndarray
    grid: PhaseSpaceGrid

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.n_points,):
            raise ValueError(
                f"signal length {vals.shape} does not match grid size {self.grid.n_points}"
            )
        object.__setattr__(self, "values", vals)

    @property
    def norm(self) -> float:
        return math.sqrt(inner_product(self, self).real)

    def __add__(self, other: "Signal") -> "Signal":
        _same_grid(self, other)
        return Signal(self.values + other.values, self.grid)

    def __mul__(self, c) -> "Signal":
        return Signal(self.values * c, self.grid)

    __rmul__ = __mul__

    def conj(self) -> "Signal":
        return Signal(self.values.conj(), self.grid)


def _same_grid(f: Signal, g: Signal) -> None:
    if f.grid.n_points != g.grid.n_points:
        raise ValueError(
            f"grid mismatch: N={f.grid.n_points} vs N={g.grid.n_points}"
        )


def dft_unitary(values: np.ndarray, axis: int = -1) -> np.ndarray:
    """Centered unitary DFT along ``axis`` (array-level form of :func:`fourier_unitary`)."""
    shifted = np.fft.ifftshift(values, axes=axis)
    out = np.fft.fft(shifted, axis=axis, norm="ortho")
    return np.fft.fftshift(out, axes=axis)


def idft_unitary(values: np.ndarray, axis: int = -1) -> np.ndarray:
    shifted = np.fft.ifftshift(values, axes=axis)
    out = np.fft.ifft(shifted, axis=axis, norm="ortho")
    return np.fft.fftshift(out, axes=axis)


def fourier_unitary(f: Signal) -> Signal:
    # h * (2 pi)^(-1/2) == N^(-1/2) on the symplectic grid
    return Signal(dft_unitary(f.values), f.grid)


def fourier_inverse(f: Signal) -> Signal:
    return Signal(idft_unitary(f.values), f.grid)


def inner_product(f: Signal, g: Signal) -> complex:
    _same_grid(f, g)
    return complex(f.grid.h * np.vdot(g.values, f.values))
