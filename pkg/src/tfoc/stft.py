"""Short-time Fourier transform on the periodic grid.

``V_chi f(x_j, xi_k) = F(f * conj(tau_{x_j} chi))(xi_k)`` where ``tau`` is the
cyclic shift. Rows of the returned table are indexed by the translation node,
columns by the frequency node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import ConfigurationError
from .grid import PhaseSpaceGrid, Signal, dft_unitary, idft_unitary

__all__ = [
    "TFArray",
    "Window",
    "gaussian_window",
    "tensor_window",
    "shift_periodic",
    "stft",
    "stft_direct",
    "stft_adjoint",
    "modulate_translate",
    "stft_nd_chunks",
]


@dataclass(frozen=True)
class TFArray:
    values: np.ndarray
    grid: PhaseSpaceGrid

    def __post_init__(self):
        n = self.grid.n_points
        if np.shape(self.values) != (n, n):
            raise ValueError(f"TFArray must be {n}x{n}, got {np.shape(self.values)}")


@dataclass(frozen=True)
class Window:
    """A nonzero window on the d-dimensional periodic grid (d = values.ndim)."""

    values: np.ndarray
    grid: PhaseSpaceGrid
    l2_norm: float = float("nan")

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        n = self.grid.n_points
        if any(s != n for s in vals.shape):
            raise ValueError(f"window shape {vals.shape} does not match grid size {n}")
        norm = math.sqrt(self.grid.h ** vals.ndim * float(np.sum(np.abs(vals) ** 2)))
        if not norm > 0:
            raise ConfigurationError("window must be nonzero")
        if not math.isnan(self.l2_norm) and abs(self.l2_norm - norm) > 1e-12 * norm:
            raise ValueError(f"recorded l2_norm {self.l2_norm} != computed {norm}")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "l2_norm", norm)

    @classmethod
    def from_signal(cls, s: Signal) -> "Window":
        return cls(s.values, s.grid)

    @property
    def ndim(self) -> int:
        return self.values.ndim

    @property
    def signal(self) -> Signal:
        if self.ndim != 1:
            raise ValueError("only 1-D windows have a signal view")
        return Signal(self.values, self.grid)


def gaussian_window(grid: PhaseSpaceGrid, width: float = 1.0, center: float = 0.0,
                    normalize: bool = True) -> Window:
    """Periodized Gaussian ``sum_n exp(-(x - c + nL)^2 / (2 width^2))``."""
    x = grid.x_nodes - center
    n_images = int(np.ceil(12 * width / grid.length)) + 1
    vals = np.zeros_like(x)
    for k in range(-n_images, n_images + 1):
        vals += np.exp(-((x + k * grid.length) ** 2) / (2 * width**2))
    if normalize:
        vals /= math.sqrt(grid.h * np.sum(vals**2))
    return Window(vals, grid)


def tensor_window(*windows: Window) -> Window:
    grid = windows[0].grid
    vals = windows[0].values
    for w in windows[1:]:
        vals = np.multiply.outer(vals, w.values)
    return Window(vals, grid)


def _label(grid: PhaseSpaceGrid, index) -> np.ndarray:
    return np.asarray(index) - grid.n_points // 2


def shift_periodic(chi: Signal, j: int) -> Signal:
    """``tau_{x_j} chi`` for the node with array index ``j`` (cyclic)."""
    return Signal(np.roll(chi.values, int(_label(chi.grid, j))), chi.grid)


def _shift_table(grid: PhaseSpaceGrid) -> np.ndarray:
    # idx[j, m] = array index of chi evaluated at y_m - x_j
    n = grid.n_points
    j = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    return (m - _label(grid, j)) % n


def _check(f: Signal, chi: Window) -> None:
    if chi.ndim != 1:
        raise ValueError("expected a 1-D window")
    if f.grid.n_points != chi.grid.n_points:
        raise ValueError("signal and window live on different grids")


def stft(f: Signal, chi: Window) -> TFArray:
    _check(f, chi)
    shifted = chi.values.conj()[_shift_table(f.grid)]
    return TFArray(dft_unitary(f.values[None, :] * shifted, axis=1), f.grid)


def stft_direct(f: Signal, chi: Window) -> TFArray:
    """Brute-force double sum, no FFT. O(N^3); kept as a regression oracle."""
    _check(f, chi)
    g = f.grid
    n = g.n_points
    h = g.h
    x = g.x_nodes
    out = np.empty((n, n), dtype=complex)
    phase = np.exp(-1j * np.outer(g.xi_nodes, x))  # [k, m]
    for j in range(n):
        prod = np.array([f.values[m] * np.conj(chi.values[(m - (j - n // 2)) % n]) for m in range(n)])
        out[j] = h / math.sqrt(2 * math.pi) * (phase @ prod)
    return TFArray(out, g)


def stft_adjoint(F: TFArray, chi: Window) -> Signal:
    """Synthesis ``h * sum_j tau_{x_j} chi * F^{-1}(F[j, :])``.

    ``stft_adjoint(stft(f, chi), chi) == ||chi||^2 f``.
    """
    if chi.ndim != 1 or F.grid.n_points != chi.grid.n_points:
        raise ValueError("window does not match the TF array")
    rows = idft_unitary(F.values, axis=1)
    shifted = chi.values[_shift_table(F.grid)]
    return Signal(F.grid.h * np.sum(rows * shifted, axis=0), F.grid)


def modulate_translate(f: Signal, x0: float, xi0: float) -> Signal:
    """``exp(i y xi0) f(y - x0)`` for node offsets ``x0``, ``xi0``."""
    g = f.grid
    shift = g.node_index(x0) - g.n_points // 2
    g.node_index(xi0)  # validates that xi0 is a node
    moved = np.roll(f.values, shift)
    return Signal(np.exp(1j * g.x_nodes * xi0) * moved, g)


def stft_nd_chunks(values: np.ndarray, chi: Window) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(i0, V[i0, ...])`` slices of the d-dimensional STFT.

    ``V`` has shape ``(N,)*d + (N,)*d``: translation axes first, then
    frequency axes. Each slice fixes the first translation index, which keeps
    memory at ``N**(2d-1)`` entries.
    """
    values = np.asarray(values, dtype=complex)
    d = values.ndim
    if chi.ndim != d or values.shape != chi.values.shape:
        raise ValueError(f"window shape {chi.values.shape} does not match data {values.shape}")
    grid = chi.grid
    n = grid.n_points
    idx = _shift_table(grid)
    base = chi.values.conj()
    freq_axes = tuple(range(d - 1, 2 * d - 1))
    for i0 in range(n):
        w = np.take(base, idx[i0], axis=0)
        for a in range(1, d):
            # spatial axis a sits at position (a - 1) + a after earlier expansions
            w = np.take(w, idx, axis=2 * a - 1)
        # order is now (s0, t1, s1, t2, s2, ...); move translations to the front
        t_axes = [2 * a - 1 for a in range(1, d)]
        w = np.moveaxis(w, t_axes, list(range(d - 1)))
        prod = w * values
        out = np.fft.ifftshift(prod, axes=freq_axes)
        out = np.fft.fftn(out, axes=freq_axes, norm="ortho")
        yield i0, np.fft.fftshift(out, axes=freq_axes)
