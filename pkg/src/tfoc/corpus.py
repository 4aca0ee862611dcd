"""Seeded test corpora, defined analytically so one corpus can be sampled on several grids."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import PhaseSpaceGrid, Signal

__all__ = ["CorpusItem", "SymbolItem", "standard_corpus", "symbol_corpus", "amplitude_corpus"]


@dataclass(frozen=True)
class CorpusItem:
    ident: str
    fn: Callable[[np.ndarray], np.ndarray]

    def sample(self, grid: PhaseSpaceGrid) -> Signal:
        return Signal(np.asarray(self.fn(grid.x_nodes), dtype=complex), grid)


@dataclass(frozen=True)
class SymbolItem:
    """Function of ``k`` real variables sampled on the ``N^k`` node lattice."""

    ident: str
    fn: Callable[..., np.ndarray]
    ndim: int = 2

    def sample(self, grid: PhaseSpaceGrid) -> np.ndarray:
        axes = np.meshgrid(*([grid.x_nodes] * self.ndim), indexing="ij", sparse=True)
        return np.asarray(self.fn(*axes), dtype=complex) * np.ones((grid.n_points,) * self.ndim)


def _gauss(c, w, m, amp):
    return lambda x: amp * np.exp(-((x - c) ** 2) / (2 * w * w) + 1j * m * x)


def _bandlimited(freqs, coefs, width):
    def fn(x):
        out = np.zeros(np.shape(x), dtype=complex)
        for k, c in zip(freqs, coefs):
            out = out + c * np.exp(1j * k * x)
        return out * np.exp(-(x**2) / (2 * width * width))
    return fn


def _two_bump(d, w, m1, m2):
    return lambda x: (np.exp(-((x - d) ** 2) / (2 * w * w) + 1j * m1 * x)
                      + np.exp(-((x + d) ** 2) / (2 * w * w) + 1j * m2 * x))


def standard_corpus(seed: int = 0) -> list[CorpusItem]:
    """20 Gaussians, 20 smooth random band-limited signals and 5 two-bump signals."""
    rng = np.random.default_rng(seed)
    items = []
    for i in range(20):
        w = rng.uniform(0.7, 1.5)
        c = rng.uniform(-2, 2)
        m = rng.uniform(-2, 2)
        amp = rng.uniform(0.5, 2) * np.exp(2j * np.pi * rng.uniform())
        items.append(CorpusItem(f"gauss{i:02d}", _gauss(c, w, m, amp)))
    for i in range(20):
        k = rng.integers(2, 5)
        freqs = rng.uniform(-2, 2, size=k)
        coefs = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        items.append(CorpusItem(f"band{i:02d}", _bandlimited(freqs, coefs, rng.uniform(1.0, 1.5))))
    for i in range(5):
        items.append(CorpusItem(f"twobump{i}", _two_bump(rng.uniform(1, 2), rng.uniform(0.6, 1.0),
                                                         rng.uniform(-2, 2), rng.uniform(-2, 2))))
    return items


def _symbol(cx, cxi, wx, wxi, mod, amp):
    def fn(x, xi):
        env = np.exp(-((x - cx) ** 2) / (2 * wx * wx) - ((xi - cxi) ** 2) / (2 * wxi * wxi))
        return amp * env * np.exp(1j * mod * x)
    return fn


def symbol_corpus(count: int = 10, seed: int = 0) -> list[SymbolItem]:
    """Smooth Gaussian-windowed symbols ``a(x, xi)``, essentially band-limited in both slots."""
    rng = np.random.default_rng(seed + 101)
    items = []
    for i in range(count):
        items.append(SymbolItem(
            f"sym{i:02d}",
            _symbol(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.8, 1.4),
                    rng.uniform(0.8, 1.4), rng.uniform(-1, 1),
                    rng.uniform(0.5, 2) * np.exp(2j * np.pi * rng.uniform())),
        ))
    return items


def _amplitude(c, w, mod, amp):
    def fn(x, y, z):
        env = np.exp(-((x - c[0]) ** 2 + (y - c[1]) ** 2) / (2 * w[0] ** 2)
                     - (z - c[2]) ** 2 / (2 * w[1] ** 2))
        return amp * env * np.exp(1j * mod * (x - y))
    return fn


def amplitude_corpus(count: int = 5, seed: int = 0) -> list[SymbolItem]:
    """Smooth amplitudes ``a(x, y, zeta)`` for the Fourier integral operator experiments."""
    rng = np.random.default_rng(seed + 202)
    items = []
    for i in range(count):
        items.append(SymbolItem(
            f"amp{i:02d}",
            _amplitude(rng.uniform(-0.8, 0.8, size=3), rng.uniform(1.0, 1.4, size=2),
                       rng.uniform(-0.5, 0.5), rng.uniform(0.5, 2)),
            ndim=3,
        ))
    return items
