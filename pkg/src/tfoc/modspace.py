"""Weighted mixed STFT norms and the lattice (partition of unity) variant.

Inner integration runs over the translation variable with exponent ``p``,
outer over frequency with exponent ``q``. Infinite exponents are exact maxima.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError
from .grid import PhaseSpaceGrid, Signal, fourier_unitary
from .stft import Window, gaussian_window, stft, stft_nd_chunks, tensor_window
from .weights import Weight, constant_weight

__all__ = [
    "MixedNormSpec",
    "LatticeCover",
    "parse_exponent",
    "conjugate_exponent",
    "mixed_norm",
    "mod_norm",
    "mod_norm_2d",
    "stft_mixed_norms",
    "stft_axis_norm",
    "make_lattice_cover",
    "lattice_norm",
    "window_independence_report",
    "embedding_report",
]


def parse_exponent(p) -> float:
    if isinstance(p, str):
        text = p.strip().lower()
        if text in ("inf", "infinity", "oo"):
            return math.inf
        if "/" in text:
            num, den = text.split("/")
            p = float(num) / float(den)
        else:
            p = float(text)
    p = float(p)
    if not (p >= 1):
        raise ConfigurationError(f"exponent must lie in [1, inf], got {p}")
    return p


def conjugate_exponent(p: float) -> float:
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1)


def exponent_label(p: float) -> str:
    if math.isinf(p):
        return "inf"
    if abs(p - 4 / 3) < 1e-12:
        return "4/3"
    return f"{p:g}"


@dataclass(frozen=True)
class MixedNormSpec:
    p: float
    q: float
    omega: Weight = field(default_factory=constant_weight)

    def __post_init__(self):
        object.__setattr__(self, "p", parse_exponent(self.p))
        object.__setattr__(self, "q", parse_exponent(self.q))

    def label(self) -> str:
        return f"M^({exponent_label(self.p)},{exponent_label(self.q)})[{self.omega.descriptor}]"


def _lp(values: np.ndarray, p: float, weight: float, axis) -> np.ndarray:
    if math.isinf(p):
        return np.max(values, axis=axis)
    return (weight * np.sum(values**p, axis=axis)) ** (1 / p)


def mixed_norm(A: np.ndarray, p: float, q: float, h: float | tuple = 1.0) -> float:
    """``L^q`` over axis 1 of the ``L^p`` norms over axis 0 of a nonnegative table."""
    hx, hxi = (h, h) if np.isscalar(h) else h
    inner = _lp(np.asarray(A, dtype=float), p, hx, axis=0)
    return float(_lp(inner, q, hxi, axis=0))


def mod_norm(f: Signal, chi: Window, spec: MixedNormSpec, measure: str = "quadrature") -> float:
    if spec.omega.arity != 2:
        raise ValueError("signal norms need a weight of arity 2")
    g = f.grid
    V = np.abs(stft(f, chi).values)
    W = spec.omega(g.x_nodes[:, None], g.xi_nodes[None, :])
    h = _measure(g, measure)
    return mixed_norm(V * W, spec.p, spec.q, h)


def _measure(grid: PhaseSpaceGrid, measure: str) -> float:
    if measure == "quadrature":
        return grid.h
    if measure == "counting":
        return 1.0
    raise ConfigurationError(f"unknown measure {measure!r}")


def stft_mixed_norms(values: np.ndarray, chi: Window, specs: Sequence[MixedNormSpec],
                     measure: str = "quadrature") -> list[float]:
    """Mixed norms of the d-dimensional STFT, one streaming pass for all specs.

    Weights take ``2d`` arguments (translations then frequencies).
    """
    values = np.asarray(values, dtype=complex)
    d = values.ndim
    grid = chi.grid
    n = grid.n_points
    cell = _measure(grid, measure) ** d
    for s in specs:
        if s.omega.arity != 2 * d:
            raise ValueError(f"weight {s.omega.descriptor} has arity {s.omega.arity}, need {2 * d}")
    acc = [np.zeros((n,) * d) for _ in specs]
    nodes = grid.x_nodes
    # coordinates of one chunk: (t1..t_{d-1}, k0..k_{d-1}) plus the fixed t0
    rest = [nodes.reshape([n if i == a else 1 for i in range(2 * d - 1)]) for a in range(2 * d - 1)]
    for i0, chunk in stft_nd_chunks(values, chi):
        mag = np.abs(chunk)
        t_axes = tuple(range(d - 1))
        for si, s in enumerate(specs):
            if s.omega.descriptor == "1":
                weighted = mag
            else:
                w = s.omega(nodes[i0], *rest)
                weighted = mag * w
            if math.isinf(s.p):
                part = np.max(weighted, axis=t_axes) if t_axes else weighted
                acc[si] = np.maximum(acc[si], part)
            else:
                part = np.sum(weighted**s.p, axis=t_axes) if t_axes else weighted**s.p
                acc[si] += part
    out = []
    for si, s in enumerate(specs):
        inner = acc[si] if math.isinf(s.p) else (cell * acc[si]) ** (1 / s.p)
        flat = inner.ravel()
        out.append(float(np.max(flat)) if math.isinf(s.q) else float((cell * np.sum(flat**s.q)) ** (1 / s.q)))
    return out


def stft_axis_norm(values: np.ndarray, chi: Window, freq_axis: int, omega: Weight | None = None,
                   measure: str = "quadrature") -> float:
    """``sup`` over every STFT coordinate except one frequency axis, ``L^1`` over that axis."""
    values = np.asarray(values, dtype=complex)
    d = values.ndim
    if not 0 <= freq_axis < d:
        raise ValueError(f"frequency axis {freq_axis} out of range for {d} dimensions")
    omega = omega or constant_weight(2 * d)
    if omega.arity != 2 * d:
        raise ValueError(f"weight {omega.descriptor} has arity {omega.arity}, need {2 * d}")
    grid = chi.grid
    n = grid.n_points
    nodes = grid.x_nodes
    rest = [nodes.reshape([n if i == a else 1 for i in range(2 * d - 1)]) for a in range(2 * d - 1)]
    best = 0.0
    for i0, chunk in stft_nd_chunks(values, chi):
        mag = np.abs(chunk)
        if omega.descriptor != "1":
            mag = mag * omega(nodes[i0], *rest)
        col = _measure(grid, measure) * np.sum(mag, axis=d - 1 + freq_axis)
        best = max(best, float(np.max(col)))
    return best


def mod_norm_2d(a, chi2: Window | None, spec: MixedNormSpec, grid: PhaseSpaceGrid | None = None,
                measure: str = "quadrature") -> float:
    """Mixed norm of the 2-D STFT of a symbol or kernel table (tensor Gaussian window by default)."""
    values = np.asarray(getattr(a, "values", a), dtype=complex)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValueError(f"expected a square 2-D table, got {values.shape}")
    if chi2 is None:
        grid = grid or getattr(a, "grid", None)
        if grid is None:
            raise ValueError("grid needed to build the default window")
        w = gaussian_window(grid)
        chi2 = tensor_window(w, w)
    if spec.omega.arity != 4:
        raise ValueError("2-D tables need a weight of arity 4")
    return stft_mixed_norms(values, chi2, [spec], measure)[0]


@dataclass(frozen=True)
class LatticeCover:
    centers: np.ndarray
    bump: Signal
    radius: float

    def __post_init__(self):
        total = np.zeros(self.bump.grid.n_points, dtype=complex)
        for idx in self.centers:
            total += self.translated(int(idx))
        err = float(np.max(np.abs(total - 1)))
        if err > 1e-12:
            raise ConfigurationError(f"bumps do not form a partition of unity (max error {err:.3g})")

    def translated(self, center_index: int) -> np.ndarray:
        n = self.bump.grid.n_points
        return np.roll(self.bump.values, center_index - n // 2)

    def pieces(self, f: Signal) -> list[np.ndarray]:
        return [f.values * self.translated(int(i)) for i in self.centers]


def make_lattice_cover(grid: PhaseSpaceGrid, step: int = 4) -> LatticeCover:
    """Hat bumps of radius ``step*h`` centred on every ``step``-th node."""
    n = grid.n_points
    if n % step:
        raise ConfigurationError(f"N={n} is not divisible by the lattice step {step}")
    radius = step * grid.h
    hat = np.clip(1 - np.abs(grid.x_nodes) / radius, 0, None)
    centers = np.arange(0, n, step)
    return LatticeCover(centers, Signal(hat, grid), radius)


def lattice_norm(f: Signal, cover: LatticeCover, spec: MixedNormSpec) -> float:
    g = f.grid
    if spec.omega.arity != 2:
        raise ValueError("signal norms need a weight of arity 2")
    xc = g.x_nodes[cover.centers]
    pieces = np.array([fourier_unitary(Signal(v, g)).values for v in cover.pieces(f)])
    W = spec.omega(xc[:, None], g.xi_nodes[None, :])
    A = np.abs(pieces) * W
    F = _lp(A, spec.p, 1.0, axis=0)
    return float(_lp(F, spec.q, g.h, axis=0))


def window_independence_report(corpus: Iterable[Signal], chi1: Window, chi2: Window,
                               spec: MixedNormSpec) -> dict:
    ratios = [mod_norm(f, chi1, spec) / mod_norm(f, chi2, spec) for f in corpus]
    if not ratios:
        raise ConfigurationError("empty corpus")
    return {"min_ratio": float(min(ratios)), "max_ratio": float(max(ratios)),
            "spread": float(max(ratios) / min(ratios)), "ratios": [float(r) for r in ratios]}


def embedding_report(corpus: Iterable[Signal], spec1: MixedNormSpec, spec2: MixedNormSpec,
                     chi: Window | None = None, measure: str = "quadrature") -> dict:
    """``max ||f||_{spec2} / ||f||_{spec1}`` over a corpus (needs ``spec1 <= spec2``)."""
    corpus = list(corpus)
    if not corpus:
        raise ConfigurationError("empty corpus")
    if spec1.p > spec2.p or spec1.q > spec2.q:
        raise ConfigurationError("embedding needs p1 <= p2 and q1 <= q2")
    g = corpus[0].grid
    chi = chi or gaussian_window(g)
    X, XI = np.meshgrid(g.x_nodes, g.xi_nodes, indexing="ij")
    wr = float(np.max(spec2.omega(X, XI) / spec1.omega(X, XI)))
    ratios = [mod_norm(f, chi, spec2, measure) / mod_norm(f, chi, spec1, measure) for f in corpus]
    return {"max_ratio": float(max(ratios)), "weight_ratio": wr, "ratios": [float(r) for r in ratios]}
