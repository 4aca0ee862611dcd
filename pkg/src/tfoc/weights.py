"""Moderate weights on phase space and the compatibility checks between them.

A weight is an analytic evaluator plus a descriptor string. Coordinates are
passed positionally, translations first and then frequencies, and broadcast
like numpy ufuncs.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.stats import qmc

from .errors import ConfigurationError
from .grid import PhaseSpaceGrid

__all__ = [
    "Weight",
    "constant_weight",
    "bracket_power",
    "bracket_linear",
    "exp_weight",
    "parse_weight",
    "check_moderate",
    "check_phase_weight_compat",
    "kernel_weight_transform",
    "kernel_weight_from_phase",
    "check_v_scaling",
    "check_kernel_weight_bounds",
    "sample_box",
]

DEFAULT_CAP = 1e6
DEFAULT_SAMPLES = 100_000


@dataclass(frozen=True)
class Weight:
    fn: Callable[..., np.ndarray]
    arity: int
    descriptor: str

    def __call__(self, *coords):
        if len(coords) != self.arity:
            raise ValueError(f"{self.descriptor} expects {self.arity} coordinates, got {len(coords)}")
        # evaluate on the un-broadcast inputs so separable work stays small
        coords = [np.asarray(c, dtype=float) for c in coords]
        shape = np.broadcast_shapes(*(c.shape for c in coords))
        return np.broadcast_to(np.asarray(self.fn(*coords), dtype=float), shape)

    def at(self, points: np.ndarray) -> np.ndarray:
        """Evaluate on an ``(M, arity)`` array of points."""
        points = np.asarray(points, dtype=float)
        return self(*points.T)

    def __mul__(self, other: "Weight") -> "Weight":
        if other.arity != self.arity:
            raise ValueError("arity mismatch")
        return Weight(lambda *z: self.fn(*z) * other.fn(*z), self.arity,
                      f"{self.descriptor}*{other.descriptor}")


def constant_weight(arity: int = 2, value: float = 1.0) -> Weight:
    if value <= 0:
        raise ConfigurationError("weights must be positive")
    desc = "1" if value == 1 else f"constant({value})"
    return Weight(lambda *z: np.full(np.shape(z[0]), float(value)), arity, desc)


def bracket_power(s: float, arity: int = 2, slots: Sequence[int] | None = None) -> Weight:
    """``<z>^s = (1 + |z|^2)^(s/2)``, optionally restricted to some coordinates."""
    s = float(s)
    if slots is None:
        slots = tuple(range(arity))
        desc = f"bracket_power({s:g})"
    else:
        slots = tuple(int(k) for k in slots)
        desc = f"bracket_power({s:g}, slots={list(slots)})"
    if any(k < 0 or k >= arity for k in slots):
        raise ConfigurationError(f"slots {slots} out of range for arity {arity}")

    def fn(*z):
        sq = sum(np.square(z[k]) for k in slots) if slots else 0.0
        return (1.0 + sq) ** (s / 2)

    return Weight(fn, arity, desc)


def bracket_linear(s: float, matrix, descriptor: str | None = None) -> Weight:
    """``<M z>^s`` for a real matrix ``M`` with one column per coordinate."""
    m = np.atleast_2d(np.asarray(matrix, dtype=float))
    arity = m.shape[1]

    def fn(*z):
        sq = 0.0
        for row in m:
            lin = sum(c * zk for c, zk in zip(row, z) if c != 0)
            sq = sq + np.square(lin)
        return (1.0 + sq) ** (s / 2)

    return Weight(fn, arity, descriptor or f"bracket_linear({s:g}, {m.tolist()})")


def exp_weight(c: float = 1.0, arity: int = 2) -> Weight:
    """``exp(c|z|)``: moderate only with respect to exponential weights."""
    def fn(*z):
        return np.exp(c * np.sqrt(sum(np.square(zk) for zk in z)))

    return Weight(fn, arity, f"exp_weight({c:g})")


def _bracket_linear_factory(s, matrix, arity=None):
    w = bracket_linear(s, matrix, f"bracket_linear({s:g}, {np.asarray(matrix).tolist()})")
    if arity is not None and w.arity != arity:
        raise ConfigurationError(f"bracket_linear matrix has {w.arity} columns, expected {arity}")
    return w


_FACTORIES = {
    "bracket_power": bracket_power,
    "bracket_linear": _bracket_linear_factory,
    "exp_weight": exp_weight,
    "constant": lambda value=1.0, arity=2: constant_weight(arity, value),
}


def parse_weight(descriptor: str, arity: int = 2) -> Weight:
    """Build a weight from a descriptor such as ``bracket_power(1, slots=[2, 3])``."""
    text = descriptor.strip()
    if text in ("1", "one", "constant", ""):
        return constant_weight(arity)
    try:
        node = ast.parse(text, mode="eval").body
    except SyntaxError as exc:
        raise ConfigurationError(f"cannot parse weight descriptor {descriptor!r}") from exc
    if isinstance(node, ast.Name):
        name, args, kwargs = node.id, [], {}
    elif isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
        name = node.func.id
        try:
            args = [ast.literal_eval(a) for a in node.args]
            kwargs = {k.arg: ast.literal_eval(k.value) for k in node.keywords}
        except ValueError as exc:
            raise ConfigurationError(f"non-literal argument in {descriptor!r}") from exc
    else:
        raise ConfigurationError(f"cannot parse weight descriptor {descriptor!r}")
    if name not in _FACTORIES:
        raise ConfigurationError(f"unknown weight {name!r}; known: {sorted(_FACTORIES)}")
    kwargs.setdefault("arity", arity)
    try:
        return _FACTORIES[name](*args, **kwargs)
    except TypeError as exc:
        raise ConfigurationError(f"bad arguments in {descriptor!r}: {exc}") from exc


def sample_box(dim: int, n_samples: int, half_width, seed: int = 0) -> np.ndarray:
    """Latin-hypercube sample of ``[-w, w]^dim`` (``w`` scalar or per axis)."""
    pts = qmc.LatinHypercube(d=dim, seed=seed).random(n_samples)
    w = np.broadcast_to(np.asarray(half_width, dtype=float), (dim,))
    return (2 * pts - 1) * w


def _report(max_ratio: float, cap: float, **extra) -> dict:
    ok = bool(np.isfinite(max_ratio) and max_ratio <= cap)
    return {"max_ratio": float(max_ratio), "cap": float(cap), "pass": ok, **extra}


def check_moderate(omega: Weight, v: Weight, grid: PhaseSpaceGrid, *, cap: float = DEFAULT_CAP,
                   n_samples: int = DEFAULT_SAMPLES, seed: int = 0, chunk: int = 256) -> dict:
    """Empirical constant ``max omega(x+y) / (omega(x) v(y))``.

    Arity <= 2 uses every pair of grid nodes; higher arity uses a Latin
    hypercube over the box of side ``L`` in each coordinate of ``x`` and ``y``.
    """
    if omega.arity != v.arity:
        raise ValueError(f"arity mismatch: {omega.arity} vs {v.arity}")
    k = omega.arity
    if k <= 2:
        axes = np.meshgrid(*([grid.x_nodes] * k), indexing="ij")
        pts = np.stack([a.ravel() for a in axes], axis=1)
        w_pts = omega.at(pts)
        v_pts = v.at(pts)
        best = 0.0
        for start in range(0, len(pts), chunk):
            xs = pts[start:start + chunk]
            s = xs[:, None, :] + pts[None, :, :]
            num = omega(*np.moveaxis(s, -1, 0))
            ratio = num / (w_pts[start:start + chunk, None] * v_pts[None, :])
            best = max(best, float(np.max(ratio)))
        return _report(best, cap, n_pairs=len(pts) ** 2, sampling="grid")
    sample = sample_box(2 * k, n_samples, grid.length / 2, seed)
    x, y = sample[:, :k], sample[:, k:]
    ratio = omega.at(x + y) / (omega.at(x) * v.at(y))
    return _report(float(np.max(ratio)), cap, n_pairs=n_samples, sampling="latin_hypercube")


def check_phase_weight_compat(omega1: Weight, omega2: Weight, omega: Weight, phase, grid: PhaseSpaceGrid,
                              *, cap: float = DEFAULT_CAP, n_samples: int = DEFAULT_SAMPLES,
                              seed: int = 0) -> dict:
    """Empirical constant in ``omega2(x,xi)/omega1(y,-eta) <= C omega(X, xi-phi_x, eta-phi_y, -phi_zeta)``."""
    if omega1.arity != 2 or omega2.arity != 2 or omega.arity != 6:
        raise ValueError("expected arities 2, 2 and 6")
    if getattr(phase, "grad", None) is None:
        raise ValueError("phase has no gradient evaluator")
    s = sample_box(5, n_samples, grid.length / 2, seed)
    x, y, z, xi, eta = s.T
    px, py, pz = phase.grad(x, y, z)
    lhs = omega2(x, xi) / omega1(y, -eta)
    rhs = omega(x, y, z, xi - px, eta - py, -pz)
    return _report(float(np.max(lhs / rhs)), cap, n_points=n_samples)


def kernel_weight_transform(omega: Weight, t: float) -> Weight:
    """``w0(x,y,xi,eta) = omega((1-t)x+ty, t xi-(1-t)eta, xi+eta, y-x)``."""
    if omega.arity != 4:
        raise ValueError(f"kernel_weight_transform needs arity 4, got {omega.arity}")
    t = float(t)

    def fn(x, y, xi, eta):
        return omega.fn((1 - t) * x + t * y, t * xi - (1 - t) * eta, xi + eta, y - x)

    return Weight(fn, 4, f"kernel_transform({omega.descriptor}, t={t:g})")


def _solve_phase_y(phase, x, y, target, iters: int = 60):
    # Newton for phi'_y(x, y, eta) = target, started from the linear phase solution
    eta = -np.asarray(target, dtype=float).copy()
    for _ in range(iters):
        _, py, _ = phase.grad(x, y, eta)
        hyz = phase.hess(x, y, eta)[..., 1, 2]
        step = (py - target) / hyz
        eta = eta - step
        if np.max(np.abs(step)) < 1e-13:
            break
    return eta


def kernel_weight_from_phase(omega: Weight, phase) -> Weight:
    """Kernel-side weight defined through ``w0(x,y,xi,phi'_y(x,y,eta)) = omega(x,eta,xi-phi'_x,-phi'_eta)``.

    Requires ``phi''_{y,zeta}`` bounded away from 0 so that the equation for
    ``eta`` has a unique solution.
    """
    if omega.arity != 4:
        raise ValueError("omega must have arity 4")

    def fn(x, y, xi, eta_k):
        eta = _solve_phase_y(phase, x, y, eta_k)
        px, _, pz = phase.grad(x, y, eta)
        return omega.fn(x, eta, xi - px, -pz)

    return Weight(fn, 4, f"phase_kernel({omega.descriptor}, {phase.descriptor})")


def check_v_scaling(v: Weight, grid: PhaseSpaceGrid, ts=(0.0, 0.25, 0.5, 0.75, 1.0), *,
                cap: float = DEFAULT_CAP, n_samples: int = 20_000, seed: int = 0) -> dict:
    """``v`` independent of the translation slots and ``v(t z) <= C v(z)`` on a finite ``t`` sample."""
    if v.arity % 2:
        raise ValueError("v must have even arity")
    k = v.arity // 2
    s = sample_box(3 * k, n_samples, grid.length / 2, seed)
    X1, X2, Z = s[:, :k], s[:, k:2 * k], s[:, 2 * k:]
    v1 = v.at(np.hstack([X1, Z]))
    v2 = v.at(np.hstack([X2, Z]))
    variation = float(np.max(np.abs(v1 - v2) / v1))
    const = 0.0
    for t in ts:
        const = max(const, float(np.max(v.at(np.hstack([t * X1, t * Z])) / v1)))
    ok = variation < 1e-12 and np.isfinite(const) and const <= cap
    return {"x_variation": variation, "t_constant": const, "ts": list(map(float, ts)),
            "cap": float(cap), "pass": bool(ok)}


def check_kernel_weight_bounds(omega0: Weight, omega: Weight, v1: Weight, v2: Weight, grid: PhaseSpaceGrid,
                      v: Weight | None = None, *, cap: float = DEFAULT_CAP,
                      n_samples: int = 20_000, seed: int = 0) -> dict:
    """The three inequalities linking kernel weight, symbol weight and ``v = v1 (x) v2``."""
    w = grid.length / 2
    s = sample_box(5, n_samples, w, seed)
    x, y, xi, eta, zeta = s.T
    c1 = float(np.max(omega0(x, y, xi, eta + zeta) / (omega0(x, y, xi, eta) * v1(zeta))))

    s = sample_box(6, n_samples, w, seed + 1)
    x, eta, xi1, xi2, y1, y2 = s.T
    c2 = float(np.max(omega(x, eta, xi1 + xi2, y1 + y2) / (omega(x, eta, xi1, y1) * v2(xi2, y2))))

    c3 = 0.0
    if v is not None:
        s = sample_box(6, n_samples, w, seed + 2)
        a, b, c, d, e, f = s.T
        split = v1(e) * v2(d, f)
        c3 = float(np.max(np.abs(v(a, b, c, d, e, f) - split) / split))
    ok = all(np.isfinite(c) for c in (c1, c2)) and max(c1, c2) <= cap and c3 < 1e-12
    return {"const_omega0": c1, "const_omega": c2, "v_split_error": c3, "cap": float(cap),
            "pass": bool(ok)}


def peetre_bound(s: float) -> float:
    return 2 ** (abs(s) / 2)

