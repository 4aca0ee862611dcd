"""Fourier integral operators with amplitude ``a(x, y, zeta)`` and phase ``phi(x, y, zeta)``.

Three evaluation routes: direct quadrature of the oscillatory kernel, the
kernel map for ``y``-independent symbols, and a time-frequency pairing built
from localized pieces of the amplitude.
"""

from __future__ import annotations

import ast
import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigurationError
from .grid import PhaseSpaceGrid, Signal, inner_product
from .quantize import OperatorMatrix, Symbol2D, apply_operator
from .stft import Window, stft

__all__ = [
    "PhaseFn",
    "Amplitude3D",
    "linear_phase",
    "linear_plus_sin",
    "zero_phase",
    "quadratic_phase",
    "parse_phase",
    "adjoint_phase",
    "fio_matrix",
    "kernel_map",
    "taylor_split",
    "bump_cutoff",
    "tf_pairing",
    "direct_pairing",
    "hessian_condition",
    "inner_product_2d",
]


@dataclass(frozen=True)
class PhaseFn:
    value: Callable
    grad: Callable
    hess: Callable
    descriptor: str

    def __call__(self, x, y, z):
        return self.value(x, y, z)

    def shifted(self, c: float) -> "PhaseFn":
        return PhaseFn(lambda x, y, z: self.value(x, y, z) + c, self.grad, self.hess,
                       f"{self.descriptor}+{c:g}")

    def fd_check(self, n_points: int = 100, step: float = 1e-4, seed: int = 0,
                 radius: float = 3.0) -> dict:
        """Compare grad/hess with central differences at random points."""
        rng = np.random.default_rng(seed)
        pts = rng.uniform(-radius, radius, size=(n_points, 3))
        eye = np.eye(3) * step
        grad = np.stack(self.grad(*pts.T), axis=-1)
        hess = self.hess(*pts.T)
        fd_grad = np.empty_like(grad)
        fd_hess = np.empty_like(hess)
        for i in range(3):
            up, dn = pts + eye[i], pts - eye[i]
            fd_grad[:, i] = (self.value(*up.T) - self.value(*dn.T)) / (2 * step)
            fd_hess[:, i, :] = (np.stack(self.grad(*up.T), -1) - np.stack(self.grad(*dn.T), -1)) / (2 * step)
        g_err = float(np.max(np.abs(grad - fd_grad)))
        h_err = float(np.max(np.abs(hess - fd_hess)))
        real = bool(np.all(np.isreal(self.value(*pts.T))))
        return {"grad_error": g_err, "hess_error": h_err, "real": real,
                "pass": bool(g_err < 1e-5 and h_err < 1e-5 and real)}


def _stack_hess(*entries):
    # entries in order xx, xy, xz, yy, yz, zz
    xx, xy, xz, yy, yz, zz = np.broadcast_arrays(*entries)
    return np.stack([np.stack([xx, xy, xz], -1), np.stack([xy, yy, yz], -1),
                     np.stack([xz, yz, zz], -1)], -2)


def linear_plus_sin(epsilon: float = 0.1) -> PhaseFn:
    """``(x - y) zeta + epsilon sin(y) sin(zeta)``."""
    e = float(epsilon)

    def value(x, y, z):
        return (x - y) * z + e * np.sin(y) * np.sin(z)

    def grad(x, y, z):
        x, y, z = np.broadcast_arrays(x, y, z)
        return (z * 1.0, -z + e * np.cos(y) * np.sin(z), x - y + e * np.sin(y) * np.cos(z))

    def hess(x, y, z):
        s = -e * np.sin(y) * np.sin(z)
        zero = np.zeros(np.broadcast(x, y, z).shape)
        return _stack_hess(zero, zero, zero + 1, s, -1 + e * np.cos(y) * np.cos(z), s)

    desc = "linear" if e == 0 else f"linear_plus_sin(epsilon={e:g})"
    return PhaseFn(value, grad, hess, desc)


def linear_phase() -> PhaseFn:
    return linear_plus_sin(0.0)


def zero_phase() -> PhaseFn:
    def zeros(x, y, z):
        return np.zeros(np.broadcast(x, y, z).shape)

    return PhaseFn(zeros, lambda x, y, z: (zeros(x, y, z),) * 3,
                   lambda x, y, z: np.zeros(np.broadcast(x, y, z).shape + (3, 3)), "zero")


def quadratic_phase(H, b=(0.0, 0.0, 0.0), c: float = 0.0) -> PhaseFn:
    """``X.H.X / 2 + b.X + c`` for a symmetric 3x3 ``H``."""
    H = np.asarray(H, dtype=float)
    H = (H + H.T) / 2
    b = np.asarray(b, dtype=float)

    def value(x, y, z):
        X = np.stack(np.broadcast_arrays(x, y, z), -1)
        return 0.5 * np.einsum("...i,ij,...j->...", X, H, X) + X @ b + c

    def grad(x, y, z):
        X = np.stack(np.broadcast_arrays(x, y, z), -1)
        G = X @ H + b
        return G[..., 0], G[..., 1], G[..., 2]

    def hess(x, y, z):
        return np.broadcast_to(H, np.broadcast(x, y, z).shape + (3, 3)).copy()

    return PhaseFn(value, grad, hess, f"quadratic({H.tolist()})")


_PHASES = {
    "linear": lambda **kw: linear_phase(),
    "linear_plus_sin": lambda epsilon=0.1: linear_plus_sin(epsilon),
    "zero": lambda **kw: zero_phase(),
}


def parse_phase(desc) -> PhaseFn:
    """Accepts ``"linear"``, ``"linear_plus_sin(epsilon=0.1)"``, a dict or its JSON text."""
    if isinstance(desc, PhaseFn):
        return desc
    if isinstance(desc, str):
        text = desc.strip()
        if text.startswith("{"):
            try:
                desc = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ConfigurationError(f"bad phase JSON {text!r}") from exc
        else:
            try:
                node = ast.parse(text, mode="eval").body
            except SyntaxError as exc:
                raise ConfigurationError(f"cannot parse phase descriptor {text!r}") from exc
            if isinstance(node, ast.Name):
                desc = {"name": node.id}
            elif isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.args:
                try:
                    desc = {"name": node.func.id,
                            **{k.arg: ast.literal_eval(k.value) for k in node.keywords}}
                except ValueError as exc:
                    raise ConfigurationError(f"non-literal phase parameter in {text!r}") from exc
            else:
                raise ConfigurationError(f"cannot parse phase descriptor {text!r}")
    if not isinstance(desc, dict) or "name" not in desc:
        raise ConfigurationError(f"phase descriptor needs a name: {desc!r}")
    params = {k: v for k, v in desc.items() if k != "name"}
    name = desc["name"]
    if name not in _PHASES:
        raise ConfigurationError(f"unknown phase {name!r}; known: {sorted(_PHASES)}")
    try:
        return _PHASES[name](**params)
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters for phase {name!r}: {exc}") from exc


def adjoint_phase(phi: PhaseFn) -> PhaseFn:
    """``phi~(x, y, zeta) = -phi(x, zeta, y)``."""
    perm = [0, 2, 1]

    def grad(x, y, z):
        gx, gy, gz = phi.grad(x, z, y)
        return -gx, -gz, -gy

    def hess(x, y, z):
        return -phi.hess(x, z, y)[..., perm, :][..., :, perm]

    return PhaseFn(lambda x, y, z: -phi.value(x, z, y), grad, hess, f"adjoint({phi.descriptor})")


@dataclass(frozen=True)
class Amplitude3D:
    values: np.ndarray
    grid: PhaseSpaceGrid

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        n = self.grid.n_points
        if vals.shape != (n, n, n):
            raise ValueError(f"amplitude must be {n}^3, got {vals.shape}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_symbol(cls, a: Symbol2D) -> "Amplitude3D":
        n = a.grid.n_points
        return cls(np.broadcast_to(a.values[:, None, :], (n, n, n)), a.grid)

    @classmethod
    def from_function(cls, grid: PhaseSpaceGrid, fn) -> "Amplitude3D":
        x, y, z = np.meshgrid(grid.x_nodes, grid.x_nodes, grid.xi_nodes, indexing="ij", sparse=True)
        return cls(np.asarray(fn(x, y, z), dtype=complex) * np.ones((grid.n_points,) * 3), grid)


def _phase_table(phi: PhaseFn, grid: PhaseSpaceGrid) -> np.ndarray:
    x, y, z = np.meshgrid(grid.x_nodes, grid.x_nodes, grid.xi_nodes, indexing="ij", sparse=True)
    return np.asarray(phi.value(x, y, z), dtype=float)


def fio_matrix(a: Amplitude3D, phi: PhaseFn) -> OperatorMatrix:
    g = a.grid
    osc = np.exp(1j * _phase_table(phi, g))
    K = g.h / (2 * math.pi) * np.einsum("jlk,jlk->jl", a.values, osc)
    return OperatorMatrix(K, g)


def kernel_map(a: Symbol2D, phi: PhaseFn) -> OperatorMatrix:
    """``K(x, y) = int a(x, zeta) exp(i phi(x, y, zeta)) d zeta`` by the rectangle rule."""
    g = a.grid
    osc = np.exp(1j * _phase_table(phi, g))
    return OperatorMatrix(g.h * np.einsum("jk,jlk->jl", a.values, osc), g)


def inner_product_2d(A: np.ndarray, B: np.ndarray, grid: PhaseSpaceGrid) -> complex:
    return complex(grid.h**2 * np.vdot(B, A))


# 32-point Gauss-Legendre rule mapped to [0, 1]
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)
_GL_NODES = (_GL_NODES + 1) / 2
_GL_WEIGHTS = _GL_WEIGHTS / 2


def bump_cutoff(radius: float) -> Callable[[np.ndarray], np.ndarray]:
    """Smooth bump equal to 1 at the origin and vanishing outside the ball of ``radius``."""
    def psi(X1):
        r2 = np.sum(np.square(X1), axis=-1) / radius**2
        out = np.zeros(r2.shape)
        inside = r2 < 1
        out[inside] = np.exp(1 - 1 / (1 - r2[inside]))
        return out
    return psi


def _hessian_remainder(phi: PhaseFn, X: np.ndarray, X1: np.ndarray) -> np.ndarray:
    # int_0^1 (1-t) <phi''(X + t X1) X1, X1> dt, all quadrature nodes in one batch
    X = np.asarray(X, dtype=float)
    t = _GL_NODES.reshape((-1,) + (1,) * max(X.ndim, X1.ndim))
    P = X + t * X1
    H = phi.hess(P[..., 0], P[..., 1], P[..., 2])
    outer = X1[..., :, None] * X1[..., None, :]
    w = (_GL_WEIGHTS * (1 - _GL_NODES)).reshape(t.shape[:-1] + (1, 1))
    return np.sum(np.sum(w * H, axis=0) * outer, axis=(-2, -1))


def taylor_split(phi: PhaseFn, psi: Callable[[np.ndarray], np.ndarray] | None, X):
    """Evaluators ``(psi1, psi2)`` with ``psi phi(X + X1) = psi psi1(X1) + psi2(X1)``.

    ``psi=None`` means the constant cutoff 1.
    """
    X = np.asarray(X, dtype=float)
    val = float(phi.value(*X))
    grad = np.array([float(c) for c in phi.grad(*X)])

    def psi1(X1):
        return val + np.asarray(X1, dtype=float) @ grad

    def psi2(X1):
        X1 = np.asarray(X1, dtype=float)
        cut = 1.0 if psi is None else psi(X1)
        return cut * _hessian_remainder(phi, X, X1)

    return psi1, psi2


def _default_tf_windows(radius: int, h: float):
    o = np.arange(-radius, radius + 1)
    b = np.exp(1 - 1 / (1 - (o / (radius + 1)) ** 2))
    chi0 = b / (h * b.sum())
    chi3 = np.einsum("i,j,k->ijk", b, b, b)
    chi3 = chi3 / math.sqrt(h**3 * np.sum(chi3**2))
    return chi0, chi3


def tf_pairing(a: Amplitude3D, phi: PhaseFn, f: Signal, g: Signal, *, radius: int = 2,
               chi0: np.ndarray | None = None, chi3: np.ndarray | None = None,
               details: bool = False, chunk: int = 4, remainder: str = "direct"):
    """``(Op_phi(a) f, g)`` evaluated from STFTs of ``f`` and ``g`` and localized amplitude pieces.

    The amplitude is split by the squared 3-D window ``chi3`` around every grid
    point ``X``; on each piece the phase is replaced by its first-order Taylor
    polynomial at ``X`` plus the integral remainder, and the local spectrum
    ``H_X(xi, eta)`` is obtained by FFT. The result is
    ``(h^3 / 2pi) / (N C0) sum_X sum_{xi,eta} H_X(xi,eta) Vf(y,-eta) conj(Vg(x,xi)) e^{-i(x xi + y eta)}``
    where ``C0`` is the overlap constant of the windows.

    ``remainder="quadrature"`` evaluates the Taylor remainder through the
    Hessian integral (32-point Gauss-Legendre); ``"direct"`` takes the same
    quantity as ``phi(X + X1) - psi1(X1)``, about 30 times cheaper.
    """
    grid = a.grid
    n, h = grid.n_points, grid.h
    if f.grid.n_points != n or g.grid.n_points != n:
        raise ValueError("grid mismatch")
    d0, d3 = _default_tf_windows(radius, h)
    chi0 = d0 if chi0 is None else np.asarray(chi0, dtype=float)
    chi3 = d3 if chi3 is None else np.asarray(chi3, dtype=float)
    width = 2 * radius + 1
    if chi0.shape != (width,) or chi3.shape != (width,) * 3:
        raise ConfigurationError(f"windows must have {width} taps per axis")
    if abs(h * np.sum(np.abs(chi0)) - 1) > 1e-12 or abs(h**3 * np.sum(chi3**2) - 1) > 1e-12:
        raise ConfigurationError("window normalization violated: need h*sum|chi0| = 1 and h^3*sum chi3^2 = 1")
    if remainder not in ("direct", "quadrature"):
        raise ConfigurationError(f"unknown remainder mode {remainder!r}")
    if 2 * radius + 1 > n:
        raise ConfigurationError("window wider than the grid")

    offs = np.arange(-radius, radius + 1)
    c0 = float(np.einsum("ijk,i,j->", chi3**2, chi0, chi0))

    # STFTs with chi0 placed on the full grid
    w_full = np.zeros(n)
    w_full[(offs + n // 2) % n] = chi0
    win = Window(w_full, grid)
    Vf = stft(f, win).values
    Vg = stft(g, win).values
    nodes = grid.x_nodes
    neg = (-np.arange(n)) % n  # index of -eta (Nyquist maps to itself)
    Bf = Vf[:, neg] * np.exp(-1j * np.outer(nodes, nodes))  # [y, eta]
    Ag = Vg.conj() * np.exp(-1j * np.outer(nodes, nodes))  # [x, xi]

    Oh = offs * h
    O1, O2, O3 = np.meshgrid(Oh, Oh, Oh, indexing="ij")
    X1 = np.stack([O1, O2, O3], -1)  # [o1, o2, o3, 3]
    chi3sq = chi3**2
    sl = (offs + n // 2) % n
    wrap_o = (np.arange(n)[:, None] + offs[None, :]) % n  # [node, o]
    Y, Z = np.meshgrid(nodes, nodes, indexing="ij")
    total = 0.0 + 0.0j
    for j in range(n):
        x = nodes[j]
        Xs = np.full_like(Y, x)
        val = phi.value(Xs, Y, Z)
        gx, gy, gz = phi.grad(Xs, Y, Z)
        lin = (gx[..., None, None, None] * O1 + gy[..., None, None, None] * O2
               + gz[..., None, None, None] * O3)
        # amplitude at X + o, indexed cyclically: [l, k, o1, o2, o3]
        aj = a.values[wrap_o[j]]  # [o1, l, k]
        ai = aj[:, wrap_o][:, :, :, wrap_o]  # [o1, l, o2, k, o3]
        ai = np.transpose(ai, (1, 3, 0, 2, 4))
        for l0 in range(0, n, chunk):
            ls = slice(l0, min(l0 + chunk, n))
            Xpt = np.stack([Xs[ls], Y[ls], Z[ls]], -1)[:, :, None, None, None, :]
            if remainder == "quadrature":
                rem = _hessian_remainder(phi, Xpt, X1)
            else:
                P = Xpt + X1
                rem = phi.value(P[..., 0], P[..., 1], P[..., 2]) - val[ls, :, None, None, None] - lin[ls]
            phase = val[ls, :, None, None, None] + lin[ls] + rem
            Q = np.sum(ai[ls] * chi3sq * np.exp(1j * phase), axis=-1)  # [l, k, o1, o2]
            # local spectrum sum_o exp(-i(o1 h xi + o2 h eta)) Q via zero-padded FFT
            big = np.zeros(Q.shape[:2] + (n, n), dtype=complex)
            big[:, :, sl[:, None], sl[None, :]] = Q
            Hx = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(big, axes=(2, 3)), axes=(2, 3)),
                                 axes=(2, 3))
            total += np.einsum("lkab,a,lb->", Hx, Ag[j], Bf[ls])
    value = h**3 / (2 * math.pi) / (n * c0) * total
    if details:
        return value, {"overlap_constant": h**3 * c0, "radius": radius}
    return value


def direct_pairing(a: Amplitude3D, phi: PhaseFn, f: Signal, g: Signal) -> complex:
    return inner_product(apply_operator(fio_matrix(a, phi), f), g)


_BLOCKS = {
    "full": "full", "x_zeta": (0, 2), "x_ζ": (0, 2), "y_zeta": (1, 2), "y_ζ": (1, 2),
    "zeta_zeta": (2, 2), "ζ_ζ": (2, 2), "x_y": (0, 1),
}


def hessian_condition(phi: PhaseFn, which: str, grid: PhaseSpaceGrid, d: float | None = None,
                      nodes: np.ndarray | None = None) -> dict:
    """Minimum of the requested |det| over grid nodes (or given ``(M, 3)`` points)."""
    if which not in _BLOCKS:
        raise ConfigurationError(f"unknown Hessian block {which!r}; known: {sorted(_BLOCKS)}")
    if nodes is None:
        x, y, z = np.meshgrid(grid.x_nodes, grid.x_nodes, grid.xi_nodes, indexing="ij", sparse=True)
    else:
        x, y, z = np.asarray(nodes, dtype=float).T
    H = phi.hess(x, y, z)
    block = _BLOCKS[which]
    if block == "full":
        det = H[..., 0, 1] * H[..., 2, 2] - H[..., 0, 2] * H[..., 1, 2]
    else:
        det = H[..., block[0], block[1]]
    m = float(np.min(np.abs(det)))
    rep = {"block": which, "min_abs_det": m}
    if d is not None:
        rep["d"] = float(d)
        rep["pass"] = bool(m >= d)
    return rep
