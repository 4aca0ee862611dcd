"""Singular values and Schatten norms of kernel operators.

The operator behind a kernel table ``K`` acts on samples as ``h K``; its
singular values are those of ``h K`` so that the order-2 norm equals the
``L^2`` norm of the kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import svd
from scipy.stats import unitary_group

from .errors import ConfigurationError
from .modspace import exponent_label, parse_exponent
from .quantize import OperatorMatrix

__all__ = [
    "SCHATTEN_EXPONENTS",
    "SchattenReport",
    "schatten_norms",
    "schatten_norm",
    "power_iteration_norm",
    "orthonormal_pairing_lower_bound",
    "log_convexity_check",
    "schatten_monotonicity_check",
    "unitary_invariance_check",
]

SCHATTEN_EXPONENTS = (1.0, 4 / 3, 2.0, 4.0, math.inf)


def _as_matrix(T) -> np.ndarray:
    if isinstance(T, OperatorMatrix):
        return T.matrix
    M = np.asarray(T, dtype=complex)
    if M.ndim != 2:
        raise ValueError("expected a matrix")
    return M


def schatten_norm(sigma: np.ndarray, p: float) -> float:
    if math.isinf(p):
        return float(sigma[0]) if len(sigma) else 0.0
    return float(np.sum(sigma**p) ** (1 / p))


@dataclass(frozen=True)
class SchattenReport:
    singular_values: np.ndarray
    norms: dict

    def __post_init__(self):
        s = self.singular_values
        if np.any(s < 0) or np.any(np.diff(s) > 0):
            raise ValueError("singular values must be nonnegative and nonincreasing")

    def norm(self, p) -> float:
        return self.norms[exponent_label(parse_exponent(p))]

    def to_dict(self) -> dict:
        return {"sigma": [float(x) for x in self.singular_values],
                "norms": {k: float(v) for k, v in self.norms.items()}}


def schatten_norms(T, exponents=SCHATTEN_EXPONENTS) -> SchattenReport:
    """Singular values of ``h K`` (or of a plain matrix) and the Schatten norms."""
    M = _as_matrix(T)
    if not np.all(np.isfinite(M)):
        raise ValueError("operator has non-finite entries")
    sigma = svd(M, compute_uv=False)
    sigma = np.clip(sigma, 0, None)
    norms = {exponent_label(p): schatten_norm(sigma, p) for p in exponents}
    return SchattenReport(sigma, norms)


def power_iteration_norm(T, iters: int = 500, tol: float = 1e-14, seed: int = 0) -> float:
    """Largest singular value from power iteration on ``M^* M`` (independent of the SVD path)."""
    M = _as_matrix(T)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(M.shape[1]) + 1j * rng.standard_normal(M.shape[1])
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(iters):
        w = M.conj().T @ (M @ v)
        nrm = np.linalg.norm(w)
        if nrm == 0:
            return 0.0
        v = w / nrm
        new = math.sqrt(nrm)
        if abs(new - est) <= tol * new:
            est = new
            break
        est = new
    return float(np.linalg.norm(M @ v))


def _pairing_sum(M: np.ndarray, F: np.ndarray, G: np.ndarray, p: float) -> float:
    # |(T f_j, g_j)| for orthonormal columns f_j, g_j
    vals = np.abs(np.einsum("ij,ij->j", G.conj(), M @ F))
    return float(np.max(vals)) if math.isinf(p) else float(np.sum(vals**p) ** (1 / p))


def orthonormal_pairing_lower_bound(T, trials: int = 200, p=1, seed: int = 0) -> dict:
    """Sampled lower bound for the order-``p`` norm from its orthonormal-sequence definition.

    The first candidate is the pair of coordinate bases. Each trial then
    draws a Haar-random basis ``F`` and pairs it with the best ``G`` for that
    ``F`` (the unitary polar factor of ``M F``), which is optimal for ``p = 1``.
    """
    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    p = parse_exponent(p)
    M = _as_matrix(T)
    n = M.shape[0]
    eye = np.eye(n)
    best = _pairing_sum(M, eye, eye, p)
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        F = unitary_group.rvs(n, random_state=rng)
        U, _, Vh = svd(M @ F)
        G = U @ Vh
        best = max(best, _pairing_sum(M, F, G, p))
    return {"lower_bound": best, "trials": trials, "p": p}


def log_convexity_check(T, p1, p2, theta: float, p=None, slack: float = 1e-12) -> dict:
    """``||T||_p <= ||T||_{p1}^(1-theta) ||T||_{p2}^theta`` with ``1/p = (1-theta)/p1 + theta/p2``."""
    p1, p2 = parse_exponent(p1), parse_exponent(p2)
    if not 0 <= theta <= 1:
        raise ConfigurationError("theta must lie in [0, 1]")
    inv = (1 - theta) / p1 + theta / p2
    p_implied = math.inf if inv == 0 else 1 / inv
    if p is not None:
        p = parse_exponent(p)
        inv_p = 0.0 if math.isinf(p) else 1 / p
        if abs(inv_p - inv) > 1e-12:
            raise ConfigurationError(f"exponent relation violated: 1/{p} != (1-{theta})/{p1} + {theta}/{p2}")
    p = p_implied
    sigma = schatten_norms(T, ()).singular_values
    lhs = schatten_norm(sigma, p)
    rhs = schatten_norm(sigma, p1) ** (1 - theta) * schatten_norm(sigma, p2) ** theta
    return {"p": p, "lhs": lhs, "rhs": rhs, "slack": rhs - lhs,
            "pass": bool(lhs <= rhs * (1 + slack) + slack)}


def schatten_monotonicity_check(T, slack: float = 1e-12) -> dict:
    rep = schatten_norms(T)
    vals = [rep.norms[exponent_label(p)] for p in SCHATTEN_EXPONENTS]
    ok = all(b <= a * (1 + slack) + slack for a, b in zip(vals, vals[1:]))
    return {"norms": vals, "pass": bool(ok)}


def unitary_invariance_check(T, tol: float = 1e-10) -> dict:
    """Norms before and after composing with the unitary DFT matrix on both sides."""
    M = _as_matrix(T)
    n = M.shape[0]
    F = np.fft.fft(np.eye(n), norm="ortho")
    a = schatten_norms(M).norms
    b = schatten_norms(F @ M @ F.conj().T @ F).norms
    err = max(abs(a[k] - b[k]) / max(a[k], 1e-300) for k in a)
    return {"max_rel_change": err, "pass": bool(err < tol)}
