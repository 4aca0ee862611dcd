"""The four boundedness experiments.

Each one checks the Hessian and weight hypotheses on the grid before
measuring anything, records one row per (phase, N, corpus item, suite) and
leaves the pass decision to :mod:`tfoc.harness.reports`.
"""

from __future__ import annotations

import hashlib
import math
from typing import Sequence

import numpy as np

from ..corpus import CorpusItem, SymbolItem, amplitude_corpus, standard_corpus, symbol_corpus
from ..errors import HypothesisError
from ..fio import Amplitude3D, PhaseFn, fio_matrix, hessian_condition, kernel_map, parse_phase
from ..grid import PhaseSpaceGrid, make_grid
from ..modspace import (
    MixedNormSpec,
    conjugate_exponent,
    exponent_label,
    mod_norm,
    parse_exponent,
    stft_axis_norm,
    stft_mixed_norms,
)
from ..quantize import Symbol2D, apply_operator
from ..schatten import power_iteration_norm, schatten_norms
from ..stft import Window, gaussian_window, tensor_window
from ..weights import (
    check_phase_weight_compat,
    check_kernel_weight_bounds,
    constant_weight,
    kernel_weight_from_phase,
    sample_box,
)
from .config import ExperimentConfig, is_interior

__all__ = [
    "exp_boundedness_M1_Minf",
    "exp_boundedness_Mp",
    "exp_schatten_membership",
    "exp_kernel_continuity",
    "EXPERIMENTS",
]

# amplitude frequency axis integrated by the norm that matches each case
_CASE_AXIS = {1: 2, 2: 0, 3: 1}

_amp_cache: dict = {}


def _ratio(num: float, den: float) -> float:
    if num == 0:
        return 0.0
    return num / den if den else math.inf


def _window(grid: PhaseSpaceGrid, dim: int = 1) -> Window:
    w = gaussian_window(grid)
    return w if dim == 1 else tensor_window(*([w] * dim))


def _phases(cfg: ExperimentConfig) -> list[PhaseFn]:
    return [parse_phase(p) for p in cfg.phases]


def check_hessian(cfg: ExperimentConfig, phi: PhaseFn, grid: PhaseSpaceGrid) -> list[dict]:
    out = []
    for block in cfg.blocks():
        rep = hessian_condition(phi, block, grid, cfg.hessian.d)
        rep["N"] = grid.n_points
        rep["phase"] = phi.descriptor
        if not rep["pass"]:
            raise HypothesisError(
                f"Hessian block {block} of {phi.descriptor} has min |det| {rep['min_abs_det']:.3g}"
                f" < d={cfg.hessian.d:g} on the N={grid.n_points} grid", rep)
        out.append(rep)
    return out


def _require(rep: dict, what: str, phi: PhaseFn, grid: PhaseSpaceGrid) -> dict:
    rep = {"check": what, "phase": phi.descriptor, "N": grid.n_points, **rep}
    if not rep["pass"]:
        raise HypothesisError(f"{what} failed for {phi.descriptor} on N={grid.n_points}", rep)
    return rep


def _amplitude_norm(item: SymbolItem, cfg: ExperimentConfig, which, omega) -> float:
    # computed once on the coarse grid and shared across N
    g0 = make_grid(cfg.amplitude_grid)
    vals = item.sample(g0)
    key = (hashlib.sha1(vals.tobytes()).hexdigest(), which, omega.descriptor, cfg.amplitude_grid)
    if key not in _amp_cache:
        chi = _window(g0, 3)
        if which == "inf,1":
            val = stft_mixed_norms(vals, chi, [MixedNormSpec(math.inf, 1, omega)])[0]
        else:
            val = stft_axis_norm(vals, chi, _CASE_AXIS[which], omega)
        _amp_cache[key] = val
    return _amp_cache[key]


def _corpora(cfg, signals, amplitudes, symbols):
    if signals is None:
        signals = standard_corpus(cfg.corpus_seed)[:: max(1, 45 // cfg.n_signals)][: cfg.n_signals]
    if amplitudes is None:
        amplitudes = amplitude_corpus(cfg.n_amplitudes, cfg.corpus_seed)
    if symbols is None:
        symbols = symbol_corpus(cfg.n_symbols, cfg.corpus_seed)
    return list(signals), list(amplitudes), list(symbols)


def _operator_crosscheck(T, phi, grid, label, tol) -> dict:
    svd = schatten_norms(T, [math.inf]).norm(math.inf)
    pi = power_iteration_norm(T)
    gap = abs(pi - svd) / svd if svd else abs(pi)
    return {"check": "operator_norm_paths", "phase": phi.descriptor, "N": grid.n_points, "item": label,
            "svd": svd, "power_iteration": pi, "rel_gap": gap, "tol": tol, "pass": bool(gap <= tol)}


def exp_boundedness_M1_Minf(cfg: ExperimentConfig, *, signals: Sequence[CorpusItem] | None = None,
                            amplitudes: Sequence[SymbolItem] | None = None) -> dict:
    """Ratios ``||Op f||_{M^inf(w2)} / (||a||_case ||f||_{M^1(w1)})``."""
    signals, amplitudes, _ = _corpora(cfg, signals, amplitudes, [])
    w1, w2, w = cfg.weight("omega1"), cfg.weight("omega2"), cfg.weight("omega_amp")
    case = cfg.hessian.case
    checks, cases = [], []
    for phi in _phases(cfg):
        for n in cfg.N_list:
            grid = make_grid(n)
            checks += check_hessian(cfg, phi, grid)
            rep = check_phase_weight_compat(w1, w2, w, phi, grid, cap=cfg.tolerance("weight_cap"), n_samples=20_000)
            checks.append(_require(rep, "phase_weight_compat", phi, grid))
            chi = _window(grid)
            s_out, s_in = MixedNormSpec(math.inf, math.inf, w2), MixedNormSpec(1, 1, w1)
            for amp in amplitudes:
                T = fio_matrix(Amplitude3D(amp.sample(grid), grid), phi)
                anorm = _amplitude_norm(amp, cfg, case, w)
                for sig in signals:
                    f = sig.sample(grid)
                    num = mod_norm(apply_operator(T, f), chi, s_out)
                    den = anorm * mod_norm(f, chi, s_in)
                    cases.append({"suite": f"case{case}", "phase": phi.descriptor, "N": n,
                                  "item": f"{amp.ident}/{sig.ident}", "numerator": num,
                                  "denominator": den, "ratio": _ratio(num, den)})
    return {"cases": cases, "checks": checks, "annotations": {f"case{case}": "endpoint M1 -> Minf"}}


def exp_boundedness_Mp(cfg: ExperimentConfig, *, signals: Sequence[CorpusItem] | None = None,
                       amplitudes: Sequence[SymbolItem] | None = None) -> dict:
    """Ratios ``||Op f||_{M^p(w2)} / (||a||_{M^{inf,1}} ||f||_{M^p(w1)})`` for each configured ``p``."""
    signals, amplitudes, _ = _corpora(cfg, signals, amplitudes, [])
    ps = [p for p, _ in cfg.exponent_pairs(["1", "4/3", "2", "4", "inf"])]
    w1, w2, w = cfg.weight("omega1"), cfg.weight("omega2"), cfg.weight("omega_amp")
    unweighted = all(x.descriptor == "1" for x in (w1, w2))
    tol = cfg.tolerance("cross_check")
    checks, cases = [], []
    for phi in _phases(cfg):
        for n in cfg.N_list:
            grid = make_grid(n)
            checks += check_hessian(cfg, phi, grid)
            rep = check_phase_weight_compat(w1, w2, w, phi, grid, cap=cfg.tolerance("weight_cap"), n_samples=20_000)
            checks.append(_require(rep, "phase_weight_compat", phi, grid))
            chi = _window(grid)
            for amp in amplitudes:
                T = fio_matrix(Amplitude3D(amp.sample(grid), grid), phi)
                anorm = _amplitude_norm(amp, cfg, "inf,1", w)
                op = _operator_crosscheck(T, phi, grid, amp.ident, tol)
                checks.append(op)
                sup = _ratio(op["svd"], anorm)
                worst = 0.0
                for sig in signals:
                    f = sig.sample(grid)
                    Tf = apply_operator(T, f)
                    for p in ps:
                        num = mod_norm(Tf, chi, MixedNormSpec(p, p, w2))
                        den = anorm * mod_norm(f, chi, MixedNormSpec(p, p, w1))
                        r = _ratio(num, den)
                        if p == 2:
                            worst = max(worst, r)
                        cases.append({"suite": f"p={exponent_label(p)}", "phase": phi.descriptor, "N": n,
                                      "item": f"{amp.ident}/{sig.ident}", "numerator": num,
                                      "denominator": den, "ratio": r})
                if unweighted and 2 in ps:
                    # with w = 1 the M^2 ratio is ||Tf|| / (||a|| ||f||), bounded by the operator norm
                    checks.append({"check": "l2_ratio_below_operator_norm", "phase": phi.descriptor, "N": n,
                                   "item": amp.ident, "max_ratio": worst, "operator_norm_ratio": sup,
                                   "pass": bool(worst <= sup * (1 + tol))})
    notes = {f"p={exponent_label(p)}": "interior exponent" if is_interior(p) else "endpoint exponent"
             for p in ps}
    return {"cases": cases, "checks": checks, "annotations": notes}


def exp_schatten_membership(cfg: ExperimentConfig, *, symbols: Sequence[SymbolItem] | None = None) -> dict:
    """Ratios ``||Op||_{S_p} / ||b||_{M^{p,q}(w)}`` for amplitudes ``a(x, y, zeta) = b(x, zeta)``."""
    _, _, symbols = _corpora(cfg, [], [], symbols)
    pairs = cfg.exponent_pairs([["1", "1"], ["4/3", "4/3"], ["2", "2"], ["4", "4/3"], ["inf", "1"]])
    controls = [(parse_exponent(p), parse_exponent(q)) for p, q in (cfg.controls or [["2", "inf"]])]
    for p, q in pairs:
        if q > min(p, conjugate_exponent(p)) + 1e-12:
            raise HypothesisError(f"exponent pair ({exponent_label(p)}, {exponent_label(q)}) violates"
                                  " q <= min(p, p')", {"p": p, "q": q})
    w = cfg.weight("omega")
    tol = cfg.tolerance("cross_check")
    suites = [(p, q, False) for p, q in pairs] + [(p, q, True) for p, q in controls]
    ps = sorted({p for p, _, _ in suites})
    checks, cases = [], []
    sym_norms: dict = {}
    for phi in _phases(cfg):
        for n in cfg.N_list:
            grid = make_grid(n)
            checks += check_hessian(cfg, phi, grid)
            chi2 = _window(grid, 2)
            for sym in symbols:
                b = sym.sample(grid)
                key = (sym.ident, n)
                if key not in sym_norms:
                    sym_norms[key] = stft_mixed_norms(b, chi2, [MixedNormSpec(p, q, w) for p, q, _ in suites])
                T = fio_matrix(Amplitude3D.from_symbol(Symbol2D(b, grid)), phi)
                rep = schatten_norms(T, ps)
                if math.inf in ps:
                    pi = power_iteration_norm(T)
                    s = rep.norm(math.inf)
                    gap = abs(pi - s) / s if s else abs(pi)
                    checks.append({"check": "operator_norm_paths", "phase": phi.descriptor, "N": n,
                                   "item": sym.ident, "svd": s, "power_iteration": pi, "rel_gap": gap,
                                   "tol": tol, "pass": bool(gap <= tol)})
                for (p, q, control), den in zip(suites, sym_norms[key]):
                    num = rep.norm(p)
                    label = f"p={exponent_label(p)},q={exponent_label(q)}"
                    cases.append({"suite": ("control " if control else "") + label, "phase": phi.descriptor,
                                  "N": n, "item": sym.ident, "numerator": num, "denominator": den,
                                  "ratio": _ratio(num, den), "informational": control})
    return {"cases": cases, "checks": checks, "annotations": {}}


def check_kernel_weight_identity(omega, omega0, phi: PhaseFn, grid: PhaseSpaceGrid, n_samples: int = 2000,
                      tol: float = 1e-10) -> dict:
    """``omega0(x, y, xi, phi_y(x, y, eta)) = omega(x, eta, xi - phi_x, -phi_eta)`` on sampled points."""
    x, y, xi, eta = sample_box(4, n_samples, grid.length / 2, seed=7).T
    px, py, pz = phi.grad(x, y, eta)
    lhs = omega0(x, y, xi, py)
    rhs = omega(x, eta, xi - px, -pz)
    err = float(np.max(np.abs(lhs - rhs) / rhs))
    return {"max_rel_error": err, "tol": tol, "pass": bool(np.isfinite(err) and err <= tol)}


def exp_kernel_continuity(cfg: ExperimentConfig, *, symbols: Sequence[SymbolItem] | None = None,
                          signals: Sequence[CorpusItem] | None = None) -> dict:
    """Kernel-to-symbol norm ratios plus the kernel-operator bound table."""
    signals, _, symbols = _corpora(cfg, signals, [], symbols)
    ps = [p for p, _ in cfg.exponent_pairs(["1", "2", "4"])]
    w, w1, w2 = cfg.weight("omega"), cfg.weight("omega1"), cfg.weight("omega2")
    v1, v2 = cfg.weight("v1"), cfg.weight("v2")
    tol = cfg.tolerance("cross_check")
    checks, cases = [], []
    for phi in _phases(cfg):
        for n in cfg.N_list:
            grid = make_grid(n)
            checks += check_hessian(cfg, phi, grid)
            w0 = w if w.descriptor == "1" else kernel_weight_from_phase(w, phi)
            checks.append(_require(check_kernel_weight_identity(w, w0, phi, grid), "kernel_weight_identity", phi, grid))
            rep = check_kernel_weight_bounds(w0, w, v1, v2, grid, cap=cfg.tolerance("weight_cap"))
            checks.append(_require(rep, "kernel_weight_bounds", phi, grid))
            chi, chi2 = _window(grid), _window(grid, 2)
            nodes = grid.x_nodes
            linear = bool(np.max(np.abs(phi.value(nodes[:, None, None], nodes[None, :, None], nodes[None, None, :])
                                        - (nodes[:, None, None] - nodes[None, :, None]) * nodes)) < 1e-12)
            for sym in symbols:
                a = Symbol2D(sym.sample(grid), grid)
                K = kernel_map(a, phi)
                kn = stft_mixed_norms(K.entries, chi2, [MixedNormSpec(p, p, w0) for p in ps]
                                      + [MixedNormSpec(p, p, constant_weight(4)) for p in ps])
                an = stft_mixed_norms(a.values, chi2, [MixedNormSpec(p, p, w) for p in ps])
                for i, p in enumerate(ps):
                    r = _ratio(kn[i], an[i])
                    cases.append({"suite": f"kernel p={exponent_label(p)}", "phase": phi.descriptor, "N": n,
                                  "item": sym.ident, "numerator": kn[i], "denominator": an[i], "ratio": r})
                    if p == 2 and w.descriptor == "1" and an[i] > 0:
                        hs = schatten_norms(K, [2]).norm(2) / (grid.h * float(np.linalg.norm(a.values)))
                        gap = abs(r - hs) / hs
                        chk = {"check": "hs_bridge", "phase": phi.descriptor, "N": n, "item": sym.ident,
                               "ratio": r, "schatten_path": hs, "rel_gap": gap, "tol": tol}
                        if linear:
                            chk["bridge_constant"] = math.sqrt(2 * math.pi)
                            gap = max(gap, abs(r - math.sqrt(2 * math.pi)) / math.sqrt(2 * math.pi))
                            chk["rel_gap"] = gap
                        chk["pass"] = bool(gap <= tol)
                        checks.append(chk)
                for sig in signals:
                    f = sig.sample(grid)
                    Tf = apply_operator(K, f)
                    for i, p in enumerate(ps):
                        pc = conjugate_exponent(p)
                        num = mod_norm(Tf, chi, MixedNormSpec(p, p, w2))
                        den = kn[len(ps) + i] * mod_norm(f, chi, MixedNormSpec(pc, pc, w1))
                        cases.append({"suite": f"operator p={exponent_label(p)}", "phase": phi.descriptor,
                                      "N": n, "item": f"{sym.ident}/{sig.ident}", "numerator": num,
                                      "denominator": den, "ratio": _ratio(num, den)})
    return {"cases": cases, "checks": checks, "annotations": {}}


EXPERIMENTS = {
    "boundedness_M1_Minf": exp_boundedness_M1_Minf,
    "boundedness_Mp": exp_boundedness_Mp,
    "schatten_membership": exp_schatten_membership,
    "kernel_continuity": exp_kernel_continuity,
}
