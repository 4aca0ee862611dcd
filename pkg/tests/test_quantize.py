import math

import numpy as np
import pytest

from tfoc.corpus import symbol_corpus
from tfoc.errors import ConfigurationError
from tfoc.grid import make_grid
from tfoc.quantize import (
    OperatorMatrix,
    Symbol2D,
    apply_operator,
    exchange,
    kernel_from_symbol,
    pseudomod_ratio_experiment,
    symbol_l2_norm,
)
from tfoc.weights import bracket_power

from conftest import gaussian, random_signal


@pytest.fixture(scope="module")
def g64():
    return make_grid(64)


@pytest.fixture(scope="module")
def syms64(g64):
    return [Symbol2D(s.sample(g64), g64) for s in symbol_corpus(10)]


def direct_kernel(a_fn, grid, t):
    # literal oscillatory sum at the sheared point, symbol evaluated analytically
    n, h = grid.n_points, grid.h
    K = np.empty((n, n), dtype=complex)
    for j, x in enumerate(grid.x_nodes):
        for l, y in enumerate(grid.x_nodes):
            u = grid.wrap(x - y)
            z = x - t * u
            K[j, l] = h / (2 * math.pi) * np.sum(a_fn(z, grid.xi_nodes) * np.exp(1j * u * grid.xi_nodes))
    return K


@pytest.mark.parametrize("t", [0, 0.5, 1])
def test_identity_symbol(g64, t):
    K = kernel_from_symbol(Symbol2D.from_function(g64, lambda x, xi: np.ones_like(x)), t)
    assert np.allclose(K.entries, np.eye(64) / g64.h, atol=1e-10)
    f = gaussian(g64, 0.4)
    assert np.max(np.abs(apply_operator(K, f).values - f.values)) < 1e-10


@pytest.mark.parametrize("t", [0, 0.5, 1])
def test_derivative_symbol(g64, t):
    f = gaussian(g64, 0.3, 1.1)
    df = g64.sample(lambda x: -(x - 0.3) / 1.21 * np.exp(-((x - 0.3) ** 2) / 2.42))
    K = kernel_from_symbol(Symbol2D.from_function(g64, lambda x, xi: xi), t)
    out = apply_operator(K, f).values
    assert np.linalg.norm(out + 1j * df.values) / np.linalg.norm(df.values) < 1e-8


@pytest.mark.parametrize("t", [0, 0.3, 1])
def test_multiplication_symbol(g64, t):
    m = lambda x: np.cos(0.8 * x) + 0.5 * np.sin(1.3 * x)
    K = kernel_from_symbol(Symbol2D.from_function(g64, lambda x, xi: m(x) + 0 * xi), t)
    f = gaussian(g64, -0.5)
    assert np.max(np.abs(apply_operator(K, f).values - m(g64.x_nodes) * f.values)) < 1e-9


def test_against_literal_sum():
    g = make_grid(16)
    k2, k3 = g.xi_nodes[10], g.xi_nodes[11]
    # trigonometric polynomial in x, so the interpolation step is exact
    fn = lambda x, xi: (1 + 0.5 * np.cos(k3 * x) + 0.3j * np.sin(k2 * x)) * np.exp(-xi**2 / 4)
    for t in (0.0, 0.25, 1.0):
        K = kernel_from_symbol(Symbol2D.from_function(g, fn), t).entries
        assert np.max(np.abs(K - direct_kernel(fn, g, t))) < 1e-12 * np.max(np.abs(K))


def test_x_independent_symbol_t_invariant(g64):
    a = Symbol2D.from_function(g64, lambda x, xi: np.exp(-xi**2 / 3) + 0 * x)
    K0 = kernel_from_symbol(a, 0).entries
    for t in (0.25, 0.5, 1):
        assert np.max(np.abs(kernel_from_symbol(a, t).entries - K0)) < 1e-10


def test_linearity(syms64):
    a, b = syms64[0], syms64[1]
    lhs = kernel_from_symbol(2 * a + (1j * b), 0.4).entries
    rhs = 2 * kernel_from_symbol(a, 0.4).entries + 1j * kernel_from_symbol(b, 0.4).entries
    assert np.max(np.abs(lhs - rhs)) < 1e-12 * np.max(np.abs(lhs))


def test_apply_operator(rng):
    g = make_grid(16)
    K = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
    f = random_signal(g, rng)
    out = apply_operator(OperatorMatrix(K, g), f).values
    oracle = [g.h * sum(K[j, l] * f.values[l] for l in range(16)) for j in range(16)]
    assert np.allclose(out, oracle, rtol=1e-13, atol=0)
    assert np.all(apply_operator(OperatorMatrix(np.zeros((16, 16)), g), f).values == 0)
    with pytest.raises(ValueError):
        OperatorMatrix(np.full((16, 16), np.nan), g)


def test_exchange_identities(syms64):
    a = syms64[2]
    assert np.max(np.abs(exchange(a, 0.3, 0.3).values - a.values)) < 1e-13
    back = exchange(exchange(a, 0, 0.5), 0.5, 0)
    assert np.max(np.abs(back.values - a.values)) < 1e-12


@pytest.mark.parametrize("s,t", [(0, 1), (0, 0.5), (0.25, 0.75)])
def test_exchange_operator_identity(syms64, s, t):
    for a in syms64:
        Ks = kernel_from_symbol(a, s).entries
        Kt = kernel_from_symbol(exchange(a, s, t), t).entries
        assert np.linalg.norm(Ks - Kt) / np.linalg.norm(Ks) < 1e-8


def test_exchange_plane_wave(g64):
    # a = exp(i(al x + be xi)) has a one-point spectrum, so b = exp(-i(t-s) al be) a
    al, be = g64.xi_nodes[35], g64.xi_nodes[30]
    a = Symbol2D.from_function(g64, lambda x, xi: np.exp(1j * (al * x + be * xi)))
    s, t = 0.0, 0.5
    b = exchange(a, s, t)
    assert np.max(np.abs(b.values - np.exp(-1j * (t - s) * al * be) * a.values)) < 1e-12
    Ka = kernel_from_symbol(a, s).entries
    Kb = kernel_from_symbol(b, t).entries
    assert np.linalg.norm(Ka - Kb) / np.linalg.norm(Ka) < 1e-10


def test_hilbert_schmidt_bridge(syms64):
    for a in syms64:
        for t in (0, 0.5, 0.8):
            K = kernel_from_symbol(a, t)
            assert abs(K.l2_kernel_norm - symbol_l2_norm(a) / math.sqrt(2 * math.pi)) < 1e-10 * symbol_l2_norm(a)


def test_t_outside_unit_interval_warns(syms64):
    with pytest.warns(UserWarning):
        kernel_from_symbol(syms64[0], 1.5)


def test_pseudomod_ratio():
    g = make_grid(32)
    syms = [Symbol2D(s.sample(g), g) for s in symbol_corpus(10)]
    rep = pseudomod_ratio_experiment(syms, 0, 2)
    assert max(abs(r - 1 / math.sqrt(2 * math.pi)) for r in rep["ratios"]) < 1e-8
    scaled = pseudomod_ratio_experiment([2 * syms[0]], 0, 2, bracket_power(1, 4, [1, 2]))
    single = pseudomod_ratio_experiment([syms[0]], 0, 2, bracket_power(1, 4, [1, 2]))
    assert scaled["ratios"][0] == pytest.approx(single["ratios"][0], rel=1e-14)
    rep = pseudomod_ratio_experiment(syms, 0, 2, bracket_power(1, 4, [1, 2]))
    assert rep["cv"] < 0.05 and rep["pass"]
    with pytest.raises(ConfigurationError):
        pseudomod_ratio_experiment([], 0, 2)
