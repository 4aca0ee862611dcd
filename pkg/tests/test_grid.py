import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tfoc.errors import ConfigurationError
from tfoc.grid import Signal, fourier_inverse, fourier_unitary, inner_product, make_grid

from conftest import gaussian, random_signal


def direct_ft(f):
    g = f.grid
    e = np.exp(-1j * np.outer(g.xi_nodes, g.x_nodes))
    return g.h / math.sqrt(2 * math.pi) * (e @ f.values)


def test_make_grid_spacing():
    g = make_grid(8)
    assert g.h == pytest.approx(math.sqrt(2 * math.pi / 8))
    assert g.h == pytest.approx(0.886227, abs=1e-6)
    g = make_grid(64)
    assert abs(g.spacing_x * g.spacing_xi * 64 - 2 * math.pi) / (2 * math.pi) < 1e-12
    assert np.all(np.diff(g.x_nodes) > 0)
    assert g.x_nodes[0] == pytest.approx(-32 * g.h)


@pytest.mark.parametrize("n", [7, 6, 0, -4, 9])
def test_make_grid_rejects(n):
    with pytest.raises(ConfigurationError):
        make_grid(n)


def test_signal_shape_check():
    with pytest.raises(ValueError):
        Signal(np.zeros(5), make_grid(8))


def test_gaussian_fixed_point():
    g = make_grid(64)
    f = gaussian(g)
    assert np.max(np.abs(fourier_unitary(f).values - f.values)) < 1e-8
    assert np.max(np.abs(direct_ft(f) - f.values)) < 1e-8


def test_fft_matches_direct_sum(grid, rng):
    f = random_signal(grid, rng)
    assert np.allclose(fourier_unitary(f).values, direct_ft(f), atol=1e-11)


def test_zero_and_delta():
    g = make_grid(16)
    assert np.all(fourier_unitary(g.signal(np.zeros(16))).values == 0)
    d = np.zeros(16)
    d[8] = 1.0
    out = fourier_inverse(g.signal(d)).values
    assert np.allclose(out, g.h / math.sqrt(2 * math.pi))


def test_unitarity_and_inversion(rng):
    g = make_grid(64)
    for _ in range(100):
        f = random_signal(g, rng)
        assert abs(fourier_unitary(f).norm - f.norm) / f.norm < 1e-12
        assert np.max(np.abs(fourier_inverse(fourier_unitary(f)).values - f.values)) < 1e-12


def test_parseval_and_linearity(grid, rng):
    f, g2 = random_signal(grid, rng), random_signal(grid, rng)
    lhs = inner_product(fourier_unitary(f), fourier_unitary(g2))
    assert abs(lhs - inner_product(f, g2)) / abs(inner_product(f, g2)) < 1e-12
    a, b = 1.5 - 2j, 0.3j
    lin = fourier_inverse(a * f + b * g2).values
    assert np.allclose(lin, a * fourier_inverse(f).values + b * fourier_inverse(g2).values, atol=1e-12)


def test_f4_identity(grid, rng):
    f = random_signal(grid, rng)
    out = f
    for _ in range(4):
        out = fourier_unitary(out)
    assert np.max(np.abs(out.values - f.values)) < 1e-10
    # F^2 is parity about the centered node
    f2 = fourier_unitary(fourier_unitary(f)).values
    n = grid.n_points
    parity = f.values[(-np.arange(n) + n) % n]
    assert np.allclose(f2, parity, atol=1e-12)


def test_inner_product(rng):
    g = make_grid(32)
    f, k = random_signal(g, rng), random_signal(g, rng)
    ff = inner_product(f, f)
    assert abs(ff.imag) < 1e-14 and ff.real >= 0
    oracle = g.h * sum(a * np.conj(b) for a, b in zip(f.values, k.values))
    assert inner_product(f, k) == pytest.approx(oracle, rel=1e-13)
    with pytest.raises(ValueError):
        inner_product(f, make_grid(16).signal(np.zeros(16)))
    # DFT columns are orthogonal
    e1 = g.signal(np.exp(1j * g.x_nodes * g.xi_nodes[3]))
    e2 = g.signal(np.exp(1j * g.x_nodes * g.xi_nodes[7]))
    assert abs(inner_product(e1, e2)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([8, 16, 32]), st.integers(0, 2**31 - 1))
def test_unitarity_property(n, seed):
    g = make_grid(n)
    f = random_signal(g, np.random.default_rng(seed))
    assert abs(fourier_unitary(f).norm - f.norm) <= 1e-12 * f.norm


def test_wrap_and_node_index():
    g = make_grid(16)
    assert g.node_index(0.0) == 8
    assert g.node_index(g.h * 3) == 11
    assert g.node_index(g.length) == 8
    with pytest.raises(ConfigurationError):
        g.node_index(0.5 * g.h)
    assert g.wrap(g.length / 2) == pytest.approx(-g.length / 2)
