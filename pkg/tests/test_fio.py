import math

import numpy as np
import pytest

from tfoc.corpus import amplitude_corpus, standard_corpus, symbol_corpus
from tfoc.errors import ConfigurationError
from tfoc.fio import (
    Amplitude3D,
    adjoint_phase,
    bump_cutoff,
    direct_pairing,
    fio_matrix,
    hessian_condition,
    inner_product_2d,
    kernel_map,
    linear_phase,
    linear_plus_sin,
    parse_phase,
    quadratic_phase,
    taylor_split,
    tf_pairing,
    zero_phase,
)
from tfoc.grid import idft_unitary, make_grid
from tfoc.quantize import Symbol2D, _difference_labels, kernel_from_symbol


@pytest.fixture(scope="module")
def g32():
    return make_grid(32)


@pytest.fixture(scope="module")
def syms32(g32):
    return [Symbol2D(s.sample(g32), g32) for s in symbol_corpus(10)]


@pytest.mark.parametrize("phi", [linear_phase(), linear_plus_sin(0.3), zero_phase(),
                                 quadratic_phase([[1, 2, 0], [2, -1, 0.5], [0, 0.5, 3]], (1, 0, -2), 0.4)])
def test_fd_check(phi):
    rep = phi.fd_check()
    assert rep["pass"], rep


def test_adjoint_phase_derivatives():
    rep = adjoint_phase(linear_plus_sin(0.2)).fd_check()
    assert rep["pass"]


def test_parse_phase():
    assert parse_phase("linear").descriptor == "linear"
    phi = parse_phase("linear_plus_sin(epsilon=0.3)")
    assert phi(0.0, 1.0, 2.0) == pytest.approx(-2 + 0.3 * math.sin(1) * math.sin(2))
    assert parse_phase('{"name": "linear_plus_sin", "epsilon": 0.1}').descriptor == "linear_plus_sin(epsilon=0.1)"
    assert parse_phase({"name": "zero"}).descriptor == "zero"
    for bad in ("quartic", "linear_plus_sin(delta=1)", "{oops", "1+"):
        with pytest.raises(ConfigurationError):
            parse_phase(bad)


def test_fio_zero_and_constant_shift(g32):
    a = Amplitude3D(amplitude_corpus(1)[0].sample(g32), g32)
    zero = Amplitude3D(np.zeros((32, 32, 32)), g32)
    phi = linear_plus_sin(0.1)
    assert np.all(fio_matrix(zero, phi).entries == 0)
    K = fio_matrix(a, phi).entries
    Kc = fio_matrix(a, phi.shifted(0.7)).entries
    assert np.max(np.abs(Kc - np.exp(0.7j) * K)) < 1e-14 * np.max(np.abs(K))


def test_fio_linearity(g32):
    items = amplitude_corpus(2)
    a, b = (Amplitude3D(i.sample(g32), g32) for i in items)
    phi = linear_plus_sin(0.3)
    lhs = fio_matrix(Amplitude3D(2 * a.values - 1j * b.values, g32), phi).entries
    rhs = 2 * fio_matrix(a, phi).entries - 1j * fio_matrix(b, phi).entries
    assert np.max(np.abs(lhs - rhs)) < 1e-13


def test_fio_reduces_to_quantization(syms32):
    for a0 in syms32:
        K1 = fio_matrix(Amplitude3D.from_symbol(a0), linear_phase()).entries
        K2 = kernel_from_symbol(a0, 0).entries
        assert np.max(np.abs(K1 - K2)) < 1e-8 * np.max(np.abs(K2))


def test_kernel_map_linear_transform_path(syms32, g32):
    n = g32.n_points
    for a in syms32[:4]:
        K = kernel_map(a, linear_phase()).entries
        inv = math.sqrt(2 * math.pi) * idft_unitary(a.values, axis=1)  # [x, u]
        K2 = np.take_along_axis(inv, _difference_labels(n), axis=1)
        assert np.max(np.abs(K - K2)) < 1e-9 * np.max(np.abs(K))
    assert np.all(kernel_map(Symbol2D(np.zeros((n, n)), g32), linear_phase()).entries == 0)


@pytest.mark.parametrize("eps", [0.0, 0.1, 0.3])
def test_kernel_adjoint_identity(syms32, g32, eps):
    phi = linear_plus_sin(eps)
    phit = adjoint_phase(phi)
    for a in syms32[:5]:
        for b in syms32[5:]:
            lhs = inner_product_2d(kernel_map(a, phi).entries, b.values, g32)
            rhs = inner_product_2d(a.values, kernel_map(b, phit).entries, g32)
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_taylor_split_quadratic_exact():
    phi = quadratic_phase([[0.5, 1, -1], [1, 2, 0.3], [-1, 0.3, -0.7]], (0.2, -1, 0.5), 1.5)
    X = np.array([0.3, -0.4, 1.1])
    psi = bump_cutoff(1.0)
    p1, p2 = taylor_split(phi, psi, X)
    X1 = np.random.default_rng(0).uniform(-0.6, 0.6, size=(500, 3))
    lhs = psi(X1) * phi.value(*(X + X1).T)
    assert np.max(np.abs(lhs - (psi(X1) * p1(X1) + p2(X1)))) < 1e-10


def test_taylor_split_bilinear_and_sin():
    X1 = np.random.default_rng(1).uniform(-0.5, 0.5, size=(400, 3))
    for phi, tol in ((linear_phase(), 1e-12), (linear_plus_sin(0.3), 1e-8)):
        X = np.array([0.7, -1.2, 0.4])
        p1, p2 = taylor_split(phi, None, X)
        err = np.abs(phi.value(*(X + X1).T) - p1(X1) - p2(X1))
        assert np.max(err) < tol


def test_taylor_remainder_shrinks_with_cell():
    phi = linear_plus_sin(0.3)
    X = np.array([0.2, 0.9, -0.6])
    rng = np.random.default_rng(2)
    sizes = []
    for r in (0.4, 0.2):
        psi = bump_cutoff(r)
        _, p2 = taylor_split(phi, psi, X)
        X1 = rng.uniform(-r, r, size=(2000, 3))
        # remainder measured against the linear-part size of the cell
        sizes.append(np.max(np.abs(p2(X1))))
    assert sizes[0] / sizes[1] > 2  # at least first order in the cell size


def test_tf_pairing_agrees(g32):
    a = Amplitude3D(amplitude_corpus(1)[0].sample(g32), g32)
    corpus = standard_corpus(0)
    f, g = corpus[0].sample(g32), corpus[21].sample(g32)
    phi = linear_plus_sin(0.1)
    assert hessian_condition(phi, "y_zeta", g32, d=0.5)["pass"]
    direct = direct_pairing(a, phi, f, g)
    value, info = tf_pairing(a, phi, f, g, details=True)
    assert abs(value - direct) / abs(direct) < 1e-3
    assert info["overlap_constant"] > 0


def test_tf_pairing_quadrature_remainder():
    g = make_grid(16)
    a = Amplitude3D(amplitude_corpus(1, seed=3)[0].sample(g), g)
    corpus = standard_corpus(0)
    f, k = corpus[1].sample(g), corpus[30].sample(g)
    phi = linear_plus_sin(0.3)
    v1 = tf_pairing(a, phi, f, k, remainder="quadrature")
    v2 = tf_pairing(a, phi, f, k)
    assert abs(v1 - v2) < 1e-10 * abs(v2)
    assert abs(v1 - direct_pairing(a, phi, f, k)) < 1e-3 * abs(v1)


def test_tf_pairing_zero_and_validation():
    g = make_grid(16)
    a = Amplitude3D(amplitude_corpus(1)[0].sample(g), g)
    f = standard_corpus(0)[0].sample(g)
    zero = g.signal(np.zeros(16))
    assert tf_pairing(a, linear_phase(), zero, f) == 0
    assert tf_pairing(a, linear_phase(), f, zero) == 0
    assert tf_pairing(Amplitude3D(np.zeros((16,) * 3), g), linear_phase(), f, f) == 0
    with pytest.raises(ConfigurationError):
        tf_pairing(a, linear_phase(), f, f, chi0=np.ones(5))


def test_hessian_condition(g32):
    lin = linear_phase()
    assert hessian_condition(lin, "y_zeta", g32)["min_abs_det"] == 1
    assert hessian_condition(lin, "full", g32, d=0.5)["pass"]
    for block in ("full", "x_zeta", "y_zeta", "zeta_zeta"):
        rep = hessian_condition(zero_phase(), block, g32, d=1e-6)
        assert rep["min_abs_det"] == 0 and not rep["pass"]
    rep = hessian_condition(linear_plus_sin(0.1), "y_zeta", g32)
    assert abs(rep["min_abs_det"] - 0.9) < 1e-6
    # grid-minimization oracle on a dense set of points
    y, z = np.meshgrid(g32.x_nodes, g32.xi_nodes, indexing="ij")
    oracle = np.min(np.abs(-1 + 0.1 * np.cos(y) * np.cos(z)))
    assert rep["min_abs_det"] == pytest.approx(oracle, abs=1e-15)
    with pytest.raises(ConfigurationError):
        hessian_condition(lin, "diagonal", g32)
