import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bergmann2d import dyson, grating, lowfreq, media
from bergmann2d.errors import DiscreteOffGrid

from conftest import ANGLES_37

I2 = np.eye(2, dtype=int)
Z2 = np.zeros((2, 2), dtype=int)


# ---------------------------------------------------------------- constant blocks


def test_multiplication_table_matches_published_table():
    K, KT = dyson.K_MAT, dyson.K_MAT.T
    sp, sm = dyson.SIGMA_PLUS, dyson.SIGMA_MINUS
    expected = {
        "K": [Z2, 2 * sm, sm, 2 * K, Z2],
        "KT": [2 * sp, Z2, sp, Z2, 2 * KT],
        "s3": [sp, sm, I2, K, KT],
        "s+": [Z2, 2 * KT, KT, 2 * sp, Z2],
        "s-": [2 * K, Z2, K, Z2, 2 * sm],
    }
    cols = ["K", "KT", "s3", "s+", "s-"]
    table = dyson.multiplication_table()
    for row, products in expected.items():
        for col, prod in zip(cols, products):
            assert np.array_equal(table[(row, col)], prod), (row, col)


# ---------------------------------------------------------------- kernels on a basis


def test_grid_measure_integrates_cosine():
    g = dyson.angular_grid(2.0, 48)
    # integral of dp over (-k, k) is 2k
    assert g.weights.sum() == pytest.approx(4.0, rel=1e-12)
    assert np.all(np.abs(g.p) < g.k)


def test_probes_must_propagate():
    with pytest.raises(ValueError):
        dyson.angular_grid(1.0, 8, probes=[1.5])


def test_identity_and_associativity():
    g = dyson.angular_grid(1.0, 12)
    rng = np.random.default_rng(3)
    A, B, C = (dyson.OperatorKernel(rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12)), g) for _ in range(3))
    one = dyson.OperatorKernel.identity(g)
    assert np.allclose((one @ A).matrix, A.matrix, rtol=1e-13)
    assert np.allclose((A @ one).matrix, A.matrix, rtol=1e-13)
    assert np.allclose(((A @ B) @ C).matrix, (A @ (B @ C)).matrix, rtol=1e-12)


@settings(max_examples=30, deadline=None)
@given(m=arrays(np.float64, (13, 13), elements=st.floats(-5, 5)))
def test_projection_is_idempotent(m):
    basis = dyson.channel_basis(math.pi, 0.3, grating.PAPER_SPEC.alpha_beta())
    assert basis.size == 13
    A = dyson.OperatorKernel(m.astype(complex), basis)
    once = A.project()
    assert np.array_equal(once.project().matrix, once.matrix)
    assert not np.any(once.matrix[~basis.propagating])


def test_zero_medium_kernels(vacuum_tm):
    basis = dyson.channel_basis(1.0, 0.2, vacuum_tm)
    W, a = dyson.w_kernel(0.5, basis, vacuum_tm)
    assert not np.any(W.matrix) and not np.any(a.matrix)
    for n, j in ((1, 0), (1, 1), (2, 0)):
        cmp = dyson.script_L(n, j, basis, vacuum_tm)
        assert not np.any(cmp.closed.blocks) and not np.any(cmp.quadrature.blocks)
    assert not np.any(dyson.nab(1, 2, 2, basis, vacuum_tm).matrix)


def test_constant_slab_kernel_is_diagonal():
    ab = media.to_alpha_beta(media.slab(0.3, 0.0), media.ModeKind.TE)
    basis = dyson.channel_basis(1.0, 0.2, ab)
    W, a = dyson.w_kernel(0.4, basis, ab)
    assert np.allclose(W.matrix, 0.3 * np.eye(basis.size))
    assert not np.any(a.matrix)


def test_w_kernel_spot_values(gauss_tm):
    k = 1.0
    basis = dyson.angular_grid(k, 6)
    x = 0.37
    W, a = dyson.w_kernel(x, basis, gauss_tm)
    y = np.linspace(-80, 80, 160001)
    w = 0.4 * math.exp(-x) * np.exp(-(y**2) / 50)
    v = w / (1 + w)
    for i, j in ((0, 0), (1, 4), (5, 2)):
        d = basis.p[i] - basis.p[j]
        ft = lambda f: np.trapezoid(f * np.exp(-1j * d * y), y)
        ref_W = (basis.p[i] * basis.p[j] / k**2 * ft(v) + ft(w)) / (2 * math.pi)
        assert abs(W.matrix[i, j] - ref_W) < 1e-8
        assert abs(a.matrix[i, j] - ft(w) / (2 * math.pi)) < 1e-8


def test_dirac_media_rejected_on_quadrature_grid(brewster_grating):
    with pytest.raises(DiscreteOffGrid):
        dyson.w_kernel(0.5, dyson.angular_grid(1.0, 8), brewster_grating.alpha_beta())


# ---------------------------------------------------------------- expansion blocks


@pytest.fixture(scope="module")
def gauss_basis():
    return dyson.angular_grid(1.0, 48, np.sin(ANGLES_37[np.abs(np.cos(ANGLES_37)) > 1e-6]))


@pytest.mark.parametrize("nj", [(1, 0), (1, 1), (2, 0)])
def test_routes_agree(nj, gauss_tm, gauss_basis):
    cmp = dyson.script_L(*nj, gauss_basis, gauss_tm)
    assert cmp.discrepancy < dyson.ORACLE_TOL


def test_block_structure(gauss_tm):
    basis = dyson.angular_grid(1.0, 16)
    L10 = dyson.script_L(1, 0, basis, gauss_tm).closed
    L11 = dyson.script_L(1, 1, basis, gauss_tm).closed
    assert not np.any(L10.blocks[0, 0]) and not np.any(L10.blocks[1, 1])
    assert np.any(L10.blocks[0, 1]) and np.any(L10.blocks[1, 0])
    assert not np.any(L11.blocks[0, 1]) and not np.any(L11.blocks[1, 0])
    assert np.any(L11.blocks[0, 0])


def test_first_order_sign_pattern_without_alpha(gauss_te_nonmagnetic):
    basis = dyson.angular_grid(1.0, 16)
    n11 = dyson.nab(1, 1, 1, basis, gauss_te_nonmagnetic).matrix
    n21 = dyson.nab(1, 2, 1, basis, gauss_te_nonmagnetic).matrix
    assert np.max(np.abs(n11 + n21)) < 1e-14 * np.max(np.abs(n11))


@pytest.mark.parametrize("m", [1, 2])
def test_nab_matches_matrix_elements(m, gauss_tm):
    basis = dyson.angular_grid(1.0, 24)
    for a in (1, 2):
        for b in (1, 2):
            dyson.nab(m, a, b, basis, gauss_tm)


def test_grating_n22_reproduces_first_order_weights(brewster_grating):
    setup = grating.brewster_setup(brewster_grating)
    k = 0.8 * math.pi
    kin = lowfreq.ScatterKinematics(k, setup.theta0)
    ab = brewster_grating.alpha_beta()
    basis = dyson.channel_basis(k, kin.p0, ab)
    N22 = dyson.nab(1, 2, 2, basis, ab).matrix
    i_in = basis.index(kin.p0)
    for j in (0, 1):
        i_out = basis.index(kin.p0 + j * math.pi)
        cabs = math.sqrt(1 - (basis.p[i_out] / k) ** 2)
        weight = -1j * math.sqrt(2 * math.pi) * k * abs(kin.c0) * N22[i_out, i_in] / (k * cabs)
        ref = grating.tau(1, j, -1, k, setup.theta0, brewster_grating)
        assert abs(weight - ref) < 1e-12 * abs(ref)


# ---------------------------------------------------------------- amplitude


def test_series_amplitude_reproduces_grating_channels(brewster_grating):
    ab = brewster_grating.alpha_beta()
    theta0 = math.radians(230.0)
    k = math.pi
    amp = dyson.series_amplitude(theta0, None, k, ab, k * brewster_grating.ell, order=2)
    for j in (0, 1):
        for sign in (1, -1):
            ch = amp.channel(j * math.pi, sign)
            ref = grating.tau_series(j, sign, k, theta0, brewster_grating, 2)
            assert abs(ch.weight - ref) < 1e-9 * max(abs(ref), 1e-3)


def test_vacuum_series_amplitude(vacuum_tm):
    amp = dyson.series_amplitude(0.3, None, 1.0, vacuum_tm, 0.1)
    assert all(ch.weight == 0 for ch in amp.dirac)


def test_doubling_nodes_leaves_amplitude_unchanged(gauss_tm):
    th = ANGLES_37[::4]
    a = dyson.series_amplitude(0.5, th, 1.0, gauss_tm, 0.1, nodes=48).values
    b = dyson.series_amplitude(0.5, th, 1.0, gauss_tm, 0.1, nodes=96).values
    assert np.max(np.abs(a - b)) < 1e-6 * np.max(np.abs(b))
