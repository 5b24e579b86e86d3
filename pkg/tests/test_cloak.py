import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import integrate

from bergmann2d import cloak, media
from bergmann2d.errors import FeasibilityFail, FloorViolation, UMinusZero

Y21 = np.linspace(-15.0, 15.0, 21)


@pytest.fixture(scope="module")
def spec3():
    return cloak.gaussian_exp_design(0.4, 3.0, 5.0, 1.0, 1.0 / 3.0, sigma=-1, y_samples=Y21)


def _closure(Dp, Dm, lm, lp, s, sol):
    """Column integrals of eps - 1 and 1/eps - 1 across slab plus coatings."""
    em, ep = sol["eps_minus"], sol["eps_plus"]
    r1 = s * Dp + lm * (em - 1) + lp * (ep - 1)
    r2 = s * Dm + lm * (1 / em - 1) + lp * (1 / ep - 1)
    return max(abs(r1), abs(r2))


# ---------------------------------------------------------------- residuals


def test_vacuum_residuals_vanish(vacuum_tm):
    assert not np.any(cloak.invisibility_residuals(vacuum_tm, Y21))


def test_nonmagnetic_te_third_residual(gauss_te_nonmagnetic):
    r = cloak.invisibility_residuals(gauss_te_nonmagnetic, [0.0, 3.0])
    assert np.all(r[:, 2] == 0)
    assert abs(r[0, 1]) > 0.1


def test_residual_of_uniform_slab_is_its_excess():
    ab = media.to_alpha_beta(media.slab(0.25, 0.0, ell=2.0), media.ModeKind.TM)
    r = cloak.invisibility_residuals(ab, [0.0])[0]
    assert r[0] == pytest.approx(2.0 * (1 / 1.25 - 1), rel=1e-12)
    assert r[1] == pytest.approx(0.5, rel=1e-12)
    assert r[2] == 0


# ---------------------------------------------------------------- PT symmetry


def test_pt_symmetry_cases():
    assert cloak.pt_symmetric(media.slab(0.5, 0.0))
    g = lambda y: np.exp(-(y**2) / 2)
    w = media.Field(
        func=lambda x, y: 1j * g(y) * np.sign(0.5 - x),
        decay=media.Decay(media.DecayClass.GAUSSIAN, scale=1.0),
    )
    prof = media.MediumProfile(w, media.zero_field(), 1.0)
    assert cloak.pt_symmetric(prof)
    r = cloak.invisibility_residuals(media.to_alpha_beta(prof, media.ModeKind.TE), [0.0, 0.7])
    assert np.max(np.abs(r[:, 1].imag)) < 1e-12
    assert not cloak.pt_symmetric(media.grating(2.0, 0.3 + 0.2j, math.pi))


# ---------------------------------------------------------------- solver


def test_already_invisible_slab_needs_no_coating():
    slab = cloak.SlabSpec(lambda x, y: np.ones(np.broadcast(x, y).shape), 0.5)
    design = cloak.solve_layers(slab, 0.0, 0.0, y_samples=[-1.0, 0.0, 2.0])
    assert np.all(design.diagnostics["bare"])
    assert np.all(design.eps_minus == 1) and np.all(design.eps_plus == 1)


def test_spec3_design(spec3):
    assert spec3.rho == pytest.approx(1 - 0.4 * (1 - math.exp(-1)) / 2, rel=1e-14)
    assert np.max(np.abs(spec3.eps_plus.real - 0.87)) < 0.005
    assert np.max(np.abs(spec3.eps_minus.real - spec3.rho)) < 1e-12
    assert np.all(spec3.eps_plus.imag < 0) and np.all(spec3.eps_minus.imag > 0)
    assert np.all(spec3.report.feasible) and np.all(spec3.report.u0_imaginary)


def test_spec3_column_averages(spec3):
    s = 1.0 / 3.0
    eps = lambda x: 1 + 0.4 * math.exp(-3.0 * x)
    Ep = integrate.quad(eps, 0, s, epsabs=1e-15)[0] / s
    Em = integrate.quad(lambda x: 1 / eps(x), 0, s, epsabs=1e-15)[0] / s
    i0 = np.flatnonzero(Y21 == 0.0)[0]
    assert spec3.diagnostics["E_plus"][i0] == pytest.approx(Ep, rel=1e-13)
    assert spec3.diagnostics["E_minus"][i0] == pytest.approx(Em, rel=1e-13)
    assert Ep == pytest.approx(1.2528, abs=1e-4) and Em == pytest.approx(0.8008, abs=1e-4)
    Dp, Dm = spec3.slab.excess_quadrature(Y21)
    assert np.allclose(Dp, spec3.diagnostics["E_plus"] - 1, atol=1e-14)
    assert np.allclose(Dm, spec3.diagnostics["E_minus"] - 1, atol=1e-14)


def test_spec3_residual_closure(spec3):
    ab = media.to_alpha_beta(spec3.composite(), media.ModeKind.TM)
    assert cloak.is_invisible(ab, Y21)
    ab = media.to_alpha_beta(spec3.composite(), media.ModeKind.TE)
    assert np.max(np.abs(cloak.invisibility_residuals(ab, Y21))) < 1e-8


def test_coating_fades_away_from_centre(spec3):
    far = spec3.solve_at(np.array([60.0]))
    assert spec3.ell_minus(np.array([60.0]))[0] < 1e-30
    assert abs(spec3.ell_S(np.array([60.0]))[0] - 1 / 3) < 1e-15
    assert np.isfinite(far["eps_plus"]).all()


def test_feasibility_bound():
    with pytest.raises(FeasibilityFail):
        cloak.gaussian_exp_design(0.4, 3.0, 5.0, 0.2, 1.0 / 3.0)
    slab = cloak.gaussian_exp_slab(0.4, 3.0, 5.0, 1.0 / 3.0)
    rep = cloak.feasibility(slab, 1e-9, 1e-9, [0.0])
    assert not rep.re_positive[0]
    rep = cloak.feasibility(slab, 1.0 / 3.0, 1.0 / 3.0, [0.0])
    assert rep.re_positive[0] and not rep.real_positive_possible


def test_u_minus_zero_detected():
    with pytest.raises(UMinusZero):
        cloak.solve_pointwise(0.1, 0.2, 0.1, 0.1, 1.0, -1)


def test_floor_violation_detected():
    with pytest.raises(FloorViolation):
        cloak.solve_pointwise(0.2, -0.15, 0.3, 0.3, 1.0, -1, delta_floor=1e3)


def test_one_sided_coating_rejected():
    with pytest.raises(ValueError):
        cloak.solve_pointwise(0.2, -0.15, 0.0, 0.3, 1.0, -1)


@settings(max_examples=60, deadline=None)
@given(
    Dp=st.floats(0.0, 1.0),
    Dm=st.floats(-0.5, 0.0),
    lm=st.floats(0.05, 2.0),
    lp=st.floats(0.05, 2.0),
    im=st.floats(-0.2, 0.2),
)
def test_sign_swap_exchanges_layers(Dp, Dm, lm, lp, im):
    Dp = complex(Dp, im)
    for sigma in (1, -1):
        try:
            a = cloak.solve_pointwise(Dp, Dm, lm, lp, 1.0, sigma)
            b = cloak.solve_pointwise(Dp, Dm, lp, lm, 1.0, -sigma)
        except (UMinusZero, FloorViolation):
            assume(False)
        scale = max(1.0, abs(a["eps_plus"]), abs(a["eps_minus"]))
        assert abs(a["eps_plus"] - b["eps_minus"]) < 1e-10 * scale
        assert abs(a["eps_minus"] - b["eps_plus"]) < 1e-10 * scale
        assert _closure(Dp, Dm, lm, lp, 1.0, a) < 1e-10 * scale
        assert _closure(Dp, Dm, lp, lm, 1.0, b) < 1e-10 * scale


def _lossless_slab(c, b, s):
    return cloak.SlabSpec(
        lambda x, y: 1.0 + c * (1 + np.sin(b * x)) ** 2 * np.exp(-(np.asarray(y) ** 2)),
        s,
        media.Decay(media.DecayClass.GAUSSIAN, scale=1.0),
    )


@settings(max_examples=40, deadline=None)
@given(c=st.floats(0.0, 1.0), b=st.floats(0.0, 10.0), s=st.floats(0.1, 2.0))
def test_lossless_orderings(c, b, s):
    slab = _lossless_slab(c, b, s)
    y = np.linspace(-2, 2, 9)
    Ep, Em = slab.E(y)
    assert np.all(Ep.real >= 1 - 1e-15) and np.all(Em.real <= 1 + 1e-15) and np.all(Em.real > 0)
    assert np.all((Ep + Em).real >= 2 - 1e-14)
    if c > 1e-3:
        assert (Ep + Em)[4].real > 2


@settings(max_examples=40, deadline=None)
@given(c=st.floats(0.01, 1.0), b=st.floats(0.0, 10.0), s=st.floats(0.1, 2.0), l=st.floats(0.01, 3.0))
def test_equal_thickness_gives_imaginary_u0(c, b, s, l):
    slab = _lossless_slab(c, b, s)
    y = np.linspace(-1, 1, 5)
    rep = cloak.feasibility(slab, l, l, y)
    Dp, Dm = slab.excess_integrals(y)
    for i in np.flatnonzero(rep.re_positive):
        sol = cloak.solve_pointwise(Dp[i], Dm[i], l, l, s, -1, check=False)
        assert abs(sol["u0"].real) < 1e-12
        assert abs(sol["eps_plus"].real - sol["eps_minus"].real) < 1e-12 * abs(sol["eps_plus"])
        assert sol["eps_plus"].real > 0
