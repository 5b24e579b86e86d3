import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergmann2d import media
from bergmann2d.errors import AlphaVanishes, ConfigInvalid, NonIntegrable, SeriesDiverges

X = np.linspace(0.0, 1.0, 7)
Y = np.linspace(-3.0, 3.0, 9)


def gaussian_field(L=1.0, center=0.0, amp=1.0):
    return media.Field(
        func=lambda x, y: amp * np.exp(-((y - center) ** 2) / (2 * L**2)) + 0 * x,
        decay=media.Decay(media.DecayClass.GAUSSIAN, scale=L, center=center),
    )


# ---------------------------------------------------------------- mapping


def test_tm_grating_maps_eps_onto_alpha():
    prof = media.grating(10.58, 0.07, math.pi)
    ab = media.to_alpha_beta(prof, media.ModeKind.TM)
    xx, yy = np.meshgrid(X, Y, indexing="ij")
    assert np.allclose(ab.w_alpha(xx, yy), 10.58 + 0.07 * np.exp(1j * math.pi * yy))
    assert ab.w_beta.is_zero


def test_te_swaps_roles():
    prof = media.gaussian_exp(0.3, 0.1, kappa=1.0, L=2.0)
    ab = media.to_alpha_beta(prof, media.ModeKind.TE)
    assert ab.w_alpha is prof.w_mu and ab.w_beta is prof.w_eps


def test_vacuum_maps_to_zero():
    ab = media.to_alpha_beta(media.slab(0.0, 0.0), media.ModeKind.TE)
    xx, yy = np.meshgrid(X, Y, indexing="ij")
    for f in ab.fields.values():
        assert np.all(f(xx, yy) == 0)


def test_te_nonmagnetic_has_trivial_alpha():
    ab = media.to_alpha_beta(media.gaussian_exp(0.4, 0.0, kappa=1.0, L=5.0), media.ModeKind.TE)
    assert ab.w_alpha.is_zero and ab.v_alpha.is_zero


def test_unit_contrast_gives_half():
    ab = media.to_alpha_beta(media.slab(1.0, 0.0), media.ModeKind.TM)
    xx, yy = np.meshgrid(X, Y, indexing="ij")
    assert np.allclose(ab.v_alpha(xx, yy), 0.5, atol=1e-15)


def test_alpha_floor_violation():
    with pytest.raises(AlphaVanishes):
        media.to_alpha_beta(media.slab(-1.0, 0.0), media.ModeKind.TM)


@settings(max_examples=40, deadline=None)
@given(
    z=st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False).filter(lambda z: abs(1 + z) > 0.05),
    kappa=st.floats(0.0, 3.0),
)
def test_v_alpha_identity(z, kappa):
    ab = media.to_alpha_beta(media.gaussian_exp(z, 0.0, kappa=kappa, L=1.5), media.ModeKind.TM)
    xx, yy = np.meshgrid(X, Y, indexing="ij")
    w = ab.w_alpha(xx, yy)
    assert np.allclose(ab.v_alpha(xx, yy) * (1 + w), w, rtol=1e-14, atol=1e-15)


# ---------------------------------------------------------------- spectra


def test_constant_is_single_line():
    spec = media.fourier_y(media.harmonic_field([(0.0, 0.7)]))
    assert isinstance(spec, media.DiscreteSpectrum)
    assert list(spec.p) == [0.0]
    assert np.allclose(spec.masses(np.array([0.2, 0.9])), 0.7)


def test_harmonic_line_position():
    spec = media.fourier_y(media.harmonic_field([(2.5, 0.07)]))
    assert list(spec.p) == [2.5]
    assert np.allclose(spec.masses(np.array([0.5])), 0.07)


def test_gaussian_transform_against_trapezoid():
    spec = media.fourier_y(gaussian_field(1.0))
    p = np.linspace(-4, 4, 17)
    y = np.linspace(-12, 12, 24001)
    oracle = np.trapezoid(np.exp(-(y**2) / 2)[None, :] * np.exp(-1j * np.outer(p, y)), y, axis=1)
    got = spec(np.array([0.3]), p)[0]
    assert np.max(np.abs(got - oracle)) < 1e-9
    assert np.max(np.abs(got - math.sqrt(2 * math.pi) * np.exp(-(p**2) / 2))) < 1e-12


def test_continuous_path_refused_for_harmonics():
    with pytest.raises(NonIntegrable):
        media.fourier_y(media.harmonic_field([(1.0, 0.2)]), path="continuous")


@settings(max_examples=25, deadline=None)
@given(
    L=st.floats(0.5, 4.0),
    c=st.floats(-2.0, 2.0),
    p=st.lists(st.floats(-3.0, 3.0), min_size=1, max_size=5),
)
def test_real_profiles_have_hermitian_spectra(L, c, p):
    spec = media.fourier_y(gaussian_field(L, c))
    p = np.array(p)
    a = spec(np.array([0.5]), p)[0]
    b = spec(np.array([0.5]), -p)[0]
    assert np.allclose(a, np.conj(b), atol=1e-12 * L)


def test_weak_limit_of_broadened_harmonic():
    K, c = 1.3, 0.4 - 0.2j
    g = lambda p: np.exp(-((p - 1.0) ** 2) / 2)
    target = 2 * math.pi * c * g(K)
    errors = []
    for L in (5.0, 10.0, 20.0):
        f = media.Field(
            func=lambda x, y, L=L: c * np.exp(1j * K * y - y**2 / (2 * L**2)) + 0 * x,
            decay=media.Decay(media.DecayClass.GAUSSIAN, scale=L),
        )
        spec = media.fourier_y(f)
        p = np.linspace(K - 12 / L, K + 12 / L, 801)
        val = np.trapezoid(spec(np.array([0.5]), p)[0] * g(p), p)
        errors.append(abs(val - target))
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 1e-2 * abs(target)


# ---------------------------------------------------------------- moments


def _a(j, z0, z1):
    return z0 / (z0 + 1) if j == 0 else (-1) ** (j + 1) * z1**j / (z0 + 1) ** (j + 1)


def test_grating_v_alpha_coefficients():
    ab = media.to_alpha_beta(media.grating(10.58, 0.07, math.pi), media.ModeKind.TM)
    mt = media.moments(ab)
    v0 = mt.get("v_alpha", 0)
    for j, expected in ((0, 0.91364), (1, 5.221e-4), (2, -3.15e-6)):
        mass = v0.at(j * math.pi)
        assert abs(mass - _a(j, 10.58, 0.07)) < 1e-15
        assert mass.real == pytest.approx(expected, rel=2e-3)
    # one period of v_alpha, projected onto each harmonic
    y = np.linspace(0.0, 2.0, 4001)[:-1]
    w = 10.58 + 0.07 * np.exp(1j * math.pi * y)
    v = w / (1 + w)
    for j in range(4):
        proj = np.mean(v * np.exp(-1j * j * math.pi * y))
        assert abs(proj - v0.at(j * math.pi)) < 1e-14


def test_grating_series_divergence():
    prof = media.grating(1.0, 2.5, math.pi)
    with pytest.raises(SeriesDiverges):
        media.to_alpha_beta(prof, media.ModeKind.TM)


def test_constant_profile_moment_ratio():
    ab = media.to_alpha_beta(media.slab(0.6, 0.0), media.ModeKind.TM)
    mt = media.moments(ab)
    for sym in ("w_alpha", "v_alpha"):
        m0, m1 = mt.get(sym, 0), mt.get(sym, 1)
        assert abs(m1.at(0.0) - 0.5 * m0.at(0.0)) < 1e-15


def test_zero_profile_moments():
    mt = media.moments(media.to_alpha_beta(media.slab(0.0, 0.0), media.ModeKind.TM))
    for m in mt.entries.values():
        assert not len(m.p)


@settings(max_examples=15, deadline=None)
@given(a=st.floats(-2, 2), b=st.floats(-2, 2))
def test_w_beta_moments_are_linear(a, b):
    def ab_of(z1, z2):
        w = media.Field(
            func=lambda x, y: z1 * np.exp(-x - y**2 / 8) + z2 * x * np.exp(-(y**2) / 8),
            decay=media.Decay(media.DecayClass.GAUSSIAN, scale=2.0),
        )
        return media.AlphaBetaProfile(media.zero_field(), w, media.zero_field(), media.ModeKind.TE, 1.0)

    p = np.linspace(-2, 2, 9)
    m = lambda ab, l: media.moments(ab).get("w_beta", l)(p)
    for l in (0, 1):
        lhs = m(ab_of(a, b), l)
        rhs = a * m(ab_of(1, 0), l) + b * m(ab_of(0, 1), l)
        assert np.allclose(lhs, rhs, atol=1e-12)


# ---------------------------------------------------------------- ingestion


def test_load_medium_variants(tmp_path):
    cfg = {"mode": "TM", "ell": 0.1, "profile": {"kind": "grating", "z0": [10.58, 0], "z1": {"re": 0.07}, "K": math.pi}}
    path = tmp_path / "m.json"
    path.write_text(json.dumps(cfg))
    prof, mode = media.load_medium(path)
    assert mode is media.ModeKind.TM and prof.ell == 0.1
    assert prof.w_eps.harmonics is not None


def test_load_medium_rejects_bad_kind():
    with pytest.raises(ConfigInvalid):
        media.load_medium({"mode": "TM", "ell": 1.0, "profile": {"kind": "sphere"}})
    with pytest.raises(ConfigInvalid):
        media.load_medium({"mode": "XX", "ell": 1.0, "profile": {"kind": "slab"}})


def test_grid_medium_matches_closed_form(tmp_path):
    xs = np.linspace(0, 1, 41)
    ys = np.linspace(-6, 6, 241)
    rows = ["x,y,re_eps,im_eps,re_mu,im_mu"]
    for x in xs:
        for y in ys:
            w = 0.3 * math.exp(-x) * math.exp(-(y**2) / 2)
            rows.append(f"{x},{y},{w},0,0,0")
    (tmp_path / "g.csv").write_text("\n".join(rows) + "\n")
    cfg = {"mode": "TE", "ell": 1.0, "profile": {"kind": "grid", "csv": "g.csv"}}
    (tmp_path / "m.json").write_text(json.dumps(cfg))
    prof, mode = media.load_medium(tmp_path / "m.json")
    ab = media.to_alpha_beta(prof, mode)
    got = media.moments(ab).get("w_beta", 0)(np.array([0.0]))[0]
    exact = 0.3 * (1 - math.exp(-1)) * math.sqrt(2 * math.pi)
    assert got == pytest.approx(exact, rel=2e-3)
