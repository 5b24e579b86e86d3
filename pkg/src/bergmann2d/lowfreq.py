"""Closed-form low-frequency amplitude coefficients f1 and f2.

Smooth (continuous-spectrum) media give amplitudes sampled on a theta grid.
Single-harmonic gratings and slabs give Dirac channels, reported per angle
with the incident delta already netted out.
"""

from __future__ import annotations

import dataclasses
import functools
import math

import numpy as np

from . import _quadrature as quad
from . import media
from .errors import GrazingAngle, QuadratureNotConverged, TruncationWarning

ANGLE_FLOOR = 1e-6
F2_TOL = 1e-8
PHI_NODES = 64
Q_ORDER = 12

_SQRT2PI = math.sqrt(2.0 * math.pi)


@dataclasses.dataclass(frozen=True, eq=False)
class ScatterKinematics:
    """Wavenumber, incidence angle and scattering angles (radians)."""

    k: float
    theta0: float
    theta: np.ndarray = dataclasses.field(default_factory=lambda: np.zeros(0))
    angle_floor: float = ANGLE_FLOOR

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError("wavenumber k must be positive")
        object.__setattr__(self, "theta", np.atleast_1d(np.asarray(self.theta, dtype=float)))
        if abs(math.cos(self.theta0)) < self.angle_floor:
            raise GrazingAngle(f"incidence angle {math.degrees(self.theta0):.6g} deg is grazing")
        if self.theta.size and np.min(np.abs(np.cos(self.theta))) < self.angle_floor:
            raise GrazingAngle("theta grid contains a grazing angle")

    c0 = property(lambda self: math.cos(self.theta0))
    s0 = property(lambda self: math.sin(self.theta0))
    c = property(lambda self: np.cos(self.theta))
    s = property(lambda self: np.sin(self.theta))
    p0 = property(lambda self: self.k * math.sin(self.theta0))
    p1 = property(lambda self: self.k * np.sin(self.theta))


@dataclasses.dataclass(frozen=True)
class DiracChannel:
    """A delta contribution ``weight * delta(theta - angle)``.

    ``shift`` is the lateral momentum transfer ``k (sin theta - sin theta0)``
    and ``side`` is ``+1`` for cos(theta) > 0, ``-1`` otherwise.
    """

    theta: float
    weight: complex
    shift: float
    side: int

    @property
    def theta_deg(self):
        return math.degrees(self.theta)


@dataclasses.dataclass(frozen=True, eq=False)
class Amplitude:
    """Truncated low-frequency amplitude.

    ``values[i]`` is the smooth amplitude at ``theta[i]``; ``dirac`` lists
    the delta channels.  ``coefficients`` keeps the per-order terms.
    """

    theta: np.ndarray
    values: np.ndarray
    dirac: tuple = ()
    coefficients: tuple = ()

    @property
    def smooth(self):
        return list(zip(self.theta.tolist(), self.values.tolist()))

    @property
    def cross_section(self):
        return np.abs(self.values) ** 2

    def channel(self, shift, side, tol=1e-9):
        for ch in self.dirac:
            if ch.side == side and abs(ch.shift - shift) <= tol * (1 + abs(shift)):
                return ch
        return None


# ---------------------------------------------------------------- caches


@functools.lru_cache(maxsize=64)
def spectrum(field):
    """Cached :func:`media.fourier_y` (fields hash by identity)."""
    return media.fourier_y(field)


@functools.lru_cache(maxsize=32)
def moment_table(ab):
    """Cached :func:`media.moments`."""
    return media.moments(ab)


def _eval(m, p):
    return m(p) if not isinstance(m, media.DiracComb) or len(m.p) else np.zeros(np.shape(p), complex)


def _diff(m, p, q):
    if isinstance(m, media.DiracComb):
        if len(m.p):
            raise TypeError("a Dirac spectrum cannot be sampled pointwise")
        return np.zeros((np.size(p), np.size(q)), dtype=complex)
    return m.difference_matrix(p, q)


def _is_empty(m):
    return isinstance(m, (media.DiracComb, media.DiscreteSpectrum)) and not len(m.p)


def _merge_shifts(values, tol=1e-9):
    out = []
    for v in sorted(values):
        if not out or abs(v - out[-1]) > tol * (1 + abs(v)):
            out.append(v)
    return out


# ---------------------------------------------------------------- kernels


def kernel_W(l, p, pp, mt, k):
    """``W_l(p, p') = p p' vbar_l(p - p') / k^2 + wbar_beta_l(p - p')``.

    For Dirac spectra ``pp`` must be a scalar; the result is a
    :class:`media.DiracComb` over the shift ``p - p'`` whose masses are
    evaluated at ``p = p' + shift``.
    """
    v = mt.get("v_alpha", l)
    b = mt.get("w_beta", l)
    if mt.discrete:
        pp = float(pp)
        shifts = np.array(_merge_shifts([*v.p, *b.p]))
        mass = (pp + shifts) * pp * v.at(shifts) / k**2 + b.at(shifts)
        return media.DiracComb(shifts, mass)
    p = np.asarray(p, dtype=float)
    pp = np.asarray(pp, dtype=float)
    d = p - pp
    return p * pp * _eval(v, d) / k**2 + _eval(b, d)


def _q_grid(lo, hi, spectra):
    live = [s for s in spectra if not _is_empty(s)]
    Q = max(s.q_max for s in live)
    scale = min(s.field.decay.scale for s in live)
    breaks = quad.panel_breaks(lo - Q, hi + Q, 1.0 / scale)
    return quad.composite_gauss_legendre(breaks, Q_ORDER)


def _tail_check(D, name):
    peak = np.max(np.abs(D))
    if peak == 0:
        return
    edge = max(np.max(np.abs(D[..., 0])), np.max(np.abs(D[..., -1])))
    if edge > media.SPECTRAL_TOL * peak:
        import warnings

        warnings.warn(f"{name}: q-integrand tail {edge / peak:.2e} of peak", TruncationWarning, stacklevel=4)


def _triangle_continuous(f2_spec, g1_spec, p, pp, q, wq, qfac):
    """``sum_q wq qfac(q) T[f2~(., p - q), g1~(., q - p')]`` on the ordered square."""
    x, wx = quad.unit_gl(media.X_NODES)
    S = quad.cumulative_matrix(media.X_NODES)
    F = f2_spec.difference_matrix(x, p, q)
    G = g1_spec.difference_matrix(x, q, pp)
    _tail_check(F, "second-order kernel")
    C = np.tensordot(S, G, axes=(1, 0))
    Fw = F * (wq * qfac)[None, None, :] * wx[:, None, None]
    return np.matmul(Fw, C).sum(axis=0)


def _triangle_masses(fa, gb):
    x, wx = quad.unit_gl(media.X_NODES)
    S = quad.cumulative_matrix(media.X_NODES)
    return (wx * fa(x)) @ (S @ gb(x))


def _discrete_second_order(spec, pp, k):
    v, wa, wb = spec["v_alpha"], spec["w_alpha"], spec["w_beta"]
    out = {}

    def collect(left, right, factor):
        acc = {}
        for pa, fa in zip(left.p, left.coeffs):
            for pb, gb in zip(right.p, right.coeffs):
                key = pa + pb
                acc.setdefault(key, 0.0)
                acc[key] += factor(key, pb) * _triangle_masses(fa, gb)
        keys = _merge_shifts(acc)
        mass = [sum(val for kk, val in acc.items() if abs(kk - q) <= 1e-9 * (1 + abs(q))) for q in keys]
        return media.DiracComb(np.array(keys), np.array(mass, dtype=complex))

    out["X1"] = collect(v, wa, lambda Q, b: (pp + Q) * (pp + b) / k**2)
    out["X2"] = collect(wb, wa, lambda Q, b: 1.0)
    out["Y1"] = collect(wa, v, lambda Q, b: pp * (pp + b) / k**2)
    out["Y2"] = collect(wa, wb, lambda Q, b: 1.0)
    return out


def second_order_kernels(p, pp, ab, k):
    """The nested kernels X1(p, p'), X2(p - p'), Y1(p, p'), Y2(p - p').

    Continuous spectra: ``p`` and ``pp`` are 1-d arrays and each entry is an
    array of shape ``(len(p), len(pp))``.  Dirac spectra: ``pp`` is a scalar
    and each entry is a :class:`media.DiracComb` over the shift ``p - p'``.
    """
    spec = {name: spectrum(f) for name, f in ab.fields.items()}
    if ab.discrete:
        return _discrete_second_order(spec, float(pp), k)
    p = np.atleast_1d(np.asarray(p, dtype=float))
    pp = np.atleast_1d(np.asarray(pp, dtype=float))
    zero = np.zeros((p.size, pp.size), dtype=complex)
    out = {"X1": zero, "X2": zero, "Y1": zero, "Y2": zero}
    v, wa, wb = spec["v_alpha"], spec["w_alpha"], spec["w_beta"]
    if _is_empty(wa):
        return out
    lo = min(p.min(), pp.min())
    hi = max(p.max(), pp.max())
    q, wq = _q_grid(lo, hi, [v, wa, wb])
    norm = 1.0 / (2 * np.pi)
    out["X1"] = p[:, None] * norm / k**2 * _triangle_continuous(v, wa, p, pp, q, wq, q)
    out["Y1"] = pp[None, :] * norm / k**2 * _triangle_continuous(wa, v, p, pp, q, wq, q)
    if not _is_empty(wb):
        ones = np.ones_like(q)
        out["X2"] = norm * _triangle_continuous(wb, wa, p, pp, q, wq, ones)
        out["Y2"] = norm * _triangle_continuous(wa, wb, p, pp, q, wq, ones)
    return out


# ---------------------------------------------------------------- Dirac bookkeeping


def _open_channels(kin, shifts, mass_fn, prefactor):
    """Turn per-shift masses into angular delta weights.

    A mass ``m`` of ``2 pi m delta(k (s - s0) - Q)`` contributes
    ``2 pi m / (k |cos theta|)`` at each of the two angles with
    ``sin theta = s0 + Q / k``.
    """
    k = kin.k
    out = []
    for Q in _merge_shifts(shifts):
        s = kin.s0 + Q / k
        if abs(s) >= 1.0:
            continue
        cabs = math.sqrt(1.0 - s * s)
        if cabs < kin.angle_floor:
            raise GrazingAngle(f"diffraction channel at shift {Q:g} is grazing")
        base = math.asin(s)
        for side in (1, -1):
            c = side * cabs
            theta = base if side == 1 else math.pi - base
            mass = mass_fn(Q, s, c)
            out.append(DiracChannel(theta, complex(prefactor * 2 * np.pi * mass / (k * cabs)), Q, side))
    return out


def _f1_discrete(kin, mt):
    k, pp = kin.k, kin.p0
    v, a, b = (mt.get(n, 0) for n in ("v_alpha", "w_alpha", "w_beta"))

    def mass(Q, s, c):
        return (k * s) * pp * v.at(Q) / k**2 + b.at(Q) + kin.c0 * c * a.at(Q)

    shifts = [*v.p, *a.p, *b.p]
    return _open_channels(kin, shifts, mass, k / (2 * _SQRT2PI))


def f1(kin, mt):
    """First-order coefficient: an array over ``kin.theta`` or a list of channels."""
    if mt.discrete:
        return _f1_discrete(kin, mt)
    k = kin.k
    d = k * (kin.s - kin.s0)
    W0 = kernel_W(0, kin.p1, kin.p0, mt, k)
    return k / (2 * _SQRT2PI) * (W0 + kin.c0 * kin.c * _eval(mt.get("w_alpha", 0), d))


def _phi_integral(kin, mt, n):
    k = kin.k
    phi, wphi = quad.gauss_legendre(n, -np.pi / 2, np.pi / 2)
    q = k * np.sin(phi)
    cphi = np.cos(phi)
    v0, a0, b0 = (mt.get(nm, 0) for nm in ("v_alpha", "w_alpha", "w_beta"))
    p = kin.p1
    A = (p[:, None] * q[None, :] * _diff(v0, p, q) / k**2 + _diff(b0, p, q)
         - kin.c[:, None] * cphi[None, :] * _diff(a0, p, q))
    pp = np.array([kin.p0])
    B = (q * kin.p0 * _diff(v0, q, pp)[:, 0] / k**2 + _diff(b0, q, pp)[:, 0]
         - kin.c0 * cphi * _diff(a0, q, pp)[:, 0])
    return A @ (wphi * B)


def _f2_discrete(kin, ab, mt):
    k, pp, c0 = kin.k, kin.p0, kin.c0
    so = second_order_kernels(None, pp, ab, k)
    v0, a0, b0 = (mt.get(n, 0) for n in ("v_alpha", "w_alpha", "w_beta"))
    v1, a1, b1 = (mt.get(n, 1) for n in ("v_alpha", "w_alpha", "w_beta"))
    first = _merge_shifts([*v0.p, *a0.p, *b0.p])

    def W(l, p, q, shift):
        v, b = (v0, b0) if l == 0 else (v1, b1)
        return p * q * v.at(shift) / k**2 + b.at(shift)

    def mass(Q, s, c):
        p = k * s
        W1 = W(1, p, pp, Q)
        bracket = c0 * (so["X1"].at(Q) + so["X2"].at(Q) + W1 - c * c * a1.at(Q))
        bracket += c * (so["Y1"].at(Q) + so["Y2"].at(Q) - W1 + c0 * c0 * a1.at(Q))
        phi_sum = 0.0
        for b in first:
            q = pp + b
            if abs(q) >= k:
                continue
            cphi = math.sqrt(1.0 - (q / k) ** 2)
            Bm = W(0, q, pp, b) - c0 * cphi * a0.at(b)
            Am = W(0, p, q, Q - b) - c * cphi * a0.at(Q - b)
            phi_sum += Am * Bm / (2.0 * cphi)
        return bracket + phi_sum

    shifts = [*first, *(a + b for a in first for b in first), *(c.p for c in so.values())]
    flat = []
    for s in shifts:
        flat.extend(np.atleast_1d(s))
    return _open_channels(kin, flat, mass, 1j * k / (2 * _SQRT2PI))


def f2(kin, ab, mt=None, phi_nodes=PHI_NODES, f2_tol=F2_TOL):
    """Second-order coefficient: an array over ``kin.theta`` or a list of channels."""
    mt = moment_table(ab) if mt is None else mt
    if mt.discrete:
        return _f2_discrete(kin, ab, mt)
    k = kin.k
    d = k * (kin.s - kin.s0)
    c, c0 = kin.c, kin.c0
    so = second_order_kernels(kin.p1, [kin.p0], ab, k)
    X1, X2, Y1, Y2 = (so[n][:, 0] for n in ("X1", "X2", "Y1", "Y2"))
    W1 = kernel_W(1, kin.p1, kin.p0, mt, k)
    a1 = _eval(mt.get("w_alpha", 1), d)
    bracket = c0 * (X1 + X2 + W1 - c**2 * a1) + c * (Y1 + Y2 - W1 + c0**2 * a1)
    I = _phi_integral(kin, mt, phi_nodes)
    I2 = _phi_integral(kin, mt, 2 * phi_nodes)
    scale = max(np.max(np.abs(I2)), np.max(np.abs(bracket)), 1e-300)
    if np.max(np.abs(I2 - I)) > f2_tol * scale:
        raise QuadratureNotConverged(
            f"phi-integral changed by {np.max(np.abs(I2 - I)) / scale:.2e} on doubling the nodes"
        )
    return 1j * k / (2 * _SQRT2PI) * (bracket + k / (4 * np.pi) * I2)


def _merge_channels(parts):
    merged = {}
    order = []
    for factor, chans in parts:
        for ch in chans:
            key = None
            for kk in order:
                if kk[1] == ch.side and abs(kk[0] - ch.shift) <= 1e-9 * (1 + abs(ch.shift)):
                    key = kk
                    break
            if key is None:
                key = (ch.shift, ch.side)
                order.append(key)
                merged[key] = [ch.theta, 0j]
            merged[key][1] += factor * ch.weight
    return tuple(DiracChannel(merged[kk][0], merged[kk][1], kk[0], kk[1]) for kk in order)


def amplitude(kin, ab, kl, N=2, mt=None, f2_tol=F2_TOL):
    """Low-frequency amplitude through order ``N`` in ``kl = k ell``."""
    if N not in (1, 2):
        raise ValueError("order N must be 1 or 2")
    if not kl > 0:
        raise ValueError("kl must be positive")
    mt = moment_table(ab) if mt is None else mt
    first = f1(kin, mt)
    second = f2(kin, ab, mt, f2_tol=f2_tol) if N == 2 else None
    if mt.discrete:
        parts = [(kl, first)] + ([(kl**2, second)] if N == 2 else [])
        return Amplitude(np.zeros(0), np.zeros(0, dtype=complex), _merge_channels(parts),
                         (tuple(first), tuple(second or ())))
    values = kl * first + (kl**2 * second if N == 2 else 0)
    coeffs = (first,) if N == 1 else (first, second)
    return Amplitude(kin.theta, np.asarray(values, dtype=complex), (), coeffs)
