"""Closed forms for the single-harmonic grating ``eps = 1 + z0 + z1 exp(i K y)``.

TM waves, nonmagnetic strip.  Channel ``j`` leaves at ``sin theta = s0 + j K / k``
on either side of the strip; ``tau(n, j, +1)`` is the weight on the
``cos theta > 0`` side and ``tau(n, j, -1)`` the weight on the other side.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from . import media
from .errors import ChannelClosed, GrazingAngle, NonRealZ0, NotDerived, SeriesDiverges

_RT = math.sqrt(math.pi / 2.0)


@dataclasses.dataclass(frozen=True)
class GratingSpec:
    z0: complex
    z1: complex
    K: float
    ell: float = 1.0

    def __post_init__(self):
        if not self.K > 0:
            raise ValueError("grating wavenumber K must be positive")
        if abs(self.z1) >= abs(self.z0 + 1):
            raise SeriesDiverges(f"|z1| = {abs(self.z1):.6g} must stay below |z0 + 1| = {abs(self.z0 + 1):.6g}")

    def a(self, j):
        """Geometric coefficient of ``exp(i j K y)`` in ``1 - 1 / eps``."""
        z0, z1 = self.z0, self.z1
        if j == 0:
            return z0 / (z0 + 1)
        return (-1) ** (j + 1) * z1**j / (z0 + 1) ** (j + 1)

    def medium(self):
        return media.grating(self.z0, self.z1, self.K, self.ell)

    def alpha_beta(self):
        return media.to_alpha_beta(self.medium(), media.ModeKind.TM)


@dataclasses.dataclass(frozen=True)
class ChannelSet:
    """Open diffraction channels ``j = 0..J`` with their angles (radians)."""

    J: int
    s: tuple
    theta_plus: tuple
    theta_minus: tuple
    in_window: bool

    @property
    def theta_plus_deg(self):
        return tuple(math.degrees(t) for t in self.theta_plus)

    @property
    def theta_minus_deg(self):
        return tuple(math.degrees(t) for t in self.theta_minus)


def channels(k, theta0, spec):
    """Enumerate the open channels; ``J`` is the largest open index."""
    if not k > 0:
        raise ValueError("k must be positive")
    c0 = math.cos(theta0)
    if abs(c0) < 1e-6:
        raise GrazingAngle("incidence angle is grazing")
    s0 = math.sin(theta0)
    J = math.floor((k / spec.K) * (1.0 - s0) + 1e-12)
    s_list, tp, tm = [], [], []
    for j in range(J + 1):
        s = s0 + j * spec.K / k
        if abs(s) >= 1.0 - 1e-15:
            break
        s_list.append(s)
        tp.append(math.asin(s))
        tm.append(math.pi - math.asin(s))
    in_window = False
    if spec.K / 2 < k <= spec.K:
        star = math.asin(spec.K / k - 1.0)
        t = math.remainder(theta0, 2 * math.pi)
        in_window = (-math.pi / 2 < t < -star) or (math.pi + star < t % (2 * math.pi) < 1.5 * math.pi)
    return ChannelSet(len(s_list) - 1, tuple(s_list), tuple(tp), tuple(tm), in_window)


@dataclasses.dataclass(frozen=True)
class BrewsterSetup:
    theta_B: float
    theta0: float
    kappa0: float

    @property
    def theta_B_deg(self):
        return math.degrees(self.theta_B)

    @property
    def theta0_deg(self):
        return math.degrees(self.theta0)


def brewster_setup(spec):
    """Brewster angle of the homogeneous part, the incidence angle beyond it and the threshold."""
    z0 = complex(spec.z0)
    if z0.imag != 0:
        raise NonRealZ0(f"z0 = {z0} is not real")
    z0 = z0.real
    if z0 < 0:
        raise NonRealZ0("the Brewster analysis needs z0 >= 0")
    theta_B = math.atan(math.sqrt(z0 + 1))
    kappa0 = spec.K / (1 + math.sqrt((z0 + 1) / (z0 + 2)))
    assert kappa0 > spec.K / 2
    return BrewsterSetup(theta_B, math.pi + theta_B, kappa0)


def tau(n, j, sign, k, theta0, spec):
    """Closed-form channel weight ``tau^(n)_{j, sign}``."""
    if n not in (1, 2):
        raise ValueError("n must be 1 or 2")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    chans = channels(k, theta0, spec)
    if j < 0 or j > chans.J:
        raise ChannelClosed(f"channel j={j} is closed (J = {chans.J})")
    if n == 2 and j >= 2:
        raise NotDerived("second-order weights are only available for j in {0, 1}")
    s0, c0 = math.sin(theta0), math.cos(theta0)
    z0, z1 = spec.z0, spec.z1
    a0 = spec.a(0)
    sec0 = 1.0 / math.sqrt(1.0 - s0 * s0)
    cos0 = 1.0 / sec0
    if n == 1:
        if j == 0:
            return complex(_RT * (a0 * s0**2 * sec0 + sign * z0 * c0))
        sj = chans.s[j]
        secj = 1.0 / math.sqrt(1.0 - sj * sj)
        val = spec.a(j) * s0 * sj * secj
        if j == 1:
            val += sign * z1 * c0
        return complex(_RT * val)
    if j == 0:
        head = sec0 * (a0 * s0**2 * (a0 * s0**2 * sec0 + c0) - z0 * c0**3)
        tail = z0 * c0 * (z0 * cos0 + c0) - a0 * s0**2
        return complex(0.5j * _RT * (head + sign * tail))
    s1 = chans.s[1]
    sec1 = 1.0 / math.sqrt(1.0 - s1 * s1)
    cos1 = 1.0 / sec1
    a1 = spec.a(1)
    head = a1 * s0 * s1 * sec1 * (a0 * (s0**2 * sec0 + s1**2 * sec1) + c0) - z1 * c0 * cos1
    tail = z1 * c0 * (z0 * (cos0 + cos1) + c0) - a1 * s0 * s1
    return complex(0.5j * _RT * (head + sign * tail))


def tau_series(j, sign, k, theta0, spec, order):
    """``sum_{n <= order} tau^(n) (k ell)^n``; zero for a closed channel."""
    kl = k * spec.ell
    try:
        return sum(tau(n, j, sign, k, theta0, spec) * kl**n for n in range(1, order + 1))
    except ChannelClosed:
        return 0j


PAPER_SPEC = GratingSpec(10.58, 0.07, math.pi, 0.1)


def figure_data(which, spec=PAPER_SPEC, ell=None, K=None, n=200, step=0.002):
    """Columns of the grating figures as a dict of arrays.

    ``fig3``: channel-1 angles versus k/K above the threshold.  ``fig4``:
    transmitted j=0 weight versus k ell at both orders, on multiples of ``step``.  ``fig5``: squared
    j=1 weights (times 1e4) over the window between the threshold and K.
    """
    if ell is not None or K is not None:
        spec = dataclasses.replace(spec, ell=spec.ell if ell is None else ell, K=spec.K if K is None else K)
    setup = brewster_setup(spec)
    th0 = setup.theta0
    which = str(which).replace("fig", "")
    if which == "3":
        ratio = np.linspace(setup.kappa0 / spec.K, 1.0, n + 1)[1:]
        tp = np.array([math.degrees(channels(r * spec.K, th0, spec).theta_plus[1]) for r in ratio])
        return {"k_over_K": ratio, "theta1_plus_deg": tp, "theta1_minus_deg": 180.0 - tp}
    if which == "4":
        kl = step * np.arange(1, int(spec.K * spec.ell / step + 1e-9) + 1)
        out = {"kl": kl}
        for order in (1, 2):
            vals = np.array([tau_series(0, -1, x / spec.ell, th0, spec, order) for x in kl])
            out[f"re_order{order}"] = vals.real
            out[f"im_order{order}"] = vals.imag
        return out
    if which == "5":
        kl = np.linspace(setup.kappa0 * spec.ell, spec.K * spec.ell, n + 1)[1:]
        out = {"kl": kl}
        for order in (1, 2):
            for sign, tag in ((1, "plus"), (-1, "minus")):
                vals = np.array([tau_series(1, sign, x / spec.ell, th0, spec, order) for x in kl])
                out[f"tau1_{tag}_sq_e4_order{order}"] = 1e4 * np.abs(vals) ** 2
        return out
    raise ValueError(f"unknown figure {which!r}")
