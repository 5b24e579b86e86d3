"""Media profiles, the TE/TM mapping and y-Fourier spectra.

A profile component is a :class:`Field`: a vectorised callable ``f(xc, y)``
of the scaled depth ``xc = x / ell`` in [0, 1] and the lateral coordinate
``y``, tagged with a :class:`Decay` class.  Fields that are finite sums of
harmonics carry their coefficients explicitly so that their spectra can be
represented exactly as Dirac sums.

Spectra use the convention ``f~(xc, p) = integral dy exp(-i p y) f(xc, y)``.
"""

from __future__ import annotations

import dataclasses
import enum
import json
import logging
import pathlib
import warnings
from typing import Callable, Sequence

import numpy as np

from . import _quadrature as quad
from .errors import (
    AlphaVanishes,
    ConfigInvalid,
    NonIntegrable,
    SeriesDiverges,
    TruncationWarning,
)

log = logging.getLogger(__name__)

DELTA_FLOOR = 1e-6
SPECTRAL_TOL = 1e-10
SERIES_TOL = 1e-16
X_NODES = 32
SHIFT_TOL = 1e-9

_Y_ORDER = 16
_TAIL = 1e-18


class ModeKind(enum.Enum):
    """Polarisation of the wave."""

    TE = "TE"
    TM = "TM"


class DecayClass(enum.Enum):
    COMPACT = "compact"
    GAUSSIAN = "gaussian"
    EXPONENTIAL = "exponential"
    HARMONIC = "harmonic"
    CONSTANT = "constant"


@dataclasses.dataclass(frozen=True)
class Decay:
    """Declared behaviour of a profile for large ``|y|``.

    ``scale`` is the Gaussian width, the exponential decay length or the
    half-width of the support, depending on ``kind``.  ``kinks`` lists
    lateral positions where the profile is not smooth.
    """

    kind: DecayClass
    scale: float = 1.0
    center: float = 0.0
    kinks: tuple = ()

    @property
    def decaying(self):
        return self.kind in (DecayClass.COMPACT, DecayClass.GAUSSIAN, DecayClass.EXPONENTIAL)

    def half_extent(self):
        if self.kind is DecayClass.GAUSSIAN:
            return np.sqrt(2.0 * np.log(1.0 / _TAIL)) * self.scale
        if self.kind is DecayClass.EXPONENTIAL:
            return np.log(1.0 / _TAIL) * self.scale
        if self.kind is DecayClass.COMPACT:
            return self.scale
        raise NonIntegrable(f"decay class {self.kind.value!r} has no finite extent")

    def y_rule(self, width_factor=0.5, order=_Y_ORDER):
        """Composite Gauss-Legendre rule in y covering the significant support."""
        h = self.half_extent()
        anchors = [self.center, *self.kinks]
        width = self.scale * width_factor
        if self.kind is DecayClass.COMPACT:
            width = min(width, self.scale / 4.0)
        breaks = quad.panel_breaks(self.center - h, self.center + h, width, anchors)
        return quad.composite_gauss_legendre(breaks, order)

    def sample_net(self, harmonics=None, n=33):
        """Lateral sample points used for pointwise admissibility checks."""
        if self.kind is DecayClass.CONSTANT:
            return np.zeros(1)
        if self.kind is DecayClass.HARMONIC:
            ps = [abs(p) for p, _ in (harmonics or ()) if abs(p) > 0]
            period = 2 * np.pi / min(ps) if ps else 1.0
            return np.linspace(0.0, period, n)
        reach = self.scale if self.kind is DecayClass.COMPACT else 4 * self.scale
        return self.center + np.linspace(-reach, reach, n)


def _as_coeff(c):
    """Turn a constant or a callable of xc into a vectorised callable."""
    if callable(c):
        return c
    value = complex(c)
    return lambda x: np.full(np.shape(x), value, dtype=complex)


@dataclasses.dataclass(frozen=True, eq=False)
class Field:
    """A complex profile component ``f(xc, y)``.

    Attributes:
        func: vectorised callable of broadcastable arrays ``(xc, y)``.
        decay: declared lateral decay class.
        harmonics: optional exact representation ``((p_m, c_m), ...)`` with
            ``f = sum_m c_m(xc) exp(i p_m y)``.
        x_breaks: optional callable returning the interior depth breakpoints
            (in xc) for given ``y``; shape ``(n_breaks, *y.shape)``.
        is_zero: marks the identically vanishing field.
    """

    func: Callable
    decay: Decay
    harmonics: tuple | None = None
    x_breaks: Callable | None = None
    is_zero: bool = False

    def __call__(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        out = np.asarray(self.func(x, y), dtype=complex)
        return np.broadcast_to(out, x.shape).copy()

    @property
    def discrete(self):
        return self.harmonics is not None


def zero_field():
    return Field(
        func=lambda x, y: np.zeros(np.broadcast(x, y).shape, dtype=complex),
        decay=Decay(DecayClass.CONSTANT),
        harmonics=(),
        is_zero=True,
    )


def harmonic_field(terms):
    """Field ``sum_m c_m(xc) exp(i p_m y)`` from ``[(p_m, c_m), ...]``.

    ``c_m`` may be a constant or a callable of xc.
    """
    terms = tuple((float(p), _as_coeff(c)) for p, c in terms)
    ps = [p for p, _ in terms]
    if len(set(ps)) != len(ps):
        raise ValueError("harmonic wavenumbers must be pairwise distinct")
    if not terms:
        return zero_field()

    def func(x, y):
        out = np.zeros(np.broadcast(x, y).shape, dtype=complex)
        for p, c in terms:
            out = out + c(x) * np.exp(1j * p * y)
        return out

    kind = DecayClass.CONSTANT if all(p == 0.0 for p in ps) else DecayClass.HARMONIC
    return Field(func=func, decay=Decay(kind), harmonics=terms)


def _scale_field(field, factor):
    if field.is_zero or factor == 0:
        return zero_field()
    harmonics = None
    if field.harmonics is not None:
        harmonics = tuple((p, (lambda c: lambda x: factor * c(x))(c)) for p, c in field.harmonics)
    return dataclasses.replace(field, func=lambda x, y: factor * field.func(x, y), harmonics=harmonics)


def _v_from_w(w, series_tol=SERIES_TOL):
    """The field ``v = w / (1 + w)``."""
    if w.is_zero:
        return zero_field()
    if w.harmonics is None:
        return dataclasses.replace(w, func=lambda x, y: (lambda f: f / (1.0 + f))(w.func(x, y)))
    terms = dict(w.harmonics)
    nonzero = [p for p in terms if p != 0.0]
    c0 = terms.get(0.0, _as_coeff(0.0))
    if not nonzero:
        return harmonic_field([(0.0, lambda x: c0(x) / (1.0 + c0(x)))])
    if len(nonzero) > 1:
        raise ValueError("exact v_alpha spectra are available for at most one nonzero harmonic")
    K = nonzero[0]
    c1 = terms[K]
    xs = np.concatenate([[0.0, 1.0], quad.unit_gl(X_NODES)[0]])
    ratio = np.max(np.abs(c1(xs)) / np.abs(1.0 + c0(xs)))
    if ratio >= 1.0:
        raise SeriesDiverges(f"|z1| / |z0 + 1| = {ratio:.6g} >= 1")
    scale = 1.0 / np.min(np.abs(1.0 + c0(xs)))
    out = [(0.0, lambda x: c0(x) / (1.0 + c0(x)))]
    j = 1
    while True:
        bound = scale * ratio**j
        if bound < series_tol or j > 400:
            break
        coeff = (lambda j: lambda x: (-1) ** (j + 1) * c1(x) ** j / (1.0 + c0(x)) ** (j + 1))(j)
        out.append((j * K, coeff))
        j += 1
    return harmonic_field(out)


@dataclasses.dataclass(frozen=True, eq=False)
class MediumProfile:
    """Relative permittivity and permeability deviations inside the strip."""

    w_eps: Field
    w_mu: Field
    ell: float
    name: str = "custom"

    def __post_init__(self):
        if not self.ell > 0:
            raise ValueError("strip thickness ell must be positive")

    @property
    def decay(self):
        for f in (self.w_eps, self.w_mu):
            if not f.is_zero:
                return f.decay
        return Decay(DecayClass.CONSTANT)

    def with_ell(self, ell):
        return dataclasses.replace(self, ell=ell)


@dataclasses.dataclass(frozen=True, eq=False)
class AlphaBetaProfile:
    w_alpha: Field
    w_beta: Field
    v_alpha: Field
    mode: ModeKind
    ell: float = 1.0

    @property
    def discrete(self):
        return all(f.discrete for f in (self.w_alpha, self.w_beta, self.v_alpha))

    @property
    def fields(self):
        return {"w_alpha": self.w_alpha, "w_beta": self.w_beta, "v_alpha": self.v_alpha}


def to_alpha_beta(profile, mode, delta_floor=DELTA_FLOOR):
    """Map a medium onto the pair of coefficient functions of the wave equation.

    TE waves take alpha from the permeability and beta from the permittivity;
    TM waves swap the roles.
    """
    mode = ModeKind(mode)
    if mode is ModeKind.TE:
        w_alpha, w_beta = profile.w_mu, profile.w_eps
    else:
        w_alpha, w_beta = profile.w_eps, profile.w_mu
    if not w_alpha.is_zero:
        ys = w_alpha.decay.sample_net(w_alpha.harmonics)
        xs = np.linspace(0.0, 1.0, 17)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        gap = np.min(np.abs(1.0 + w_alpha(X, Y)))
        if gap < delta_floor:
            raise AlphaVanishes(f"min |1 + w_alpha| = {gap:.3e} below floor {delta_floor:g}")
    return AlphaBetaProfile(w_alpha, w_beta, _v_from_w(w_alpha), mode, profile.ell)


# ---------------------------------------------------------------- spectra


@dataclasses.dataclass(frozen=True, eq=False)
class DiscreteSpectrum:
    """``f~(xc, p) = sum_m 2 pi c_m(xc) delta(p - p_m)``."""

    p: np.ndarray
    coeffs: tuple

    def masses(self, x):
        x = np.asarray(x, dtype=float)
        if not self.coeffs:
            return np.zeros((0, x.size), dtype=complex)
        return np.array([np.broadcast_to(c(x), x.shape) for c in self.coeffs], dtype=complex)

    def __call__(self, x, p):
        if len(self.p):
            raise TypeError("a Dirac spectrum cannot be sampled pointwise")
        return np.zeros((np.size(x), *np.shape(p)), dtype=complex)


def _phase(p, y):
    return np.exp(-1j * np.multiply.outer(p, y))


@dataclasses.dataclass(frozen=True, eq=False)
class ContinuousSpectrum:
    """Quadrature evaluator of the y-Fourier transform of a decaying field."""

    field: Field
    y: np.ndarray
    wy: np.ndarray
    q_max: float

    def __call__(self, x, p, chunk=4096):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        p = np.asarray(p, dtype=float)
        F = self.field(x[:, None], self.y[None, :]) * self.wy
        flat = p.ravel()
        out = np.empty((x.size, flat.size), dtype=complex)
        for s in range(0, flat.size, chunk):
            out[:, s : s + chunk] = F @ _phase(flat[s : s + chunk], self.y).T
        return out.reshape((x.size, *p.shape))

    def difference_matrix(self, x, p, q):
        """Array ``D[i, a, b] = f~(x_i, p_a - q_b)``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        F = self.field(x[:, None], self.y[None, :]) * self.wy
        Ep = _phase(np.asarray(p, dtype=float), self.y)
        Eq = np.conj(_phase(np.asarray(q, dtype=float), self.y))
        return np.matmul(Ep[None, :, :] * F[:, None, :], Eq.T[None, :, :])


def _estimate_qmax(spec, tol):
    decay = spec.field.decay
    xs = quad.unit_gl(6)[0]
    step = 0.25 / decay.scale
    P = 2.0 / decay.scale
    cap = 40.0 / decay.scale
    grid = np.arange(-P, P + step / 2, step)
    peak = np.max(np.abs(spec(xs, grid)))
    if peak == 0:
        return 0.0
    while P < cap:
        shell = np.concatenate([np.arange(P, 2 * P, step), -np.arange(P, 2 * P, step)])
        if np.max(np.abs(spec(xs, shell))) < tol * peak:
            return P
        P *= 2
    warnings.warn(
        f"spectrum still above {tol:g} of its peak at |p| = {cap:.3g}; truncating there",
        TruncationWarning,
        stacklevel=3,
    )
    return cap


def fourier_y(field, path=None, spectral_tol=SPECTRAL_TOL):
    """y-Fourier transform of a profile component.

    Harmonic sums (including constants) give a :class:`DiscreteSpectrum`;
    decaying fields give a :class:`ContinuousSpectrum`.  ``path`` can force
    ``"continuous"`` or ``"discrete"``.
    """
    if field.is_zero:
        return DiscreteSpectrum(np.zeros(0), ())
    if path == "continuous" or (path is None and field.harmonics is None):
        if not field.decay.decaying:
            raise NonIntegrable(
                f"{field.decay.kind.value} profile has no integrable y-Fourier transform"
            )
        y, wy = field.decay.y_rule()
        spec = ContinuousSpectrum(field, y, wy, 0.0)
        return dataclasses.replace(spec, q_max=_estimate_qmax(spec, spectral_tol))
    if field.harmonics is None:
        raise ValueError("field has no harmonic representation")
    ps = np.array([p for p, _ in field.harmonics], dtype=float)
    return DiscreteSpectrum(ps, tuple(c for _, c in field.harmonics))


# ---------------------------------------------------------------- moments


@dataclasses.dataclass(frozen=True, eq=False)
class DiracComb:
    """x-integrated Dirac spectrum ``sum_m 2 pi mass_m delta(p - p_m)``."""

    p: np.ndarray
    mass: np.ndarray

    def at(self, q, tol=SHIFT_TOL):
        """Mass sitting at shift ``q`` (zero when no line is there)."""
        q = np.asarray(q, dtype=float)
        if not len(self.p):
            return np.zeros(q.shape, dtype=complex)
        hit = np.abs(q[..., None] - self.p) <= tol * (1.0 + np.abs(self.p))
        return (hit * self.mass).sum(axis=-1)

    def __call__(self, p):
        if len(self.p):
            raise TypeError("a Dirac spectrum cannot be sampled pointwise")
        return np.zeros(np.shape(p), dtype=complex)

    @property
    def discrete(self):
        return True


@dataclasses.dataclass(frozen=True, eq=False)
class SampledTransform:
    """``p -> sum_y weights(y) exp(-i p y)``: the transform of an x-integrated field."""

    y: np.ndarray
    weights: np.ndarray
    q_max: float

    def __call__(self, p, chunk=4096):
        p = np.asarray(p, dtype=float)
        flat = p.ravel()
        out = np.empty(flat.size, dtype=complex)
        for s in range(0, flat.size, chunk):
            out[s : s + chunk] = _phase(flat[s : s + chunk], self.y) @ self.weights
        return out.reshape(p.shape)

    def difference_matrix(self, p, q):
        Ep = _phase(np.asarray(p, dtype=float), self.y)
        Eq = np.conj(_phase(np.asarray(q, dtype=float), self.y))
        return (Ep * self.weights) @ Eq.T

    @property
    def discrete(self):
        return False


def x_integrate(field, y, weight=None, n=X_NODES):
    """``integral_0^1 dxc weight(xc) f(xc, y)`` for every entry of ``y``.

    Piecewise Gauss-Legendre, split at the field's depth breakpoints.
    """
    y = np.asarray(y, dtype=float)
    t, wt = quad.unit_gl(n)
    if field.x_breaks is None:
        edges = np.stack([np.zeros(y.shape), np.ones(y.shape)])
    else:
        inner = np.clip(np.asarray(field.x_breaks(y), dtype=float), 0.0, 1.0)
        edges = np.concatenate([np.zeros((1, *y.shape)), inner, np.ones((1, *y.shape))])
    total = np.zeros(y.shape, dtype=complex)
    for a, b in zip(edges[:-1], edges[1:]):
        xs = a[..., None] + (b - a)[..., None] * t
        vals = field(xs, y[..., None])
        if weight is not None:
            vals = vals * weight(xs)
        total += ((b - a)[..., None] * wt * vals).sum(axis=-1)
    return total


@dataclasses.dataclass(frozen=True, eq=False)
class MomentTable:
    """x-moments ``integral_0^1 xc^l f~(xc, p) dxc`` for the three symbols."""

    entries: dict
    discrete: bool

    def get(self, symbol, l):
        return self.entries[(symbol, l)]

    __getitem__ = lambda self, key: self.entries[key]

    @property
    def q_max(self):
        vals = [getattr(m, "q_max", 0.0) for m in self.entries.values()]
        return max(vals) if vals else 0.0


_MOMENT_RTOL = 1e-9


def _moment_of(field, l, spectral_tol):
    spec = fourier_y(field)
    if isinstance(spec, DiscreteSpectrum):
        t, wt = quad.unit_gl(X_NODES)
        mass = spec.masses(t) @ (wt * t**l) if len(spec.p) else np.zeros(0, dtype=complex)
        return DiracComb(spec.p, np.asarray(mass, dtype=complex))
    weight = None if l == 0 else (lambda x: x**l)
    g = x_integrate(field, spec.y, weight)
    coarse = x_integrate(field, spec.y, weight, n=X_NODES // 2)
    magnitude = dataclasses.replace(field, func=lambda x, y: np.abs(field.func(x, y)))
    scale = np.max(np.abs(x_integrate(magnitude, spec.y, weight))) or 1.0
    if np.max(np.abs(g - coarse)) > _MOMENT_RTOL * scale:
        log.warning("x-quadrature of moment l=%d changed by %.2e between 16 and 32 nodes",
                    l, np.max(np.abs(g - coarse)) / scale)
    return SampledTransform(spec.y, spec.wy * g, spec.q_max)


def moments(ab, spectral_tol=SPECTRAL_TOL):
    """Moment table for ``l`` in {0, 1} and the symbols w_alpha, w_beta, v_alpha."""
    entries = {}
    for name, field in ab.fields.items():
        for l in (0, 1):
            entries[(name, l)] = _moment_of(field, l, spectral_tol)
    kinds = {isinstance(m, DiracComb) for m in entries.values() if not (isinstance(m, DiracComb) and not len(m.p))}
    if len(kinds) > 1:
        raise ValueError("mixed Dirac and continuous spectra are not supported")
    discrete = kinds == {True} or not kinds
    return MomentTable(entries, discrete)


# ---------------------------------------------------------------- built-ins


def slab(z_eps=0.0, z_mu=0.0, ell=1.0):
    """Laterally homogeneous slab; ``z_eps`` and ``z_mu`` may depend on xc."""
    def comp(z):
        if not callable(z) and complex(z) == 0:
            return zero_field()
        return harmonic_field([(0.0, z)])

    return MediumProfile(comp(z_eps), comp(z_mu), ell, name="slab")


def grating(z0, z1, K, ell=1.0):
    """Nonmagnetic single-harmonic grating ``w_eps = z0 + z1 exp(i K y)``."""
    if not K > 0:
        raise ValueError("grating wavenumber K must be positive")
    terms = [(0.0, z0)]
    if callable(z1) or complex(z1) != 0:
        terms.append((float(K), z1))
    return MediumProfile(harmonic_field(terms), zero_field(), ell, name="grating")


def _gaussian_exp_field(z, kappa_ell, L, center):
    if not callable(z) and complex(z) == 0:
        return zero_field()
    zc = _as_coeff(z)

    def func(x, y):
        return zc(x) * np.exp(-kappa_ell * x - (y - center) ** 2 / (2.0 * L**2))

    return Field(func=func, decay=Decay(DecayClass.GAUSSIAN, scale=L, center=center))


def gaussian_exp(z_eps=0.0, z_mu=0.0, kappa=1.0, L=1.0, ell=1.0, center=0.0):
    """``w = z exp(-kappa x) exp(-(y - center)^2 / 2 L^2)`` inside the strip."""
    if not L > 0:
        raise ValueError("Gaussian width L must be positive")
    ke = kappa * ell
    return MediumProfile(
        _gaussian_exp_field(z_eps, ke, L, center),
        _gaussian_exp_field(z_mu, ke, L, center),
        ell,
        name="gaussian_exp",
    )


def gaussian_test_medium(ell=1.0):
    """The Gaussian medium used to pin the two amplitude pipelines together.

    ``w_eps = w_mu = 0.4 exp(-xc) exp(-y^2 / 2 (5 ell)^2)``; under the TM
    mapping this gives ``w_alpha = w_beta``.
    """
    return gaussian_exp(0.4, 0.4, kappa=1.0 / ell, L=5.0 * ell, ell=ell)


def _bilinear(xs, ys, values):
    from scipy.interpolate import RegularGridInterpolator

    re = RegularGridInterpolator((xs, ys), values.real, bounds_error=False, fill_value=0.0)
    im = RegularGridInterpolator((xs, ys), values.imag, bounds_error=False, fill_value=0.0)

    def func(x, y):
        pts = np.stack([np.clip(x, xs[0], xs[-1]), y], axis=-1)
        return re(pts) + 1j * im(pts)

    return func


def from_grid(xs, ys, w_eps, w_mu, ell=1.0):
    """Medium sampled on a rectilinear (xc, y) grid, bilinear in between and zero outside."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs[0] > 0 or xs[-1] < 1:
        raise ConfigInvalid("grid must cover xc in [0, 1]")
    half = 0.5 * (ys[-1] - ys[0])
    decay = Decay(DecayClass.COMPACT, scale=half, center=0.5 * (ys[0] + ys[-1]), kinks=tuple(ys))
    inner = xs[(xs > 0) & (xs < 1)]

    def breaks(y):
        return np.broadcast_to(inner.reshape((-1,) + (1,) * np.ndim(y)), (inner.size, *np.shape(y)))

    def comp(v):
        v = np.asarray(v, dtype=complex)
        if not np.any(v):
            return zero_field()
        return Field(func=_bilinear(xs, ys, v), decay=decay, x_breaks=breaks if inner.size else None)

    return MediumProfile(comp(w_eps), comp(w_mu), ell, name="grid")


def _grid_from_csv(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    xs = np.unique(data[:, 0])
    ys = np.unique(data[:, 1])
    shape = (xs.size, ys.size)
    if data.shape[0] != xs.size * ys.size:
        raise ConfigInvalid("grid CSV must list every (xc, y) pair exactly once")
    order = np.lexsort((data[:, 1], data[:, 0]))
    d = data[order]
    w_eps = (d[:, 2] + 1j * d[:, 3]).reshape(shape)
    w_mu = (d[:, 4] + 1j * d[:, 5]).reshape(shape)
    return xs, ys, w_eps, w_mu


MEDIUM_SCHEMA = {
    "type": "object",
    "required": ["mode", "ell", "profile"],
    "properties": {
        "mode": {"enum": ["TE", "TM"]},
        "ell": {"type": "number", "exclusiveMinimum": 0},
        "profile": {
            "type": "object",
            "required": ["kind"],
            "properties": {"kind": {"enum": ["slab", "grating", "gaussian_exp", "grid"]}},
        },
    },
}


def _cplx(v):
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    if isinstance(v, dict):
        return complex(v.get("re", 0.0), v.get("im", 0.0))
    return complex(v)


def load_medium(source, base=None):
    """Read a medium description (path or already-parsed dict).

    Complex numbers are given as plain numbers, ``[re, im]`` pairs or
    ``{"re": .., "im": ..}`` objects.  Returns ``(profile, mode)``.
    """
    import jsonschema

    if isinstance(source, (str, pathlib.Path)):
        path = pathlib.Path(source)
        base = path.parent
        try:
            cfg = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigInvalid(f"cannot read medium file {path}: {exc}") from exc
    else:
        cfg = source
    try:
        jsonschema.validate(cfg, MEDIUM_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigInvalid(f"medium description invalid: {exc.message}") from exc
    ell = float(cfg["ell"])
    prof = dict(cfg["profile"])
    kind = prof.pop("kind")
    try:
        if kind == "slab":
            medium = slab(_cplx(prof.get("z_eps", 0)), _cplx(prof.get("z_mu", 0)), ell)
        elif kind == "grating":
            medium = grating(_cplx(prof["z0"]), _cplx(prof["z1"]), float(prof["K"]), ell)
        elif kind == "gaussian_exp":
            medium = gaussian_exp(
                _cplx(prof.get("z_eps", 0)),
                _cplx(prof.get("z_mu", 0)),
                kappa=float(prof.get("kappa", 0.0)),
                L=float(prof["L"]),
                ell=ell,
                center=float(prof.get("center", 0.0)),
            )
        else:
            csv = pathlib.Path(prof["csv"])
            if not csv.is_absolute() and base is not None:
                csv = pathlib.Path(base) / csv
            medium = from_grid(*_grid_from_csv(csv), ell=ell)
    except KeyError as exc:
        raise ConfigInvalid(f"profile kind {kind!r} is missing parameter {exc}") from exc
    return medium, ModeKind(cfg["mode"])
