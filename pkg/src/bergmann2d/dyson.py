"""Operator-grid oracle for the low-frequency amplitude.

Kernels ``<p|A|p'>`` live on a momentum basis.  For smooth media the basis
is a Gauss-Legendre grid in the propagation angle, augmented with probe
momenta (output angles and the incident momentum) that carry zero
composition weight.  For Dirac media the basis is the finite set of
channels reachable from the incident momentum, and kernels are Dirac masses.

The expansion blocks of the Dyson series are built two ways: from the
moment kernels in closed form, and by nested depth quadrature of the series
expansion of the propagation factors.  The amplitude is then assembled from
the second route alone.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from . import _quadrature as quad
from . import lowfreq, media
from .errors import DiscreteOffGrid, RouteMismatch

ORACLE_TOL = 1e-6
X_NODES = 16
_Y_ORDER = 10


# ---------------------------------------------------------------- constant blocks

K_MAT = np.array([[1, 1], [-1, -1]])
SIGMA1 = np.array([[0, 1], [1, 0]])
SIGMA3 = np.array([[1, 0], [0, -1]])
SIGMA_PLUS = np.eye(2, dtype=int) + SIGMA1
SIGMA_MINUS = np.eye(2, dtype=int) - SIGMA1

CONSTANT_BLOCKS = {"K": K_MAT, "KT": K_MAT.T, "s3": SIGMA3, "s+": SIGMA_PLUS, "s-": SIGMA_MINUS}


def multiplication_table():
    """All pairwise products of the constant blocks, keyed ``(left, right)``."""
    return {(a, b): A @ B for a, A in CONSTANT_BLOCKS.items() for b, B in CONSTANT_BLOCKS.items()}


# ---------------------------------------------------------------- bases


@dataclasses.dataclass(frozen=True, eq=False)
class AngularGrid:
    """Momentum basis: ``n`` angular nodes followed by zero-weight probes.

    ``weights`` is the measure ``dp = w_phi k cos(phi)`` used when composing
    kernels.
    """

    k: float
    p: np.ndarray
    weights: np.ndarray
    n_nodes: int
    kind: str = "grid"

    @property
    def size(self):
        return self.p.size

    @property
    def wc2(self):
        return 1.0 - (self.p / self.k) ** 2

    @property
    def propagating(self):
        return np.abs(self.p) < self.k

    @property
    def varpi(self):
        """``sqrt(1 - p^2 / k^2)`` on propagating entries, zero elsewhere."""
        return np.where(self.propagating, np.sqrt(np.clip(self.wc2, 0.0, None)), 0.0)

    def index(self, p, tol=1e-12):
        hit = np.flatnonzero(np.abs(self.p - p) <= tol * (1 + abs(p)))
        if not hit.size:
            raise KeyError(f"momentum {p} is not in the basis")
        return int(hit[-1])


def angular_grid(k, n, probes=()):
    phi, w = quad.gauss_legendre(n, -np.pi / 2, np.pi / 2)
    probes = np.asarray(probes, dtype=float)
    if probes.size and np.max(np.abs(probes)) >= k:
        raise ValueError("probe momenta must be propagating")
    p = np.concatenate([k * np.sin(phi), probes])
    weights = np.concatenate([w * k * np.cos(phi), np.zeros(probes.size)])
    return AngularGrid(k, p, weights, n)


@dataclasses.dataclass(frozen=True, eq=False)
class ChannelBasis(AngularGrid):
    """Finite channel set ``p0 + sums of spectral shifts`` with unit weights."""

    kind: str = "channels"


def _shifts_of(ab):
    shifts = []
    for f in ab.fields.values():
        if f.harmonics:
            shifts.extend(p for p, _ in f.harmonics)
    return lowfreq._merge_shifts(shifts)


def channel_basis(k, p0, ab, depth=2):
    """Channels reachable from ``p0`` with at most ``depth`` spectral shifts."""
    base = _shifts_of(ab) or [0.0]
    level = {0.0}
    reach = set(level)
    for _ in range(depth):
        level = {a + b for a in level for b in base}
        reach |= level
    p = np.array(lowfreq._merge_shifts([p0 + s for s in reach]))
    return ChannelBasis(k, p, np.ones(p.size), p.size)


# ---------------------------------------------------------------- kernels


@dataclasses.dataclass(frozen=True, eq=False)
class OperatorKernel:
    """Matrix ``K[i, j] = <p_i|A|p_j>`` on a basis."""

    matrix: np.ndarray
    basis: AngularGrid

    def compose(self, other, weights=None):
        w = self.basis.weights if weights is None else weights
        return OperatorKernel(self.matrix @ (w[:, None] * other.matrix), self.basis)

    __matmul__ = compose

    def project(self):
        """Restriction to propagating momenta."""
        keep = self.basis.propagating
        return OperatorKernel(self.matrix * np.outer(keep, keep), self.basis)

    @staticmethod
    def identity(basis):
        w = basis.weights
        inv = np.divide(1.0, w, out=np.zeros_like(w), where=w > 0)
        return OperatorKernel(np.diag(inv).astype(complex), basis)

    def entry(self, p, pp):
        return self.matrix[self.basis.index(p), self.basis.index(pp)]


@dataclasses.dataclass(frozen=True, eq=False)
class BlockKernel:
    """2x2 block operator, ``blocks[a, b]`` a matrix on the basis."""

    blocks: np.ndarray
    basis: AngularGrid

    def block(self, a, b):
        return OperatorKernel(self.blocks[a - 1, b - 1], self.basis)


@dataclasses.dataclass(frozen=True)
class RouteComparison:
    closed: BlockKernel
    quadrature: BlockKernel
    discrepancy: float


def _y_rule(decay):
    h = decay.half_extent()
    width = decay.scale / 3.0
    if decay.kind is media.DecayClass.COMPACT:
        width = min(width, decay.scale / 6.0)
    breaks = quad.panel_breaks(decay.center - h, decay.center + h, width, [decay.center, *decay.kinks])
    return quad.composite_gauss_legendre(breaks, _Y_ORDER)


class _Kernelizer:
    """Builds ``sum_t c_t <p_r| f(x_t, y) |p_c>`` for one field.

    Smooth fields go through the y-representation
    ``(1 / 2 pi) sum_y w_y exp(-i p_r y) f(x, y) exp(i p_c y)``; harmonic
    fields map their coefficients to exact Dirac masses.
    """

    def __init__(self, field, discrete):
        self.field = field
        self.discrete = discrete
        if field.is_zero:
            self.mode = "zero"
        elif discrete:
            if field.harmonics is None:
                raise ValueError("channel bases need harmonic fields")
            self.mode = "dirac"
        else:
            if field.harmonics is not None:
                raise DiscreteOffGrid("Dirac spectra cannot be placed on an angular quadrature grid")
            self.mode = "smooth"
            self.y, self.wy = _y_rule(field.decay)

    def profile(self, xs, cs):
        """Lateral profile ``sum_t c_t f(x_t, y)`` (or harmonic masses)."""
        xs = np.asarray(xs, dtype=float).ravel()
        cs = np.asarray(cs).ravel()
        if self.mode == "smooth":
            return cs @ self.field(xs[:, None], self.y[None, :])
        if self.mode == "dirac":
            return np.array([cs @ np.broadcast_to(c(xs), xs.shape) for _, c in self.field.harmonics])
        return None

    def matrix(self, prof, rows, cols):
        rows = np.asarray(rows, dtype=float)
        cols = np.asarray(cols, dtype=float)
        if self.mode == "zero":
            return np.zeros((rows.size, cols.size), dtype=complex)
        if self.mode == "smooth":
            Er = np.exp(-1j * np.outer(rows, self.y))
            Ec = np.exp(-1j * np.outer(cols, self.y))
            return (Er * (prof * self.wy)) @ Ec.conj().T / (2 * np.pi)
        out = np.zeros((rows.size, cols.size), dtype=complex)
        diff = rows[:, None] - cols[None, :]
        for (pm, _), mass in zip(self.field.harmonics, prof):
            out += mass * (np.abs(diff - pm) <= 1e-9 * (1 + abs(pm)))
        return out


class _Fields:
    def __init__(self, ab, discrete):
        self.k = {name: _Kernelizer(f, discrete) for name, f in ab.fields.items()}

    def V(self, xs, cs, rows, cols, kw):
        """Diagonal blocks ``(W, w_alpha)`` of the vertex operator, weighted over depth nodes."""
        v = self.k["v_alpha"].matrix(self.k["v_alpha"].profile(xs, cs), rows, cols)
        b = self.k["w_beta"].matrix(self.k["w_beta"].profile(xs, cs), rows, cols)
        a = self.k["w_alpha"].matrix(self.k["w_alpha"].profile(xs, cs), rows, cols)
        W = np.outer(rows, cols) / kw**2 * v + b
        return W, a


def _check_basis(basis, ab):
    discrete = isinstance(basis, ChannelBasis)
    if discrete:
        if not ab.discrete:
            raise ValueError("channel bases need Dirac spectra")
        return True
    if any(f.harmonics and not f.is_zero for f in ab.fields.values()):
        raise DiscreteOffGrid("Dirac spectra cannot be placed on an angular quadrature grid")
    return False


def w_kernel(x, basis, ab):
    """The pair ``(W(x), w_alpha(x))`` of operator kernels at depth ``x``."""
    discrete = _check_basis(basis, ab)
    W, a = _Fields(ab, discrete).V([x], [1.0], basis.p, basis.p, basis.k)
    return OperatorKernel(W, basis), OperatorKernel(a, basis)


# ---------------------------------------------------------------- series of P and Q


def _cs_coeffs(j, wc2):
    """Order-j coefficients of ``C``, ``varpi^-1 iS`` and ``varpi iS`` (x^j stripped)."""
    z = np.zeros_like(wc2, dtype=complex)
    fac = 1j**j / math.factorial(j)
    if j % 2 == 0:
        return fac * wc2 ** (j // 2), z, z
    return z, fac * wc2 ** ((j - 1) // 2), fac * wc2 ** ((j + 1) // 2)


def _P(j, wc2):
    C, Sm, Sp = _cs_coeffs(j, wc2)
    return [[C, -Sp], [-Sm, C]]


def _Q(j, wc2):
    C, Sm, Sp = _cs_coeffs(j, wc2)
    return [[Sm, C], [C, Sp]]


def _dress(Pc, Vd, Qc):
    """Block matrix ``P diag(V) Q`` with P acting on rows and Q on columns."""
    n, m = Vd[0].shape
    out = np.zeros((2, 2, n, m), dtype=complex)
    for a in range(2):
        for b in range(2):
            for c in range(2):
                out[a, b] += Pc[a][c][:, None] * Vd[c] * Qc[c][b][None, :]
    return out


def _inner_grid(k, ab, basis):
    spectra = [lowfreq.spectrum(f) for f in ab.fields.values() if not f.is_zero]
    Q = max(s.q_max for s in spectra)
    Y = max(f.decay.half_extent() + abs(f.decay.center) for f in ab.fields.values() if not f.is_zero)
    h = 0.9 * np.pi / Y
    lo = min(-k, basis.p.min()) - Q
    hi = max(k, basis.p.max()) + Q
    n = int(np.ceil((hi - lo) / h)) + 1
    q = np.linspace(lo, hi, n)
    w = np.full(n, q[1] - q[0])
    w[0] = w[-1] = 0.5 * (q[1] - q[0])
    return q, w


def _route_b(n, j, basis, ab):
    discrete = _check_basis(basis, ab)
    F = _Fields(ab, discrete)
    k = basis.k
    p = basis.p
    wc2 = basis.wc2
    t, wt = quad.unit_gl(X_NODES)
    if n == 1:
        total = np.zeros((2, 2, p.size, p.size), dtype=complex)
        for j1 in range(j + 1):
            j2 = j - j1
            Vd = F.V(t, wt * t**j, p, p, k)
            total += _dress(_P(j1, wc2), Vd, _Q(j2, wc2))
        return total
    if n == 2 and j == 0:
        if discrete:
            q, wq = basis.p, np.ones(basis.size)
        else:
            q, wq = _inner_grid(k, ab, basis)
        wq2 = 1.0 - (q / k) ** 2
        total = np.zeros((2, 2, p.size, p.size), dtype=complex)
        x2, w2, x1, w1 = quad.triangle_pairs(X_NODES)
        for i in range(X_NODES):
            outer = _dress(_P(0, wc2), F.V([x2[i]], [w2[i]], p, q, k), _Q(0, wq2))
            inner = _dress(_P(0, wq2), F.V(x1[i], w1[i], q, p, k), _Q(0, wc2))
            total += np.einsum("acpq,q,cbqr->abpr", outer, wq, inner, optimize=True)
        return total
    raise ValueError("only (n, j) in {(1, 0), (1, 1), (2, 0)} are supported")


def _moment_matrix(m, basis):
    p = basis.p
    if isinstance(m, media.DiracComb):
        if not len(m.p):
            return np.zeros((p.size, p.size), dtype=complex)
        return m.at(p[:, None] - p[None, :])
    return m.difference_matrix(p, p) / (2 * np.pi)


def _route_a(n, j, basis, ab):
    discrete = _check_basis(basis, ab)
    mt = lowfreq.moment_table(ab)
    k = basis.k
    p = basis.p
    wc2 = basis.wc2
    size = p.size
    out = np.zeros((2, 2, size, size), dtype=complex)

    def Wbar(l):
        return np.outer(p, p) / k**2 * _moment_matrix(mt.get("v_alpha", l), basis) + _moment_matrix(
            mt.get("w_beta", l), basis
        )

    if (n, j) == (1, 0):
        out[0, 1] = Wbar(0)
        out[1, 0] = _moment_matrix(mt.get("w_alpha", 0), basis)
    elif (n, j) == (1, 1):
        a1 = _moment_matrix(mt.get("w_alpha", 1), basis)
        W1 = Wbar(1)
        out[0, 0] = 1j * (W1 - wc2[:, None] * a1)
        out[1, 1] = 1j * (-W1 + a1 * wc2[None, :])
    elif (n, j) == (2, 0):
        if discrete:
            X, Y = _discrete_XY(basis, ab)
        else:
            so = lowfreq.second_order_kernels(p, p, ab, k)
            X = (so["X1"] + so["X2"]) / (2 * np.pi)
            Y = (so["Y1"] + so["Y2"]) / (2 * np.pi)
        out[0, 0] = X
        out[1, 1] = Y
    else:
        raise ValueError("only (n, j) in {(1, 0), (1, 1), (2, 0)} are supported")
    return out


def _discrete_XY(basis, ab):
    p = basis.p
    X = np.zeros((p.size, p.size), dtype=complex)
    Y = np.zeros_like(X)
    for col, pp in enumerate(p):
        so = lowfreq.second_order_kernels(None, pp, ab, basis.k)
        shift = p - pp
        X[:, col] = so["X1"].at(shift) + so["X2"].at(shift)
        Y[:, col] = so["Y1"].at(shift) + so["Y2"].at(shift)
    return X, Y


def _project_blocks(blocks, basis):
    keep = basis.propagating
    return blocks * np.outer(keep, keep)


def _discrepancy(A, B):
    scale = np.max(np.abs(A))
    if scale == 0:
        return float(np.max(np.abs(B)))
    return float(np.max(np.abs(A - B)) / scale)


def script_L(n, j, basis, ab, oracle_tol=ORACLE_TOL, check=True):
    """Expansion block of the Dyson series by both routes.

    Raises :class:`RouteMismatch` when the relative discrepancy exceeds
    ``oracle_tol`` and ``check`` is true.
    """
    a = BlockKernel(_project_blocks(_route_a(n, j, basis, ab), basis), basis)
    b = BlockKernel(_project_blocks(_route_b(n, j, basis, ab), basis), basis)
    d = _discrepancy(a.blocks, b.blocks)
    if check and d > oracle_tol:
        raise RouteMismatch(f"L_{n}^({j}) routes differ by {d:.3e}", d)
    return RouteComparison(a, b, d)


# ---------------------------------------------------------------- N kernels


def assemble_N(m, a, b, L, basis):
    """``N_ab^(m)`` from the expansion blocks; ``L[(n, j)]`` are block arrays."""
    vr = basis.varpi
    inv = np.divide(1.0, vr, out=np.zeros_like(vr), where=vr > 0)
    total = np.zeros((basis.size, basis.size), dtype=complex)
    for n in range(1, m + 1):
        blk = L[(n, m - n)]
        term = (
            (-1) ** (a + b - 1) * blk[0, 0]
            + (-1) ** a * blk[0, 1] * inv[None, :]
            + (-1) ** b * vr[:, None] * blk[1, 0]
            - vr[:, None] * blk[1, 1] * inv[None, :]
        )
        total += 0.5 * 1j**n * term
    return total


def _direct_N(m, a, b, basis, ab):
    """Matrix elements of ``N_ab^(m)`` straight from the moment formulas."""
    mt = lowfreq.moment_table(ab)
    k = basis.k
    p = basis.p
    vr = basis.varpi
    keep = np.outer(basis.propagating, basis.propagating)
    inv = np.divide(1.0, vr, out=np.zeros_like(vr), where=vr > 0)
    Wm = lambda l: np.outer(p, p) / k**2 * _moment_matrix(mt.get("v_alpha", l), basis) + _moment_matrix(
        mt.get("w_beta", l), basis
    )
    am = lambda l: _moment_matrix(mt.get("w_alpha", l), basis)
    if m == 1:
        out = 0.5j * ((-1) ** a * Wm(0) * inv[None, :] + (-1) ** b * vr[:, None] * am(0))
    else:
        blocks = _route_a(2, 0, basis, ab)
        X, Y = blocks[0, 0], blocks[1, 1]
        W1, a1 = Wm(1), am(1)
        wc2 = basis.wc2
        out = 0.5 * ((-1) ** (a + b) * (X + W1 - wc2[:, None] * a1)
                     + vr[:, None] * (Y - W1 + a1 * wc2[None, :]) * inv[None, :])
    return out * keep


def _L_blocks(m, basis, ab):
    need = [(1, 0)] if m == 1 else [(1, 1), (2, 0)]
    return {key: _project_blocks(_route_b(*key, basis, ab), basis) for key in need}


def nab(m, a, b, basis, ab, oracle_tol=ORACLE_TOL, check=True):
    """Kernel of ``N_ab^(m)`` assembled from the quadrature-route blocks.

    With ``check`` the result is compared against the direct matrix-element
    formulas and a :class:`RouteMismatch` is raised beyond ``oracle_tol``.
    """
    if m not in (1, 2) or a not in (1, 2) or b not in (1, 2):
        raise ValueError("m, a, b must each be 1 or 2")
    N = assemble_N(m, a, b, _L_blocks(m, basis, ab), basis)
    if check:
        d = _discrepancy(_direct_N(m, a, b, basis, ab), N)
        if d > oracle_tol:
            raise RouteMismatch(f"N_{a}{b}^({m}) differs from its matrix elements by {d:.3e}", d)
    return OperatorKernel(N, basis)


# ---------------------------------------------------------------- amplitude


_BRANCHES = {
    (1, 1): (1, (1, 1), ((1, 2), (2, 1))),
    (1, -1): (-1, (2, 1), ((2, 2), (2, 1))),
    (-1, 1): (1, (1, 2), ((1, 2), (2, 2))),
    (-1, -1): (-1, (2, 2), ((2, 2), (2, 2))),
}


def _all_N(basis, ab, order):
    L = _L_blocks(1, basis, ab)
    if order == 2:
        L.update(_L_blocks(2, basis, ab))
    N = {}
    for a in (1, 2):
        for b in (1, 2):
            N[(1, a, b)] = assemble_N(1, a, b, L, basis)
            if order == 2:
                N[(2, a, b)] = assemble_N(2, a, b, L, basis)
    return N


def _branch_value(N, basis, key, i_out, i_in, kl, order):
    sgn, single, (left, right) = _BRANCHES[key]
    val = kl * N[(1, *single)][i_out, i_in]
    if order == 2:
        w = basis.weights * basis.propagating
        prod = N[(1, *left)][i_out, :] @ (w * N[(1, *right)][:, i_in])
        val += kl**2 * (N[(2, *single)][i_out, i_in] + prod)
    return sgn, val


def series_amplitude(theta0, thetas, k, ab, kl, order=2, nodes=48):
    """Amplitude from the operator series, truncated at ``kl**order``.

    Smooth media are sampled at ``thetas``; Dirac media return channels
    (``thetas`` is then ignored).
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    kin = lowfreq.ScatterKinematics(k, theta0, thetas)
    c0 = kin.c0
    p0 = kin.p0
    scale = math.sqrt(2 * math.pi) * k * abs(c0)
    side0 = 1 if c0 > 0 else -1
    if ab.discrete:
        basis = channel_basis(k, p0, ab, depth=2)
        N = _all_N(basis, ab, order)
        i_in = basis.index(p0)
        chans = []
        for i_out in np.flatnonzero(basis.propagating):
            s = basis.p[i_out] / k
            cabs = math.sqrt(1 - s * s)
            for side in (1, -1):
                sgn, val = _branch_value(N, basis, (side0, side), i_out, i_in, kl, order)
                theta = math.asin(s) if side == 1 else math.pi - math.asin(s)
                weight = 1j * sgn * scale * val / (k * cabs)
                chans.append(lowfreq.DiracChannel(theta, complex(weight), float(basis.p[i_out] - p0), side))
        chans.sort(key=lambda ch: (ch.shift, -ch.side))
        return lowfreq.Amplitude(np.zeros(0), np.zeros(0, dtype=complex), tuple(chans))
    probes = np.concatenate([kin.p1, [p0]])
    basis = angular_grid(k, nodes, probes)
    N = _all_N(basis, ab, order)
    i_in = basis.size - 1
    values = np.empty(kin.theta.size, dtype=complex)
    for t, c in enumerate(kin.c):
        sgn, val = _branch_value(N, basis, (side0, 1 if c > 0 else -1), nodes + t, i_in, kl, order)
        values[t] = 1j * sgn * scale * val
    return lowfreq.Amplitude(kin.theta, values)
