"""Gauss-Legendre building blocks shared by the numerical modules."""

import functools

import numpy as np
from numpy.polynomial import legendre


@functools.lru_cache(maxsize=64)
def _gl_reference(n):
    x, w = legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n, a=-1.0, b=1.0):
    """Nodes and weights of the n-point Gauss-Legendre rule on [a, b]."""
    x, w = _gl_reference(n)
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * x, half * w


def composite_gauss_legendre(breaks, order):
    """Composite rule with one ``order``-point panel between consecutive breakpoints."""
    breaks = np.asarray(breaks, dtype=float)
    x, w = _gl_reference(order)
    a, b = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b) + half * x).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def panel_breaks(a, b, width, anchors=()):
    """Breakpoints covering [a, b] with panels no wider than ``width``.

    Extra ``anchors`` inside the interval (kinks of the integrand) become
    panel boundaries as well.
    """
    pts = sorted({float(a), float(b), *(float(t) for t in anchors if a < t < b)})
    out = [pts[0]]
    for lo, hi in zip(pts[:-1], pts[1:]):
        n = max(1, int(np.ceil((hi - lo) / width - 1e-12)))
        out.extend(np.linspace(lo, hi, n + 1)[1:])
    return np.asarray(out)


@functools.lru_cache(maxsize=16)
def unit_gl(n):
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = gauss_legendre(n, 0.0, 1.0)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@functools.lru_cache(maxsize=16)
def cumulative_matrix(n):
    """Spectral integration matrix on the n-point rule of [0, 1].

    ``S @ g(x)`` approximates ``G(x_i) = integral_0^{x_i} g(t) dt``, exactly
    when g is a polynomial of degree below n.
    """
    u, wu = _gl_reference(n)
    vander = legendre.legvander(u, n - 1)
    # discrete orthogonality of the Legendre polynomials gives the inverse
    inv = (np.arange(n) + 0.5)[:, None] * vander.T * wu[None, :]
    lint = np.empty((n, n))
    for m in range(n):
        c = np.zeros(n)
        c[m] = 1.0
        lint[:, m] = legendre.legval(u, legendre.legint(c, lbnd=-1.0))
    S = 0.5 * lint @ inv
    S.setflags(write=False)
    return S


def triangle_pairs(n):
    """Tensor rule for the ordered region 0 <= x1 <= x2 <= 1.

    Returns ``(x2, w2, x1, w1)`` where ``x1[i]`` and ``w1[i]`` hold the inner
    rule mapped onto [0, x2[i]].
    """
    x, w = unit_gl(n)
    x1 = x[:, None] * x[None, :]
    w1 = x[:, None] * w[None, :]
    return x, w, x1, w1
