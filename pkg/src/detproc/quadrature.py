"""Quadrature rules shared across the library.

Thin wrappers over ``numpy.polynomial`` Gaussian rules, plus composite
panel builders tuned for the oscillatory/decaying integrands that appear
in extended correlation kernels.
"""

from __future__ import annotations

import numpy as np
from scipy import special as _sp

from .errors import ValidationError

__all__ = [
    "gauss_legendre",
    "gauss_jacobi_01",
    "gauss_legendre_panels",
    "gauss_hermite_folded",
    "gauss_laguerre_folded",
    "panels_by_wavelength",
]


def gauss_legendre(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss–Legendre nodes and weights on the interval ``[a, b]``.

    Returns
    -------
    (nodes, weights) : tuple of numpy.ndarray
        ``sum(w * f(x))`` integrates polynomials of degree ``2n-1`` exactly.
    """
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ValidationError("gauss_legendre requires finite endpoints")
    if n < 1:
        raise ValidationError("gauss_legendre requires n >= 1")
    x, w = np.polynomial.legendre.leggauss(int(n))
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


def gauss_jacobi_01(n: int, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Jacobi rule on ``[0, 1]`` with the weight ``u^beta`` folded in.

    Returns ``(u, w)`` such that ``sum(w * g(u))`` approximates
    ``integral_0^1 u^beta g(u) du`` spectrally for smooth ``g``; the
    algebraic endpoint factor is part of the weights, so ``g`` need not
    vanish at 0.  Requires ``beta > -1``.
    """
    if n < 1:
        raise ValidationError("quadrature order must be positive")
    if not beta > -1:
        raise ValidationError("Jacobi exponent must exceed -1")
    x, w = _sp.roots_jacobi(n, 0.0, beta)
    u = 0.5 * (x + 1.0)
    return u, w * 2.0 ** (-beta - 1.0)


def gauss_legendre_panels(
    edges: np.ndarray, n_per_panel: int
) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss–Legendre rule over consecutive panels.

    Parameters
    ----------
    edges : array
        Increasing breakpoints; panel ``i`` is ``[edges[i], edges[i+1]]``.
    n_per_panel : int
        Nodes per panel.
    """
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValidationError("edges must be strictly increasing with >= 2 entries")
    x0, w0 = np.polynomial.legendre.leggauss(int(n_per_panel))
    mids = 0.5 * (edges[1:] + edges[:-1])
    halves = 0.5 * np.diff(edges)
    nodes = (mids[:, None] + halves[:, None] * x0[None, :]).ravel()
    weights = (halves[:, None] * w0[None, :]).ravel()
    return nodes, weights


def gauss_hermite_folded(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss–Hermite rule with the ``exp(-x^2)`` weight folded out.

    Returns nodes ``x_i`` and weights ``W_i = w_i * exp(x_i^2)`` such that
    ``sum(W * f(x)) ~ integral of f over the real line`` for integrands that
    decay at least as fast as a Gaussian.  The fold is done in log space so
    that large-``n`` rules do not overflow.
    """
    if n < 1:
        raise ValidationError("gauss_hermite_folded requires n >= 1")
    x, w = np.polynomial.hermite.hermgauss(int(n))
    return x, np.exp(np.log(w) + x * x)


def gauss_laguerre_folded(n: int, alpha: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Generalized Gauss–Laguerre rule with ``x^alpha e^{-x}`` folded out.

    Returns nodes and weights ``W_i`` such that ``sum(W * f(x))`` integrates
    ``f`` over ``[0, inf)`` for integrands with at least Laguerre-type decay.
    """
    if n < 1:
        raise ValidationError("gauss_laguerre_folded requires n >= 1")
    if alpha <= -1:
        raise ValidationError("gauss_laguerre_folded requires alpha > -1")
    from scipy.special import roots_genlaguerre

    x, w = roots_genlaguerre(int(n), alpha)
    return x, np.exp(np.log(w) + x - alpha * np.log(np.where(x > 0, x, 1.0)))


def panels_by_wavelength(
    a: float,
    b: float,
    local_wavelength,
    min_panels: int = 1,
    max_panels: int = 4000,
    panels_per_wave: float = 2.0,
) -> np.ndarray:
    """Breakpoints for a composite rule adapted to an oscillatory integrand.

    ``local_wavelength(x)`` estimates the oscillation period near ``x``;
    panel widths are kept below ``wavelength / panels_per_wave`` so that a
    fixed-order Gauss rule per panel resolves the phase.
    """
    if b <= a:
        raise ValidationError("panels_by_wavelength requires b > a")
    edges = [float(a)]
    x = float(a)
    for _ in range(max_panels):
        wav = float(local_wavelength(x))
        step = max(wav / panels_per_wave, (b - a) / max_panels)
        x = min(x + step, b)
        edges.append(x)
        if x >= b:
            break
    else:
        edges.append(float(b))
    edges = np.unique(np.asarray(edges))
    if edges.size - 1 < min_panels:
        edges = np.linspace(a, b, min_panels + 1)
    return edges
