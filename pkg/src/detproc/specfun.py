"""Special functions, oscillator eigenfunctions, and transition densities.

The oscillator eigenfunctions are Gaussian/Laguerre-weighted orthonormal
polynomial families evaluated by three-term recurrences that carry a
binary exponent alongside the mantissa at every step, so degrees up to
10^4 and arguments up to a few hundred neither overflow nor underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from .errors import (
    CapacityError,
    DistributionalBranchError,
    DomainError,
)

__all__ = [
    "OscillatorIndex",
    "DEGREE_CAP",
    "hermite_phi",
    "hermite_phi_table",
    "laguerre_phi",
    "laguerre_phi_table",
    "airy",
    "airy_prime",
    "bessel_j",
    "heat_kernel_psin",
    "bessel_transition",
    "bessel_transition_continued",
    "drift_kernel_q",
]

#: Largest supported polynomial degree for the oscillator recurrences.
DEGREE_CAP = 10_000

#: ldexp exponents are clipped here; 2^(-2000) underflows to zero, which is
#: the correct limit for far-tail oscillator values.
_EXP_CLIP = 2000


@dataclass(frozen=True)
class OscillatorIndex:
    """Degree (and optional Laguerre parameter) of an oscillator function.

    Attributes
    ----------
    k : int
        Polynomial degree, ``k >= 0``.
    nu : float or None
        Laguerre parameter ``> -1``; ``None`` selects the Hermite family.
    """

    k: int
    nu: float | None = None

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 0:
            raise DomainError("oscillator degree must be a nonnegative integer")
        if self.k > DEGREE_CAP:
            raise CapacityError(f"degree {self.k} exceeds cap {DEGREE_CAP}")
        if self.nu is not None and not self.nu > -1:
            raise DomainError("Laguerre parameter must satisfy nu > -1")


def _check_degree(k: int) -> int:
    k = int(k)
    if k < 0:
        raise DomainError("degree must be >= 0")
    if k > DEGREE_CAP:
        raise CapacityError(f"degree {k} exceeds cap {DEGREE_CAP}")
    return k


def _ldexp_clipped(mant: np.ndarray, expo: np.ndarray) -> np.ndarray:
    return np.ldexp(mant, np.clip(expo, -_EXP_CLIP, _EXP_CLIP).astype(np.int64))


# ---------------------------------------------------------------------------
# Hermite-weighted oscillator functions
# ---------------------------------------------------------------------------

def hermite_phi_table(kmax: int, x) -> np.ndarray:
    """All Gaussian-weighted Hermite oscillator values up to degree ``kmax``.

    Row ``k`` holds ``pi^{-1/4} (2^k k!)^{-1/2} H_k(x) exp(-x^2/2)`` for the
    physicists' Hermite polynomial ``H_k``, evaluated at every entry of
    ``x``.  The recurrence runs on (mantissa, exponent) pairs so the
    Gaussian weight never underflows before the polynomial growth can
    compensate.

    Parameters
    ----------
    kmax : int
        Largest degree, ``0 <= kmax <= DEGREE_CAP``.
    x : array_like
        Evaluation points.

    Returns
    -------
    numpy.ndarray with shape ``(kmax + 1, len(x))``.
    """
    kmax = _check_degree(kmax)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1:
        raise DomainError("x must be scalar or one-dimensional")
    if x.size and not np.all(np.isfinite(x)):
        raise DomainError("x must be finite")
    n = x.size
    out = np.empty((kmax + 1, n))

    # Degree 0 in (mantissa, base-2 exponent) form: pi^{-1/4} e^{-x^2/2}.
    e_real = -x * x / 2.0 / math.log(2.0)
    e = np.floor(e_real)
    m = math.pi ** (-0.25) * np.exp2(e_real - e)
    m_prev = np.zeros(n)
    e_prev = np.zeros(n)
    out[0] = _ldexp_clipped(m, e)

    for k in range(kmax):
        c1 = math.sqrt(2.0 / (k + 1.0))
        c2 = math.sqrt(k / (k + 1.0))
        # Align the previous-degree term onto the current exponent.
        m_new = c1 * x * m - c2 * m_prev * np.exp2(np.clip(e_prev - e, -60.0, 60.0))
        m_prev, e_prev = m, e
        mant, ex = np.frexp(m_new)
        m = mant
        e = e + ex
        row = _ldexp_clipped(m, e)
        out[k + 1] = np.where(m == 0.0, 0.0, row)
    return out


def hermite_phi(k: int, x):
    """Gaussian-weighted Hermite oscillator function of degree ``k``.

    Returns ``pi^{-1/4} (2^k k!)^{-1/2} H_k(x) exp(-x^2/2)``; scalar in,
    scalar out.
    """
    k = _check_degree(k)
    scalar = np.isscalar(x) or np.ndim(x) == 0
    table = hermite_phi_table(k, x)
    val = table[k]
    return float(val[0]) if scalar else val


# ---------------------------------------------------------------------------
# Laguerre-weighted oscillator functions
# ---------------------------------------------------------------------------

def laguerre_phi_table(kmax: int, nu: float, x) -> np.ndarray:
    """All Laguerre-weighted oscillator values up to degree ``kmax``.

    Row ``k`` holds
    ``sqrt(k! / Gamma(k + nu + 1)) x^{nu/2} L_k^{nu}(x) exp(-x/2)``,
    evaluated with the same mantissa/exponent-carrying scheme as the
    Hermite table.

    Parameters
    ----------
    kmax : int
        Largest degree, ``0 <= kmax <= DEGREE_CAP``.
    nu : float
        Parameter ``> -1``.
    x : array_like
        Nonnegative evaluation points.

    Returns
    -------
    numpy.ndarray with shape ``(kmax + 1, len(x))``.
    """
    kmax = _check_degree(kmax)
    if not nu > -1:
        raise DomainError("laguerre_phi requires nu > -1")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1:
        raise DomainError("x must be scalar or one-dimensional")
    if x.size and (not np.all(np.isfinite(x)) or np.any(x < 0)):
        raise DomainError("x must be finite and >= 0")
    n = x.size
    out = np.empty((kmax + 1, n))

    pos = x > 0.0
    xp = np.where(pos, x, 1.0)  # placeholder at zero, fixed below
    e_real = ((nu / 2.0) * np.log(xp) - xp / 2.0 - 0.5 * _sp.gammaln(nu + 1.0)) / math.log(2.0)
    e = np.floor(e_real)
    m = np.exp2(e_real - e)
    m_prev = np.zeros(n)
    e_prev = np.zeros(n)
    out[0] = _ldexp_clipped(m, e)

    for k in range(kmax):
        denom = math.sqrt((k + 1.0) * (k + 1.0 + nu))
        a = (2.0 * k + nu + 1.0 - xp) / denom
        b = math.sqrt(k * (k + nu)) / denom
        m_new = a * m - b * m_prev * np.exp2(np.clip(e_prev - e, -60.0, 60.0))
        m_prev, e_prev = m, e
        mant, ex = np.frexp(m_new)
        m = mant
        e = e + ex
        row = _ldexp_clipped(m, e)
        out[k + 1] = np.where(m == 0.0, 0.0, row)

    if np.any(~pos):
        # x = 0 limits: the weight factor x^{nu/2} sends every row to zero
        # for nu > 0, leaves the polynomial value for nu = 0, and diverges
        # for nu < 0 (the integrable edge singularity).
        if nu > 0:
            out[:, ~pos] = 0.0
        elif nu < 0:
            out[:, ~pos] = np.inf
        else:
            kk = np.arange(kmax + 1)
            out[:, ~pos] = 1.0  # L_k(0) = 1 and the Gamma ratio is 1
            del kk
    return out


def laguerre_phi(k: int, nu: float, x):
    """Laguerre-weighted oscillator function of degree ``k``; see the table."""
    k = _check_degree(k)
    scalar = np.isscalar(x) or np.ndim(x) == 0
    table = laguerre_phi_table(k, nu, x)
    val = table[k]
    return float(val[0]) if scalar else val


# ---------------------------------------------------------------------------
# Airy and Bessel functions
# ---------------------------------------------------------------------------

def airy(x):
    """Airy function ``Ai`` on the real line (vectorized)."""
    ai, _, _, _ = _sp.airy(x)
    return ai


def airy_prime(x):
    """Derivative ``Ai'`` of the Airy function (vectorized)."""
    _, aip, _, _ = _sp.airy(x)
    return aip


_SERIES_CUTOFF = 8.0
_SERIES_MAX_TERMS = 200


def _bessel_j_series(nu: float, x: np.ndarray) -> np.ndarray:
    """Ascending power series for ``J_nu`` on moderate arguments."""
    half = x / 2.0
    with np.errstate(divide="ignore"):
        log_t0 = nu * np.log(np.where(half > 0, half, 1.0)) - _sp.gammaln(nu + 1.0)
    term = np.exp(log_t0)
    if nu > 0:
        term = np.where(x == 0.0, 0.0, term)
    elif nu < 0:
        term = np.where(x == 0.0, np.inf, term)
    total = term.copy()
    q = half * half
    for n in range(_SERIES_MAX_TERMS):
        term = -term * q / ((n + 1.0) * (n + 1.0 + nu))
        total += term
        if np.all(np.abs(term) <= 1e-17 * (np.abs(total) + 1e-300)):
            break
    return total


def bessel_j(nu: float, x):
    """Bessel function of the first kind ``J_nu(x)`` for ``nu > -1, x >= 0``.

    Moderate arguments use the ascending series; large arguments defer to
    the library Bessel implementation.  Vectorized over ``x``.
    """
    if not nu > -1:
        raise DomainError("bessel_j requires nu > -1")
    scalar = np.isscalar(x) or np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise DomainError("bessel_j requires finite x >= 0")
    out = np.empty_like(x)
    zero = x == 0.0
    if np.any(zero):
        out[zero] = 0.0 if nu > 0 else (1.0 if nu == 0.0 else np.inf)
    small = (x <= _SERIES_CUTOFF) & ~zero
    if np.any(small):
        out[small] = _bessel_j_series(nu, x[small])
    if np.any(~small):
        out[~small] = _sp.jv(nu, x[~small])
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Transition densities
# ---------------------------------------------------------------------------

def heat_kernel_psin(t: float, x, y):
    """Gaussian transition density with signed time and complex arguments.

    Returns ``(2 pi |t|)^{-1/2} exp(-(x - y)^2 / (2 t))``.  Negative ``t``
    and complex positions are supported because the configuration-indexed
    kernels integrate this factor along the imaginary axis.

    Raises
    ------
    DistributionalBranchError
        If ``t == 0`` (the kernel degenerates to a point mass).
    """
    if t == 0.0:
        raise DistributionalBranchError(
            "zero-time heat kernel is a point mass, not a function"
        )
    d = np.asarray(x) - np.asarray(y)
    val = np.exp(-(d * d) / (2.0 * t)) / math.sqrt(2.0 * math.pi * abs(t))
    if np.ndim(val) == 0:
        v = complex(val)
        return v if v.imag != 0.0 else v.real
    return val


def bessel_transition(nu: float, t: float, x: float, y):
    """Squared-Bessel transition density from ``x`` to ``y`` over time ``t``.

    For index ``nu > -1`` this is the density of the ``2(nu+1)``-dimensional
    squared-radius diffusion:

    * started at ``x = 0``:  ``y^nu / ((2|t|)^{nu+1} Gamma(nu+1)) e^{-y/(2t)}``;
    * started at ``x > 0``:  ``(2|t|)^{-1} (y/x)^{nu/2} e^{-(x+y)/(2t)}
      I_nu(sqrt(x y)/|t|)``,

    evaluated through the exponentially-scaled modified Bessel function so
    the product never overflows.  Vectorized over ``y``.

    Raises
    ------
    DistributionalBranchError
        If ``t == 0``.
    DomainError
        If ``nu <= -1`` or ``x < 0`` or any ``y < 0``.
    """
    if not nu > -1:
        raise DomainError("bessel_transition requires nu > -1")
    if t == 0.0:
        raise DistributionalBranchError(
            "zero-time transition is a point mass, not a function"
        )
    if x < 0:
        raise DomainError("bessel_transition requires x >= 0")
    scalar = np.isscalar(y) or np.ndim(y) == 0
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(y < 0):
        raise DomainError("bessel_transition requires y >= 0; "
                          "see bessel_transition_continued for y < 0")
    at = abs(t)
    if x == 0.0:
        with np.errstate(divide="ignore"):
            logy = np.log(np.where(y > 0, y, 1.0))
        val = np.exp(
            nu * logy - (nu + 1.0) * math.log(2.0 * at)
            - _sp.gammaln(nu + 1.0) - y / (2.0 * t)
        )
        if nu > 0:
            val = np.where(y == 0.0, 0.0, val)
        elif nu < 0:
            val = np.where(y == 0.0, np.inf, val)
    else:
        z = np.sqrt(x * y) / at
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(y > 0, (y / x) ** (nu / 2.0), 0.0 if nu > 0 else np.inf)
            if nu == 0.0:
                ratio = np.ones_like(y)
        # ive(nu, z) = I_nu(z) e^{-z}; exponents recombined in one exp call.
        val = ratio * _sp.ive(nu, z) * np.exp(z - (x + y) / (2.0 * t)) / (2.0 * at)
    return float(val[0]) if scalar else val


def bessel_transition_continued(nu: float, t: float, x: float, y):
    """Continuation of :func:`bessel_transition` to negative end positions.

    On ``y < 0`` the half-integer powers are continued so that the modified
    Bessel function becomes an ordinary one, ``J_nu``, and the branch
    orientation is fixed by a normalization requirement rather than left
    free: the continued backward-time factor must integrate to one over the
    negative half-line,

        ``integral_{-inf}^0 bessel_transition_continued(nu, -t, y, u) du = 1``

    for every ``t > 0`` and ``y >= 0``.  That is the condition under which
    the space-time kernels built from this factor reduce to the plain
    Markov transition in the one-particle case.  The resulting value is
    real for every index; a phase-carrying orientation of the same powers
    would multiply it by ``exp(i pi nu)``.  Vectorized over ``y``.
    """
    if not nu > -1:
        raise DomainError("bessel_transition_continued requires nu > -1")
    if t == 0.0:
        raise DistributionalBranchError(
            "zero-time transition is a point mass, not a function"
        )
    if x < 0:
        raise DomainError("bessel_transition_continued requires x >= 0")
    scalar = np.isscalar(y) or np.ndim(y) == 0
    y = np.atleast_1d(np.asarray(y, dtype=float))
    out = np.empty(y.shape, dtype=float)
    pos = y >= 0.0
    if np.any(pos):
        out[pos] = bessel_transition(nu, t, x, y[pos])
    if np.any(~pos):
        yn = y[~pos]
        at = abs(t)
        if x == 0.0:
            out[~pos] = np.exp(
                nu * np.log(-yn)
                - (nu + 1.0) * math.log(2.0 * at)
                - _sp.gammaln(nu + 1.0)
                - yn / (2.0 * t)
            )
        else:
            z = np.sqrt(x * (-yn)) / at
            out[~pos] = (
                (-yn / x) ** (nu / 2.0)
                * _sp.jv(nu, z)
                * np.exp(-(x + yn) / (2.0 * t))
                / (2.0 * at)
            )
    if scalar:
        return float(out[0])
    return out


def drift_kernel_q(s: float, t: float, d):
    """Transition factor of Brownian motion carrying the parabolic drift.

    For the process ``B(t) + t^2/4`` the transition from time ``s`` to time
    ``t`` with displacement ``d`` is

    ``(2 pi |t-s|)^{-1/2} exp[-d^2/(2(t-s)) + (t+s) d/4 - (t-s)(t+s)^2/32]``.

    Equivalently this equals the plain heat kernel evaluated between the
    drift-corrected endpoints; complex displacements are supported for the
    imaginary-axis integrations.

    Raises
    ------
    DistributionalBranchError
        If ``s == t``.
    """
    if s == t:
        raise DistributionalBranchError(
            "equal-time drift kernel is a point mass, not a function"
        )
    d = np.asarray(d)
    dt = t - s
    val = np.exp(
        -(d * d) / (2.0 * dt) + (t + s) * d / 4.0 - dt * (t + s) ** 2 / 32.0
    ) / math.sqrt(2.0 * math.pi * abs(dt))
    if np.ndim(val) == 0:
        v = complex(val)
        return v if v.imag != 0.0 else v.real
    return val
