"""Correlation kernels: static limits, space-time extensions, finite-rank
families, and configuration-indexed kernels.

Conventions
-----------
* Vector position arguments are treated as *grid axes*: a kernel called
  with ``x`` of length ``n`` and ``y`` of length ``m`` returns an
  ``(n, m)`` matrix; scalars in, scalar out.
* Extended kernels take two time arguments and reduce to their static
  counterparts at equal times.
* All quadrature-backed branches truncate using explicit decay bounds and
  raise :class:`~detproc.errors.QuadratureError` when a requested regime
  would need an unreasonable panel budget.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special as _sp

from .configuration import Configuration
from .errors import (
    DomainError,
    QuadratureError,
    TruncationError,
    UnsupportedConfigurationError,
    ValidationError,
)
from .quadrature import (
    gauss_jacobi_01,
    gauss_legendre,
    gauss_legendre_panels,
    panels_by_wavelength,
)
from .specfun import (
    DEGREE_CAP,
    airy as _airy,
    airy_prime as _airy_prime,
    bessel_transition,
    bessel_transition_continued,
    drift_kernel_q,
    heat_kernel_psin,
    hermite_phi_table,
    laguerre_phi_table,
)

__all__ = [
    "SpaceTimePoint",
    "KernelFamily",
    "DriftDensity",
    "KernelSpec",
    "sine_kernel",
    "extended_sine_kernel",
    "airy_kernel",
    "extended_airy_kernel",
    "airy_density",
    "bessel_kernel",
    "extended_bessel_kernel",
    "finite_hermite_kernel",
    "finite_laguerre_kernel",
    "christoffel_darboux",
    "gue_density",
    "semicircle",
    "semicircle_edge",
    "rho_A",
    "bulk_time",
    "hard_edge_time",
    "soft_edge_time",
    "config_kernel",
    "write_kernel_csv",
]


# ---------------------------------------------------------------------------
# Basic types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpaceTimePoint:
    """A (time, position) pair indexing an extended kernel."""

    t: float
    x: float

    def __post_init__(self):
        if not (np.isfinite(self.t) and np.isfinite(self.x)):
            raise ValidationError("space-time coordinates must be finite")


class KernelFamily(Enum):
    """The implemented kernel families."""

    SINE = "sine"
    AIRY = "airy"
    BESSEL = "bessel"
    HERMITE_N = "hermiteN"
    LAGUERRE_N = "laguerreN"
    CONFIG_DYSON = "config_dyson"
    CONFIG_BESQ = "config_besq"
    CONFIG_DRIFTED = "config_drifted"


# ---------------------------------------------------------------------------
# Grid-axis helpers
# ---------------------------------------------------------------------------

def _as_axis(v) -> tuple[np.ndarray, bool]:
    scalar = np.isscalar(v) or np.ndim(v) == 0
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    if arr.ndim != 1:
        raise DomainError("positions must be scalars or one-dimensional arrays")
    return arr, scalar


def _unpack(mat: np.ndarray, sx: bool, sy: bool):
    if sx and sy:
        return float(mat[0, 0])
    if sx:
        return mat[0]
    if sy:
        return mat[:, 0]
    return mat


# ---------------------------------------------------------------------------
# Sine family
# ---------------------------------------------------------------------------

def sine_kernel(x, y):
    """Translation-invariant density-one kernel ``sin(pi(y-x))/(pi(y-x))``."""
    xa, sx = _as_axis(x)
    ya, sy = _as_axis(y)
    d = ya[None, :] - xa[:, None]
    out = np.where(d == 0.0, 1.0, np.sinc(d))
    return _unpack(out, sx, sy)


def extended_sine_kernel(s: float, x, t, y, nodes_per_panel: int = 16):
    """Space-time sine kernel.

    Branches on the time order: equal times reduce to :func:`sine_kernel`;
    ``t > s`` integrates ``exp(pi^2 u^2 (t-s)/2) cos(pi u (y-x))`` over
    ``u in [0, 1]``; ``t < s`` integrates the same integrand over
    ``(1, inf)`` with a flipped sign, truncated by its Gaussian decay.
    """
    if s < 0 or t < 0:
        raise DomainError("extended_sine_kernel requires s, t >= 0")
    xa, sx = _as_axis(x)
    ya, sy = _as_axis(y)
    delta = t - s
    if delta == 0.0:
        return _unpack(np.where(
            (ya[None, :] - xa[:, None]) == 0.0,
            1.0,
            np.sinc(ya[None, :] - xa[:, None]),
        ), sx, sy)

    d = ya[None, :] - xa[:, None]
    dmax = float(np.max(np.abs(d))) if d.size else 0.0
    if delta > 0.0:
        n_panels = max(2, int(math.ceil(dmax)) + 1)
        edges = np.linspace(0.0, 1.0, n_panels + 1)
    else:
        u_hi = math.sqrt(1.0 + 84.0 / (math.pi**2 * (-delta)))
        edges = panels_by_wavelength(
            1.0,
            u_hi,
            lambda _u: 2.0 / max(1.0, dmax),
            min_panels=6,
        )
        if edges.size > 4001:
            raise QuadratureError(
                "time separation too small for the exterior branch "
                f"(needs {edges.size - 1} panels)"
            )
    u, w = gauss_legendre_panels(edges, nodes_per_panel)
    gauss = np.exp(math.pi**2 * u * u * delta / 2.0) * w
    phase = np.cos(math.pi * u[:, None] * d.reshape(1, -1))
    out = (gauss @ phase).reshape(d.shape)
    if delta < 0.0:
        out = -out
    return _unpack(out, sx, sy)


# ---------------------------------------------------------------------------
# Airy family
# ---------------------------------------------------------------------------

def airy_density(x):
    """Edge density ``Ai'(x)^2 - x Ai(x)^2`` (diagonal of the Airy kernel)."""
    x = np.asarray(x, dtype=float)
    ai = _airy(x)
    aip = _airy_prime(x)
    out = aip * aip - x * ai * ai
    return float(out) if out.ndim == 0 else out


def airy_kernel(x, y):
    """Edge-scaling kernel ``(Ai(x)Ai'(y) - Ai(y)Ai'(x)) / (x - y)``.

    The coincident-point limit is evaluated through :func:`airy_density`.
    """
    xa, sx = _as_axis(x)
    ya, sy = _as_axis(y)
    ai_x, aip_x = _airy(xa), _airy_prime(xa)
    ai_y, aip_y = _airy(ya), _airy_prime(ya)
    d = xa[:, None] - ya[None, :]
    near = np.abs(d) < 1e-8
    with np.errstate(divide="ignore", invalid="ignore"):
        off = (
            ai_x[:, None] * aip_y[None, :] - ai_y[None, :] * aip_x[:, None]
        ) / d
    mid = 0.5 * (xa[:, None] + ya[None, :])
    out = np.where(near, airy_density(mid), off)
    return _unpack(out, sx, sy)


def _airy_forward_rule(x_min: float, delta: float):
    """Panels for ``int_0^inf e^{-u delta/2} Ai(u+x) Ai(u+y) du``."""
    upper = 22.0 + max(0.0, -x_min)
    edges = panels_by_wavelength(
        0.0,
        upper,
        lambda u: (
            math.pi / math.sqrt(abs(u + x_min) + 1.0)
            if u + x_min < 0
            else 2.0
        ),
        min_panels=8,
    )
    return gauss_legendre_panels(edges, 16)


def _airy_backward_rule(delta: float):
    """Panels for ``int_{-inf}^0 e^{-u delta/2} (...) du`` with ``delta < 0``."""
    lower = -(80.0 / (-delta) + 10.0)
    edges = panels_by_wavelength(
        lower,
        0.0,
        lambda u: math.pi / math.sqrt(abs(u) + 5.0),
        min_panels=8,
    )
    if edges.size > 4001:
        raise QuadratureError(
            "time separation too small for the exterior branch "
            f"(needs {edges.size - 1} panels)"
        )
    return gauss_legendre_panels(edges, 16)


def extended_airy_kernel(s: float, x, t, y):
    """Space-time Airy kernel.

    For ``t >= s`` integrates ``e^{-u(t-s)/2} Ai(u+x) Ai(u+y)`` over
    ``u in [0, inf)`` (at ``t == s`` this is the static kernel); for
    ``t < s`` the same integrand is integrated over ``(-inf, 0]`` with a
    flipped sign.
    """
    xa, sx = _as_axis(x)
    ya, sy = _as_axis(y)
    delta = t - s
    x_min = float(min(xa.min(), ya.min())) if xa.size and ya.size else 0.0
    if delta >= 0.0:
        u, w = _airy_forward_rule(x_min, delta)
        sign = 1.0
    else:
        u, w = _airy_backward_rule(delta)
        sign = -1.0
    decay = w * np.exp(-u * delta / 2.0)
    a_x = _airy(u[:, None] + xa[None, :])
    a_y = _airy(u[:, None] + ya[None, :])
    out = sign * np.einsum("k,ki,kj->ij", decay, a_x, a_y)
    return _unpack(out, sx, sy)


# ---------------------------------------------------------------------------
# Bessel family
# ---------------------------------------------------------------------------

def _bessel_h(nu: float, x: np.ndarray) -> np.ndarray:
    """``sqrt(x) * J_nu'(2 sqrt(x))`` with its ``x -> 0`` limit for nu >= 0."""
    z = 2.0 * np.sqrt(x)
    with np.errstate(invalid="ignore"):
        jp = 0.5 * (_sp.jv(nu - 1.0, z) - _sp.jv(nu + 1.0, z))
        out = np.sqrt(x) * jp
    return np.where(x == 0.0, 0.0, out)


def bessel_kernel(nu: float, x, y):
    """Hard-edge kernel for index ``nu > -1`` on ``[0, inf)^2``.

    Off the diagonal this is
    ``(J_nu(2 sqrt(x)) sqrt(y) J_nu'(2 sqrt(y)) - (x <-> y)) / (x - y)``;
    the diagonal uses the division-free form
    ``J_nu(2 sqrt(x))^2 - J_{nu+1}(2 sqrt(x)) J_{nu-1}(2 sqrt(x))``.
    """
    if not nu > -1:
        raise DomainError("bessel_kernel requires nu > -1")
    xa, sx = _as_axis(x)
    ya, sy = _as_axis(y)
    if np.any(xa < 0) or np.any(ya < 0):
        raise DomainError("bessel_kernel requires x, y >= 0")
    if nu < 0 and (np.any(xa == 0.0) or np.any(ya == 0.0)):
        raise DomainError(
            "bessel_kernel diverges at the hard wall for negative index"
        )
    jx = _sp.jv(nu, 2.0 * np.sqrt(xa))
    jy = _sp.jv(nu, 2.0 * np.sqrt(ya))
    hx = _bessel_h(nu, xa)
    hy = _bessel_h(nu, ya)
    d = xa[:, None] - ya[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        off = (jx[:, None] * hy[None, :] - jy[None, :] * hx[:, None]) / d
    mid = 0.5 * (xa[:, None] + ya[None, :])
    out = np.where(np.abs(d) < 1e-9 * np.maximum(1.0, mid), _bessel_diag(nu, mid), off)
    return _unpack(out, sx, sy)


def _bessel_diag(nu: float, x: np.ndarray) -> np.ndarray:
    z = 2.0 * np.sqrt(x)
    with np.errstate(invalid="ignore"):
        val = _sp.jv(nu, z) ** 2 - _sp.jv(nu + 1.0, z) * _sp.jv(nu - 1.0, z)
    zero_val = 1.0 if nu == 0.0 else 0.0
    return np.where(x == 0.0, zero_val, val)


def extended_bessel_kernel(nu: float, s: float, x, t, y):
    """Space-time hard-edge kernel.

    Branches: ``s < t`` integrates ``e^{-2u(s-t)} J_nu(2 sqrt(ux))
    J_nu(2 sqrt(uy))`` over ``u in [0, 1]``; equal times give
    :func:`bessel_kernel`; ``s > t`` integrates over ``(1, inf)`` with a
    flipped sign, truncated by the exponential decay.

    The interior integrand factors as ``u^nu`` times an entire function of
    ``u``, so the forward branch uses a Gauss-Jacobi rule that absorbs the
    algebraic endpoint factor into the weights.
    """
    if not nu > -1:
        raise DomainError("extended_bessel_kernel requires nu > -1")
    xa, sx = _as_axis(x)
    ya, sy = _as_axis(y)
    if np.any(xa < 0) or np.any(ya < 0):
        raise DomainError("extended_bessel_kernel requires x, y >= 0")
    if nu < 0 and (np.any(xa == 0.0) or np.any(ya == 0.0)):
        raise DomainError(
            "extended_bessel_kernel diverges at the hard wall for negative index"
        )
    if s == t:
        return _unpack(np.atleast_2d(bessel_kernel(nu, xa, ya)), sx, sy)
    rmax = math.sqrt(max(float(xa.max(initial=0.0)), float(ya.max(initial=0.0)), 1e-12))
    if s < t:
        n_nodes = max(48, int(8.0 * 2.0 * rmax))
        u, w = gauss_jacobi_01(n_nodes, nu)
        decay = w * np.exp(-2.0 * u * (s - t))
        scale = u ** (-0.5 * nu)
        a_x = _sp.jv(nu, 2.0 * np.sqrt(u[:, None] * xa[None, :])) * scale[:, None]
        a_y = _sp.jv(nu, 2.0 * np.sqrt(u[:, None] * ya[None, :])) * scale[:, None]
        out = np.einsum("k,ki,kj->ij", decay, a_x, a_y)
        return _unpack(out, sx, sy)
    u_hi = 1.0 + 21.0 / (2.0 * (s - t))
    edges = panels_by_wavelength(
        1.0, u_hi, lambda u: math.pi * math.sqrt(u) / rmax,
        min_panels=6,
    )
    if edges.size > 4001:
        raise QuadratureError(
            "time separation too small for the exterior branch "
            f"(needs {edges.size - 1} panels)"
        )
    u, w = gauss_legendre_panels(edges, 16)
    decay = w * np.exp(-2.0 * u * (s - t))
    j_x = _sp.jv(nu, 2.0 * np.sqrt(u[:, None] * xa[None, :]))
    j_y = _sp.jv(nu, 2.0 * np.sqrt(u[:, None] * ya[None, :]))
    out = -np.einsum("k,ki,kj->ij", decay, j_x, j_y)
    return _unpack(out, sx, sy)


# ---------------------------------------------------------------------------
# Finite-rank families
# ---------------------------------------------------------------------------

def _finite_tail_kmax(log_ratio: float, N: int, per_index: float) -> int:
    """Truncation index for the backward-time geometric tail.

    ``log_ratio = log(s/t) > 0``; terms decay like ``exp(-k * per_index *
    log_ratio)``; 64.5 decimal digits of decay bound the tail below 1e-28.
    """
    need = int(math.ceil(64.5 * math.log(10.0) / (per_index * log_ratio)))
    kmax = N + max(60, need)
    if kmax > DEGREE_CAP:
        raise TruncationError(
            f"backward-time tail needs degree {kmax} > cap {DEGREE_CAP}; "
            "times are too close together"
        )
    return kmax


def finite_hermite_kernel(N: int, s: float, x, t, y):
    """Rank-``N`` space-time kernel of the log-repelling diffusion started
    with all particles at the origin.

    For ``s <= t`` it is ``(2s)^{-1/2} sum_{k<N} (t/s)^{k/2}
    phi_k(x/sqrt(2s)) phi_k(y/sqrt(2t))`` over the Hermite oscillator
    functions; for ``s > t`` the complementary tail ``-(2s)^{-1/2}
    sum_{k>=N} (...)`` which converges geometrically and is truncated once
    the term bound drops below 1e-28.
    """
    if N < 1:
        raise DomainError("finite_hermite_kernel requires N >= 1")
    if not (s > 0 and t > 0):
        raise DomainError("finite_hermite_kernel requires s, t > 0")
    xa, sx = _as_axis(x)
    ya, sy = _as_axis(y)
    xs = xa / math.sqrt(2.0 * s)
    ys = ya / math.sqrt(2.0 * t)
    if s <= t:
        tab_x = hermite_phi_table(N - 1, xs)
        tab_y = hermite_phi_table(N - 1, ys)
        ratio = (t / s) ** (np.arange(N) / 2.0)
        out = (tab_x * ratio[:, None]).T @ tab_y / math.sqrt(2.0 * s)
    else:
        kmax = _finite_tail_kmax(math.log(s / t), N, 0.5)
        tab_x = hermite_phi_table(kmax, xs)
        tab_y = hermite_phi_table(kmax, ys)
        kk = np.arange(N, kmax + 1)
        ratio = (t / s) ** (kk / 2.0)
        out = -(tab_x[N:] * ratio[:, None]).T @ tab_y[N:] / math.sqrt(2.0 * s)
    return _unpack(out, sx, sy)


def finite_laguerre_kernel(N: int, nu: float, s: float, x, t, y):
    """Rank-``N`` space-time kernel of the noncolliding squared-radius
    diffusion of index ``nu`` started with all particles at the origin.

    Same branch structure as :func:`finite_hermite_kernel` with the
    Laguerre oscillator functions, argument scaling ``x/(2s)``, prefactor
    ``1/(2s)``, and time-ratio power ``(t/s)^k``.
    """
    if N < 1:
        raise DomainError("finite_laguerre_kernel requires N >= 1")
    if not nu > -1:
        raise DomainError("finite_laguerre_kernel requires nu > -1")
    if not (s > 0 and t > 0):
        raise DomainError("finite_laguerre_kernel requires s, t > 0")
    xa, sx = _as_axis(x)
    ya, sy = _as_axis(y)
    if np.any(xa < 0) or np.any(ya < 0):
        raise DomainError("finite_laguerre_kernel requires x, y >= 0")
    xs = xa / (2.0 * s)
    ys = ya / (2.0 * t)
    if s <= t:
        tab_x = laguerre_phi_table(N - 1, nu, xs)
        tab_y = laguerre_phi_table(N - 1, nu, ys)
        ratio = (t / s) ** np.arange(N, dtype=float)
        out = (tab_x * ratio[:, None]).T @ tab_y / (2.0 * s)
    else:
        kmax = _finite_tail_kmax(math.log(s / t), N, 1.0)
        tab_x = laguerre_phi_table(kmax, nu, xs)
        tab_y = laguerre_phi_table(kmax, nu, ys)
        kk = np.arange(N, kmax + 1)
        ratio = (t / s) ** kk.astype(float)
        out = -(tab_x[N:] * ratio[:, None]).T @ tab_y[N:] / (2.0 * s)
    return _unpack(out, sx, sy)


def christoffel_darboux(N: int, x: float) -> tuple[float, float]:
    """Both sides of the summed-square identity for Hermite oscillators.

    Returns ``(lhs, rhs)`` with ``lhs = sum_{k<N} phi_k(x)^2`` and
    ``rhs = N phi_N(x)^2 - sqrt(N(N+1)) phi_{N+1}(x) phi_{N-1}(x)``; the
    two agree exactly in exact arithmetic.
    """
    if N < 1:
        raise DomainError("christoffel_darboux requires N >= 1")
    tab = hermite_phi_table(N + 1, x)[:, 0]
    lhs = float(np.sum(tab[:N] ** 2))
    rhs = float(N * tab[N] ** 2 - math.sqrt(N * (N + 1.0)) * tab[N + 1] * tab[N - 1])
    return lhs, rhs


# ---------------------------------------------------------------------------
# Densities
# ---------------------------------------------------------------------------

def gue_density(N: int, t: float, x):
    """Particle density of the rank-``N`` kernel at time ``t`` (its diagonal)."""
    if N < 1 or not t > 0:
        raise DomainError("gue_density requires N >= 1 and t > 0")
    xa, sx = _as_axis(x)
    z = xa / math.sqrt(2.0 * t)
    tab = hermite_phi_table(N - 1, z)
    out = np.sum(tab * tab, axis=0) / math.sqrt(2.0 * t)
    return float(out[0]) if sx else out


def semicircle(N: int, t: float, x):
    """Bulk density profile ``sqrt(4tN - x^2) / (2 pi t)`` on its support."""
    if N < 1 or not t > 0:
        raise DomainError("semicircle requires N >= 1 and t > 0")
    xa, sx = _as_axis(x)
    v = 4.0 * t * N - xa * xa
    out = np.where(v > 0.0, np.sqrt(np.maximum(v, 0.0)) / (2.0 * math.pi * t), 0.0)
    return float(out[0]) if sx else out


def semicircle_edge(N: int, x):
    """Edge-centered finite-``N`` profile
    ``sqrt(-x (1 + x / (4 N^{2/3}))) / pi`` on ``[-4 N^{2/3}, 0]``."""
    if N < 1:
        raise DomainError("semicircle_edge requires N >= 1")
    xa, sx = _as_axis(x)
    v = -xa * (1.0 + xa / (4.0 * N ** (2.0 / 3.0)))
    out = np.where((xa < 0.0) & (v > 0.0), np.sqrt(np.maximum(v, 0.0)) / math.pi, 0.0)
    return float(out[0]) if sx else out


def rho_A(N: int, x):
    """Finite-``N`` density in edge coordinates: the rank-``N`` density at
    time ``N^{1/3}`` evaluated at ``2 N^{2/3} + x``."""
    xa, sx = _as_axis(x)
    out = gue_density(N, N ** (1.0 / 3.0), 2.0 * N ** (2.0 / 3.0) + xa)
    return float(out[0]) if sx else out


# ---------------------------------------------------------------------------
# Scaling times
# ---------------------------------------------------------------------------

def bulk_time(N: int) -> float:
    """Observation time at which the rank-``N`` center density equals one.

    The center density at time ``t`` is ``sqrt(N/t)/pi`` to leading order,
    so density one — the normalization of the translation-invariant limit
    kernel — picks ``t = N / pi^2``.
    """
    return N / math.pi**2


def hard_edge_time(N: int) -> float:
    """Observation time matching the hard-wall density to its limit kernel.

    At time ``t = N/2`` the rank-``N`` Laguerre density near the wall
    approaches the hard-edge kernel diagonal without rescaling.
    """
    return N / 2.0


def soft_edge_time(N: int) -> float:
    """Observation time for the edge focusing, ``t = N^{1/3}``."""
    return float(N) ** (1.0 / 3.0)


# ---------------------------------------------------------------------------
# Drift densities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DriftDensity:
    """A nonnegative reference density supported on the negative axis.

    Used by the drifted edge process: the density integrates to ``N`` and
    is dominated by the limiting envelope ``sqrt(-x)/pi``.

    Attributes
    ----------
    N : int
        Total mass.
    fn : callable
        Vectorized evaluator, zero outside ``support``.
    support : tuple
        ``(lo, hi)`` with ``hi <= 0``.
    label : str
        Identifier used in serialized artifacts.
    exact_drift_integral : float or None
        Closed-form value of ``integral of fn(x)/x``, when known.
    """

    N: int
    fn: object
    support: tuple[float, float]
    label: str = "custom"
    exact_drift_integral: float | None = None

    def __call__(self, x):
        return self.fn(x)

    @classmethod
    def semicircle(cls, N: int) -> "DriftDensity":
        """The edge-centered finite-``N`` profile as a drift density.

        Its inverse-first moment has the closed form ``-N^{1/3}``.
        """
        if N < 1:
            raise DomainError("DriftDensity.semicircle requires N >= 1")
        return cls(
            N=N,
            fn=lambda x, _n=N: semicircle_edge(_n, x),
            support=(-4.0 * N ** (2.0 / 3.0), 0.0),
            label=f"semicircle_edge[{N}]",
            exact_drift_integral=-float(N) ** (1.0 / 3.0),
        )

    def mass(self, n_nodes: int = 400) -> float:
        """Quadrature of the density over its support.

        Uses the same endpoint-regularizing substitution as
        :meth:`drift_integral` so square-root edge behavior does not limit
        accuracy.
        """
        lo, hi = self.support
        phi, w = gauss_legendre(0.0, math.pi / 2.0, n_nodes)
        x = hi + (lo - hi) * np.sin(phi) ** 2
        dx = (hi - lo) * 2.0 * np.sin(phi) * np.cos(phi)
        return float(np.sum(w * np.asarray(self.fn(x), dtype=float) * dx))

    def drift_integral(self, n_nodes: int = 200) -> float:
        """Numeric value of ``integral of fn(x)/x`` over the support.

        Computed through the smooth double substitution
        ``x = -(hi - lo) sin^2(phi)``-style mapping that removes both the
        ``1/sqrt(-x)`` endpoint behavior at 0 and the square-root vanishing
        at the far edge, so a modest Gauss rule reaches near machine
        precision.  For the built-in edge profile the exact value is
        ``-N^{1/3}``.
        """
        lo, hi = self.support
        if hi > 0:
            raise DomainError("drift density support must lie in x <= 0")
        span = hi - lo  # negative span length to the left of hi
        phi, w = gauss_legendre(0.0, math.pi / 2.0, n_nodes)
        # x = hi - |span| sin^2(phi): sweeps [lo, hi] smoothly.
        sin2 = np.sin(phi) ** 2
        x = hi + (lo - hi) * sin2
        # phi sweeps x from hi down to lo, so the oriented integral over
        # [lo, hi] carries the opposite sign of the phi-sum.
        dx = (hi - lo) * 2.0 * np.sin(phi) * np.cos(phi)
        vals = np.asarray(self.fn(x), dtype=float) / x
        return float(np.sum(w * vals * dx))

    def validate(self, n_check: int = 200) -> None:
        """Check mass ``N`` and domination by ``sqrt(-x)/pi`` on a grid."""
        mass = self.mass()
        if abs(mass - self.N) > 1e-6 * max(1.0, self.N):
            raise ValidationError(
                f"drift density mass {mass:.8f} differs from N = {self.N}"
            )
        xs = np.linspace(self.support[0], self.support[1], n_check)
        vals = np.asarray(self.fn(xs), dtype=float)
        envelope = np.where(xs < 0, np.sqrt(np.maximum(-xs, 0.0)) / math.pi, 0.0)
        if np.any(vals < -1e-12) or np.any(vals > envelope + 1e-9):
            raise ValidationError(
                "drift density must satisfy 0 <= fn(x) <= sqrt(-x)/pi"
            )


# ---------------------------------------------------------------------------
# Kernel specification
# ---------------------------------------------------------------------------

_FINITE_FAMILIES = {KernelFamily.HERMITE_N, KernelFamily.LAGUERRE_N}
_CONFIG_FAMILIES = {
    KernelFamily.CONFIG_DYSON,
    KernelFamily.CONFIG_BESQ,
    KernelFamily.CONFIG_DRIFTED,
}
_NU_FAMILIES = {KernelFamily.BESSEL, KernelFamily.LAGUERRE_N, KernelFamily.CONFIG_BESQ}


@dataclass(frozen=True)
class KernelSpec:
    """Declarative description of a correlation kernel.

    Attributes
    ----------
    family : KernelFamily
    N : int or None
        Rank, required for the finite families.
    nu : float or None
        Index parameter, required for the hard-edge families.
    xi : Configuration or None
        Initial configuration, required for the configuration families.
    drift : DriftDensity or None
        Reference density, required for the drifted configuration family.
    """

    family: KernelFamily
    N: int | None = None
    nu: float | None = None
    xi: Configuration | None = None
    drift: DriftDensity | None = None

    def __post_init__(self):
        fam = self.family
        if not isinstance(fam, KernelFamily):
            object.__setattr__(self, "family", KernelFamily(fam))
            fam = self.family
        if fam in _FINITE_FAMILIES:
            if self.N is None or self.N < 1:
                raise ValidationError(f"{fam.value} requires N >= 1")
        if fam in _NU_FAMILIES:
            if self.nu is None or not self.nu > -1:
                raise ValidationError(f"{fam.value} requires nu > -1")
        if fam in _CONFIG_FAMILIES:
            if self.xi is None:
                raise ValidationError(f"{fam.value} requires a configuration")
        if fam is KernelFamily.CONFIG_DRIFTED and self.drift is None:
            raise ValidationError("config_drifted requires a drift density")

    # -- evaluation dispatch -------------------------------------------
    def matrix(self, s: float | None, x, t: float | None, y, **quad) -> np.ndarray:
        """Evaluate the kernel on the grid ``x`` (rows) by ``y`` (columns).

        Static-limit families accept ``s == t`` or ``None`` times.
        """
        fam = self.family
        if fam is KernelFamily.SINE:
            if s is None or t is None or s == t:
                return np.atleast_2d(sine_kernel(np.atleast_1d(x), np.atleast_1d(y)))
            return np.atleast_2d(
                extended_sine_kernel(s, np.atleast_1d(x), t, np.atleast_1d(y))
            )
        if fam is KernelFamily.AIRY:
            if s is None or t is None:
                s = t = 0.0
            return np.atleast_2d(
                extended_airy_kernel(s, np.atleast_1d(x), t, np.atleast_1d(y))
                if s != t
                else airy_kernel(np.atleast_1d(x), np.atleast_1d(y))
            )
        if fam is KernelFamily.BESSEL:
            if s is None or t is None or s == t:
                return np.atleast_2d(
                    bessel_kernel(self.nu, np.atleast_1d(x), np.atleast_1d(y))
                )
            return np.atleast_2d(
                extended_bessel_kernel(self.nu, s, np.atleast_1d(x), t, np.atleast_1d(y))
            )
        if fam is KernelFamily.HERMITE_N:
            if s is None or t is None:
                raise ValidationError("finite kernels need explicit times")
            return np.atleast_2d(
                finite_hermite_kernel(self.N, s, np.atleast_1d(x), t, np.atleast_1d(y))
            )
        if fam is KernelFamily.LAGUERRE_N:
            if s is None or t is None:
                raise ValidationError("finite kernels need explicit times")
            return np.atleast_2d(
                finite_laguerre_kernel(
                    self.N, self.nu, s, np.atleast_1d(x), t, np.atleast_1d(y)
                )
            )
        if fam in _CONFIG_FAMILIES:
            if s is None or t is None:
                raise ValidationError("configuration kernels need explicit times")
            xs = np.atleast_1d(np.asarray(x, dtype=float))
            ys = np.atleast_1d(np.asarray(y, dtype=float))
            out = np.empty((xs.size, ys.size))
            for i, xi_ in enumerate(xs):
                for j, yj in enumerate(ys):
                    out[i, j] = config_kernel(self, s, float(xi_), t, float(yj), **quad)
            return out
        raise ValidationError(f"unhandled family {fam}")  # pragma: no cover


# ---------------------------------------------------------------------------
# Configuration-indexed kernels
# ---------------------------------------------------------------------------

def _require_simple(xi: Configuration) -> None:
    if not xi.is_simple:
        raise UnsupportedConfigurationError(
            "configuration kernels are implemented for simple configurations "
            "only (all multiplicities 1)"
        )


def _continued_transform_derivatives(
    nu: float, t: float, y: float, deg: int
) -> np.ndarray:
    """Derivatives at zero of the Laplace transform of the continued
    backward hard-edge density.

    The transform is ``L(s) = (2pt)^{-(nu+1)} exp(y/(2t) - y/(4 t^2 p))``
    with ``p = s + 1/(2t)`` (Weber's integral); ``L(0) = 1`` is the
    normalization of the continued density.  Returns ``L^{(k)}(0)`` for
    ``k = 0..deg`` via the logarithmic-derivative recurrence.
    """
    p0 = 1.0 / (2.0 * t)
    c = y / (4.0 * t * t)
    g_der = np.array(
        [
            (-1.0) ** m
            * math.factorial(m)
            * (-(nu + 1.0) / p0 ** (m + 1) + c * (m + 1) / p0 ** (m + 2))
            for m in range(deg + 1)
        ]
    )
    l_der = np.zeros(deg + 1)
    l_der[0] = 1.0
    for k in range(deg):
        l_der[k + 1] = sum(
            math.comb(k, j) * l_der[j] * g_der[k - j] for j in range(k + 1)
        )
    return l_der


def config_kernel(
    spec: KernelSpec,
    s: float,
    x: float,
    t: float,
    y: float,
    n_u_nodes: int = 400,
    u_pad: float = 10.0,
) -> float:
    """Space-time kernel indexed by a finite simple configuration.

    Evaluates, per family, a sum over the configuration's atoms of a
    transition factor times an entire-function factor integrated against a
    second transition factor along the imaginary axis (real negative axis
    for the hard-edge family), minus the backward-time transition term.

    Parameters
    ----------
    n_u_nodes : int
        Gauss–Legendre nodes for the auxiliary integration (>= 400 by
        default).
    u_pad : float
        The integration is truncated where its Gaussian/exponential factor
        has decayed by ``exp(-u_pad^2/2)``-type margins.
    """
    from . import configspace  # local import to avoid a cycle

    fam = spec.family
    if fam not in _CONFIG_FAMILIES:
        raise ValidationError("config_kernel requires a configuration family")
    xi = spec.xi
    _require_simple(xi)
    if n_u_nodes < 4:
        raise ValidationError("n_u_nodes must be >= 4")
    if not (s > 0 and t > 0):
        raise DomainError("config_kernel requires s, t > 0")

    if fam is KernelFamily.CONFIG_DYSON:
        # Integrate along the vertical line through y rather than the
        # imaginary axis: the integrand is entire with Gaussian decay in
        # vertical strips, and on the shifted contour the backward factor
        # is a real Gaussian, avoiding exp(y^2/(2t))-sized cancellation.
        half = u_pad * math.sqrt(t)
        u, w = gauss_legendre(-half, half, n_u_nodes)
        z = y + 1j * u
        back = heat_kernel_psin(-t, z, y)
        total = 0.0j
        for xp in xi.points:
            phi = configspace.phi_entire(xi, 0, complex(xp), z)
            fwd = heat_kernel_psin(s, x, xp)
            total += fwd * np.sum(w * phi * back)
        if s > t:
            total -= heat_kernel_psin(s - t, x, y)
        return float(np.real(total))

    if fam is KernelFamily.CONFIG_BESQ:
        if x < 0 or y < 0:
            raise DomainError("hard-edge configuration kernel requires x, y >= 0")
        nu = spec.nu
        if nu != round(nu):
            warnings.warn(
                "hard-edge configuration kernel with non-integer index relies "
                "on a continuation branch that is unvalidated; treat results "
                "as provisional",
                RuntimeWarning,
                stacklevel=2,
            )
        # For a simple finite configuration the entire-function factor is a
        # polynomial in the auxiliary variable, and the continued backward
        # density has a closed-form Laplace transform, so the auxiliary
        # integral is an exact finite sum of transform derivatives
        # evaluated at zero.  This avoids integrating a factor that
        # oscillates with amplitude exp(y/(2t)).
        atoms = [float(a) for a in xi.points]
        deg = len(atoms) - 1
        l_der = _continued_transform_derivatives(nu, t, y, deg)
        total = 0.0
        for xp in atoms:
            others = [a for a in atoms if a != xp]
            if others:
                denom = float(np.prod([a - xp for a in others]))
                coeffs = (-1.0) ** len(others) * np.poly(others)
                coeffs = coeffs[::-1] / denom
            else:
                coeffs = np.array([1.0])
            aux = float(np.dot(coeffs, l_der[: coeffs.size]))
            total += bessel_transition(nu, s, xp, x) * aux
        if s > t:
            total -= bessel_transition(nu, s - t, y, x)
        return float(total)

    # drifted family; same shifted vertical contour as the first branch
    drift = spec.drift
    half = u_pad * math.sqrt(t)
    u, w = gauss_legendre(-half, half, n_u_nodes)
    z = y + 1j * u
    back = drift_kernel_q(t, 0.0, 1j * u)
    m_ref_base = (
        drift.exact_drift_integral
        if drift.exact_drift_integral is not None
        else drift.drift_integral()
    )
    total = 0.0j
    for xp in xi.points:
        phi = configspace.phi_reference(xi, drift, complex(xp), z,
                                        ref_integral=m_ref_base)
        fwd = drift_kernel_q(0.0, s, x - xp)
        total += fwd * np.sum(w * phi * back)
    if s > t:
        total -= drift_kernel_q(t, s, x - y)
    return float(np.real(total))


# ---------------------------------------------------------------------------
# CSV export
# ---------------------------------------------------------------------------

def write_kernel_csv(path, rows) -> None:
    """Write kernel evaluations as CSV.

    ``rows`` yields tuples ``(family, N, nu, s, x, t, y, value)``; floats
    are rendered with 17 significant digits so the decimal text
    round-trips to the identical binary double.
    """
    def fmt(v):
        if v is None:
            return ""
        if isinstance(v, str):
            return v
        return f"{float(v):.16e}"

    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("family,N,nu,s,x,t,y,value\n")
        for family, N, nu, s, x, t, y, value in rows:
            fh.write(
                ",".join(
                    [
                        str(family),
                        "" if N is None else str(int(N)),
                        fmt(nu),
                        fmt(s),
                        fmt(x),
                        fmt(t),
                        fmt(y),
                        fmt(value),
                    ]
                )
                + "\n"
            )
