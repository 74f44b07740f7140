"""Configuration-space functionals.

Primary-factor products, the entire functions they generate, tail moments
of point configurations, occupation bounds on stretched lattices, and the
checkers for the regularity classes those quantities define.

All functionals act on immutable :class:`~detproc.configuration.Configuration`
objects and are pure; multiplicities enter as integer powers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .configuration import Configuration
from .errors import DomainError, TruncationError, ValidationError
from .quadrature import gauss_legendre

__all__ = [
    "weierstrass_G",
    "phi_entire",
    "phi_reference",
    "phi_A",
    "tail_moment_M",
    "tail_moment_trend",
    "tail_moment_M_alpha",
    "m_kappa",
    "MAResult",
    "M_A",
    "ConditionReport",
    "check_conditions",
    "moderate_distance",
    "MODE_KAPPA_RANGES",
]

_CAUCHY_TOL = 1e-8


# ---------------------------------------------------------------------------
# Primary factors and entire functions
# ---------------------------------------------------------------------------

def weierstrass_G(u, p: int):
    """Primary factor of order ``p``: ``1 - u`` for ``p = 0``, otherwise
    ``(1 - u) exp(u + u^2/2 + ... + u^p/p)``.

    Accepts real or complex ``u``, scalar or array.
    """
    if not isinstance(p, (int, np.integer)) or p < 0:
        raise ValidationError("primary-factor order p must be a nonnegative integer")
    u = np.asarray(u)
    base = 1.0 - u
    if p == 0:
        out = base
    else:
        expo = np.zeros_like(u)
        power = np.ones_like(u)
        for k in range(1, p + 1):
            power = power * u
            expo = expo + power / k
        out = base * np.exp(expo)
    if out.ndim == 0:
        return out.item()
    return out


def phi_entire(xi: Configuration, p: int, z, w):
    """Entire function generated by a configuration's primary-factor product.

    Computes the product over ``x`` in the support of ``xi`` excluding
    ``z`` of ``G((w - z)/(x - z), p)`` raised to the multiplicity of ``x``.
    Atoms equal to ``z`` are excluded rather than causing division by zero.
    ``w`` may be a scalar or array, real or complex.
    """
    if not isinstance(p, (int, np.integer)) or p < 0:
        raise ValidationError("primary-factor order p must be a nonnegative integer")
    w_arr = np.asarray(w)
    scalar = w_arr.ndim == 0
    w_arr = np.atleast_1d(w_arr).astype(complex)
    out = np.ones(w_arr.shape, dtype=complex)
    shift = w_arr - z
    for x, mult in zip(xi.points, xi.multiplicities):
        dx = x - z
        if dx == 0:
            continue
        g = weierstrass_G(shift / dx, p)
        out *= np.asarray(g, dtype=complex) ** int(mult)
    if scalar:
        return complex(out[0])
    return out


def phi_reference(
    xi: Configuration,
    drift,
    z,
    w,
    ref_integral: float | None = None,
):
    """Entire function of a configuration relative to a reference density.

    The order-1 product over the translated configuration is corrected by
    an exponential whose rate is the difference between the reference
    density's ``integral of rho(x)/x dx`` (the density itself is *not*
    translated) and the configuration's own inverse-distance sum around
    ``z``:

        ``exp[(w - z) * (ref_integral - sum_{x != z} mult/(x - z))]
        * prod_{x != z} G((w - z)/(x - z), 1)^mult``

    Parameters
    ----------
    drift : DriftDensity
        Supplies ``ref_integral`` through its ``drift_integral`` method
        when the value is not passed explicitly.
    """
    if ref_integral is None:
        ref_integral = drift.drift_integral()
    w_arr = np.asarray(w)
    scalar = w_arr.ndim == 0
    w_arr = np.atleast_1d(w_arr).astype(complex)
    inv_sum = 0.0
    for x, mult in zip(xi.points, xi.multiplicities):
        dx = x - z
        if dx == 0:
            continue
        inv_sum += mult / dx
    rate = ref_integral - inv_sum
    out = np.exp((w_arr - z) * rate) * phi_entire(xi, 1, z, w_arr)
    out = np.atleast_1d(np.asarray(out, dtype=complex))
    if scalar:
        return complex(out[0])
    return out


# ---------------------------------------------------------------------------
# Tail moments
# ---------------------------------------------------------------------------

def tail_moment_M(xi: Configuration, L: float) -> float:
    """Inverse-first-moment of the configuration within ``[-L, L]``,
    excluding any atom at the origin: ``sum mult/x over 0 < |x| <= L``."""
    if not L > 0:
        raise DomainError("cutoff L must be positive")
    total = 0.0
    for x, mult in zip(xi.points, xi.multiplicities):
        if x != 0.0 and abs(x) <= L:
            total += mult / x
    return total


def tail_moment_trend(
    xi: Configuration, L_grid=None
) -> tuple[np.ndarray, np.ndarray, bool, float]:
    """Evaluate :func:`tail_moment_M` over a growing cutoff grid.

    Returns ``(L_grid, values, converged, limit)`` where ``converged``
    applies a Cauchy criterion with tolerance 1e-8 to the last grid steps.
    """
    if L_grid is None:
        hi = max((abs(float(x)) for x in xi.points), default=1.0)
        L_grid = np.geomspace(max(1.0, hi / 16.0), 2.0 * max(1.0, hi), 12)
    L_grid = np.asarray(L_grid, dtype=float)
    vals = np.array([tail_moment_M(xi, L) for L in L_grid])
    if vals.size >= 2:
        converged = bool(np.all(np.abs(np.diff(vals)[-2:]) <= _CAUCHY_TOL))
    else:
        converged = True
    return L_grid, vals, converged, float(vals[-1])


def tail_moment_M_alpha(xi: Configuration, alpha: float) -> float:
    """Inverse-power moment ``(sum mult |x|^{-alpha})^{1/alpha}`` over the
    atoms away from the origin."""
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    total = 0.0
    for x, mult in zip(xi.points, xi.multiplicities):
        if x != 0.0:
            total += mult * abs(x) ** (-alpha)
    return total ** (1.0 / alpha)


def m_kappa(xi: Configuration, kappa: float) -> int:
    """Maximum occupation of the stretched-lattice cells
    ``[g(k), g(k+1)]`` with ``g(k) = sign(k) |k|^kappa``, over integer ``k``.

    Cells are closed, so an atom exactly on a cell boundary counts toward
    both neighboring cells.
    """
    if not kappa > 0:
        raise DomainError("kappa must be positive")
    if xi.total_mass == 0:
        return 0
    hi = max(abs(float(xi.points[0])), abs(float(xi.points[-1])))
    k_max = int(math.ceil(hi ** (1.0 / kappa))) + 1

    def g(k: int) -> float:
        return math.copysign(abs(k) ** kappa, k) if k != 0 else 0.0

    best = 0
    for k in range(-k_max - 1, k_max + 1):
        best = max(best, xi.count_in(g(k), g(k + 1)))
    return best


# ---------------------------------------------------------------------------
# Reference-compensated tail field
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MAResult:
    """Cutoff trend of the reference-compensated inverse-first-moment.

    ``value`` is the final grid value; ``converged`` is the Cauchy flag at
    tolerance 1e-8 over the last grid steps.  Supports ``float(result)``.
    """

    value: float
    converged: bool
    L_grid: tuple
    values: tuple

    def __float__(self) -> float:
        return self.value


def _reference_shell_integral(drift, L: float, n_nodes: int = 200) -> float:
    """``integral over 0 < |x| < L of rho(x)/x dx`` for the reference density.

    ``drift=None`` selects the square-root envelope ``sqrt(-x)/pi`` on the
    negative axis, whose shell integral is exactly ``-2 sqrt(L)/pi``.  A
    callable density is integrated numerically with the substitution
    ``x = -v^2`` (and ``x = +v^2`` on the positive side) that removes the
    inverse-square-root endpoint behavior.
    """
    if drift is None:
        return -2.0 * math.sqrt(L) / math.pi
    v, wq = gauss_legendre(0.0, math.sqrt(L), n_nodes)
    with np.errstate(divide="ignore", invalid="ignore"):
        neg = np.asarray(drift(-v * v), dtype=float)
        pos = np.asarray(drift(v * v), dtype=float)
    total = float(np.sum(wq * (-2.0) * neg / v)) + float(np.sum(wq * 2.0 * pos / v))
    return total


def M_A(xi: Configuration, drift=None, L_grid=None, n_nodes: int = 200) -> MAResult:
    """Reference-compensated tail field of a configuration.

    For each cutoff ``L`` computes ``integral_{0<|x|<L} rho(x)/x dx -
    sum_{0<|x|<=L} mult/x`` and reports the trend with a Cauchy
    convergence flag (divergence is flagged, never raised).

    Parameters
    ----------
    drift : None or callable
        ``None`` selects the square-root envelope ``sqrt(-x)/pi`` with its
        closed-form shell integral; a callable is integrated numerically.
    L_grid : array-like, optional
        Increasing cutoffs; defaults to a geometric grid spanning the
        configuration's support.
    """
    if L_grid is None:
        hi = max((abs(float(x)) for x in xi.points), default=1.0)
        L_grid = np.geomspace(max(1.0, hi / 16.0), 2.0 * max(1.0, hi), 12)
    L_grid = np.asarray(L_grid, dtype=float)
    if L_grid.ndim != 1 or L_grid.size < 2 or np.any(np.diff(L_grid) <= 0):
        raise ValidationError("L_grid must be an increasing 1-d grid")
    vals = np.array(
        [
            _reference_shell_integral(drift, L, n_nodes) - tail_moment_M(xi, L)
            for L in L_grid
        ]
    )
    converged = bool(np.all(np.abs(np.diff(vals)[-2:]) <= _CAUCHY_TOL))
    return MAResult(
        value=float(vals[-1]),
        converged=converged,
        L_grid=tuple(float(L) for L in L_grid),
        values=tuple(float(v) for v in vals),
    )


def phi_A(xi: Configuration, z, w, drift=None, L_grid=None):
    """Entire function combining the order-1 product with the
    reference-compensated tail field:

        ``exp[(w - z) M_A(translated xi)] * prod G((w - z)/(x - z), 1)^mult``

    Requires the tail field's cutoff trend to have converged; a
    non-converged trend raises :class:`~detproc.errors.TruncationError`.
    """
    shifted = xi.translate(-np.real(z)) if np.imag(z) == 0 else None
    if shifted is None:
        raise DomainError("phi_A expects a real translation point z")
    ma = M_A(shifted, drift=drift, L_grid=L_grid)
    if not ma.converged:
        raise TruncationError(
            "tail field did not stabilize over the cutoff grid; "
            "refine the truncation before evaluating the entire function"
        )
    w_arr = np.asarray(w)
    scalar = w_arr.ndim == 0
    w_arr = np.atleast_1d(w_arr).astype(complex)
    out = np.exp((w_arr - z) * ma.value) * phi_entire(xi, 1, z, w_arr)
    out = np.atleast_1d(np.asarray(out, dtype=complex))
    if scalar:
        return complex(out[0])
    return out


# ---------------------------------------------------------------------------
# Condition report
# ---------------------------------------------------------------------------

MODE_KAPPA_RANGES = {
    "Y": (0.5, 1.0),
    "Y_plus": (1.0, 2.0),
    "Y_A": (0.5, 2.0 / 3.0),
}


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of the configuration-regularity checks.

    Attributes
    ----------
    M_value : float or str
        Limit of the inverse-first-moment trend, or ``"divergent"``.
    M_alpha : dict
        ``alpha -> inverse-power moment``.
    m_kappa : dict
        ``kappa -> maximum cell occupation``.
    CI : bool
        Whether the inverse-first-moment trend satisfied the Cauchy
        criterion (a diagnostic, not a theorem, for finite data).
    CII : dict
        ``(kappa, m) -> occupation bound satisfied``; monotone in ``m``.
    CIA : tuple or None
        ``(bool, value)`` for the reference-compensated tail field in the
        drifted mode, else ``None``.
    kappa_range_used : tuple
        The admissible open interval for the requested mode.
    mode : str
    """

    M_value: object
    M_alpha: dict
    m_kappa: dict
    CI: bool
    CII: dict
    CIA: object
    kappa_range_used: tuple
    mode: str
    L_grid: tuple = field(default_factory=tuple)
    M_trend: tuple = field(default_factory=tuple)

    def to_json(self) -> str:
        payload = {
            "mode": self.mode,
            "M_value": self.M_value,
            "M_alpha": {f"{a:g}": v for a, v in self.M_alpha.items()},
            "m_kappa": {f"{k:g}": int(v) for k, v in self.m_kappa.items()},
            "CI": bool(self.CI),
            "CII": [
                {"kappa": k, "m": m, "ok": bool(ok)}
                for (k, m), ok in sorted(self.CII.items())
            ],
            "CIA": None
            if self.CIA is None
            else {"ok": bool(self.CIA[0]), "value": self.CIA[1]},
            "kappa_range_used": list(self.kappa_range_used),
            "L_grid": list(self.L_grid),
            "M_trend": list(self.M_trend),
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def check_conditions(
    xi: Configuration,
    kappa_list,
    m_list,
    mode: str = "Y",
    drift=None,
    L_grid=None,
) -> ConditionReport:
    """Run the regularity checks for a configuration.

    ``mode`` selects the admissible open interval for the stretching
    exponents: ``"Y"`` uses (1/2, 1), ``"Y_plus"`` uses (1, 2), and
    ``"Y_A"`` uses (1/2, 2/3) and additionally evaluates the
    reference-compensated tail field against ``drift``.
    """
    if mode not in MODE_KAPPA_RANGES:
        raise ValidationError(f"unknown mode {mode!r}; expected one of "
                              f"{sorted(MODE_KAPPA_RANGES)}")
    lo, hi = MODE_KAPPA_RANGES[mode]
    kappa_list = [float(k) for k in kappa_list]
    m_list = [int(m) for m in m_list]
    for k in kappa_list:
        if not (lo < k < hi):
            raise ValidationError(
                f"kappa={k} outside the open interval ({lo}, {hi}) for mode {mode}"
            )
    grid, trend, converged, limit = tail_moment_trend(xi, L_grid)
    occupations = {k: m_kappa(xi, k) for k in kappa_list}
    cii = {
        (k, m): occupations[k] <= m for k in kappa_list for m in m_list
    }
    cia = None
    if mode == "Y_A":
        ma = M_A(xi, drift=drift, L_grid=L_grid)
        cia = (bool(ma.converged and np.isfinite(ma.value)), ma.value)
    return ConditionReport(
        M_value=limit if converged else "divergent",
        M_alpha={a: tail_moment_M_alpha(xi, a) for a in (1.5, 2.0)},
        m_kappa=occupations,
        CI=bool(converged),
        CII=cii,
        CIA=cia,
        kappa_range_used=(lo, hi),
        mode=mode,
        L_grid=tuple(float(v) for v in grid),
        M_trend=tuple(float(v) for v in trend),
    )


# ---------------------------------------------------------------------------
# Moderate distance
# ---------------------------------------------------------------------------

def moderate_distance(
    xi1: Configuration,
    xi2: Configuration,
    compact_radius: float = 4.0,
    grid: tuple[int, int] = (16, 16),
) -> float:
    """Sup-distance surrogate for moderate convergence of configurations.

    Evaluates both order-0 entire functions anchored at the imaginary unit
    on a polar grid over the disk ``|w| <= compact_radius`` and returns the
    maximum absolute difference.  This is a metric on the evaluated
    function values (sup-metric), so the triangle inequality holds.
    """
    if not compact_radius > 0:
        raise DomainError("compact_radius must be positive")
    n_r, n_th = int(grid[0]), int(grid[1])
    if n_r < 1 or n_th < 1:
        raise ValidationError("grid must have at least one node per axis")
    r = np.linspace(compact_radius / n_r, compact_radius, n_r)
    th = np.linspace(0.0, 2.0 * math.pi, n_th, endpoint=False)
    w = (r[:, None] * np.exp(1j * th)[None, :]).ravel()
    anchor = 1j
    f1 = phi_entire(xi1, 0, anchor, w)
    f2 = phi_entire(xi2, 0, anchor, w)
    return float(np.max(np.abs(f1 - f2)))
