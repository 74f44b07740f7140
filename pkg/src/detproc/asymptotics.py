"""Large-degree asymptotics for the Hermite oscillator functions.

Provides the classical Poincare-type series for the Airy functions, the
exact rational coefficient tables used by the large-degree expansions,
and a three-regime evaluator (oscillatory interior / exponential exterior
/ turning region near the spectrum edge) for the Gaussian-weighted
Hermite oscillator functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import AmbiguousRegimeError, CapacityError, DomainError
from .specfun import airy as _airy
from .specfun import airy_prime as _airy_prime

__all__ = [
    "AIRY_SERIES_CAP",
    "airy_u_coefficient",
    "airy_v_coefficient",
    "airy_series",
    "PRCoefficients",
    "pr_coefficients",
    "Regime",
    "AsymptoticResult",
    "pr_hermite",
    "TURNING_CORRECTIONS",
]

#: Hard cap on requested series terms; the coefficients grow factorially and
#: partial sums beyond this depth are numerically meaningless in doubles.
AIRY_SERIES_CAP = 40


# ---------------------------------------------------------------------------
# Airy asymptotic series
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def airy_u_coefficient(k: int) -> Fraction:
    """Exact rational coefficient ``u_k`` of the Airy asymptotic series.

    ``u_k = Gamma(3k + 1/2) / (54^k k! Gamma(k + 1/2))``; the Gamma ratio
    telescopes into a product of half-integers, so the value is rational.
    """
    if k < 0:
        raise DomainError("series coefficient index must be >= 0")
    num = Fraction(1)
    for j in range(k, 3 * k):
        num *= Fraction(2 * j + 1, 2)
    return num / (Fraction(54) ** k * math.factorial(k))


@lru_cache(maxsize=None)
def airy_v_coefficient(k: int) -> Fraction:
    """Exact rational coefficient ``v_k = -(6k+1)/(6k-1) u_k``."""
    return Fraction(-(6 * k + 1), 6 * k - 1) * airy_u_coefficient(k)


#: Mapping of series label -> (coefficient family, index map, sign, parity)
#: L, M are the one-sided series; P, Q, R, S are the even/odd alternating
#: splits used on the oscillatory side.
_SERIES_KINDS = {"L", "M", "P", "Q", "R", "S"}


def airy_series(z: float, which: str, terms: int) -> float:
    """Partial sum of a named Airy asymptotic series at argument ``z > 0``.

    ``which`` selects among:

    * ``L``: ``sum u_k z^{-k}``  (e.g. two terms give ``1 + 5/(72 z)``)
    * ``M``: ``sum v_k z^{-k}``
    * ``P``: ``sum (-1)^k u_{2k} z^{-2k}``
    * ``Q``: ``sum (-1)^k u_{2k+1} z^{-(2k+1)}``
    * ``R``: ``sum (-1)^k v_{2k} z^{-2k}``
    * ``S``: ``sum (-1)^k v_{2k+1} z^{-(2k+1)}``

    ``terms`` counts retained terms and must not exceed ``AIRY_SERIES_CAP``.
    """
    if which not in _SERIES_KINDS:
        raise DomainError(f"unknown series label {which!r}")
    if not z > 0:
        raise DomainError("airy_series requires z > 0")
    if terms < 1:
        raise DomainError("airy_series requires terms >= 1")
    if terms > AIRY_SERIES_CAP:
        raise CapacityError(
            f"terms {terms} exceeds series cap {AIRY_SERIES_CAP}"
        )
    coeff = airy_u_coefficient if which in ("L", "P", "Q") else airy_v_coefficient
    total = 0.0
    for k in range(terms):
        if which in ("L", "M"):
            total += float(coeff(k)) / z**k
        elif which in ("P", "R"):
            total += (-1.0) ** k * float(coeff(2 * k)) / z ** (2 * k)
        else:  # Q, S
            total += (-1.0) ** k * float(coeff(2 * k + 1)) / z ** (2 * k + 1)
    return total


# ---------------------------------------------------------------------------
# Exact rational coefficient tables for the large-degree expansions
# ---------------------------------------------------------------------------

def _poly_mul(f: list, g: list, n_max: int) -> list:
    out = [Fraction(0)] * (n_max + 1)
    for i, fi in enumerate(f):
        if fi == 0:
            continue
        for j, gj in enumerate(g):
            if i + j > n_max:
                break
            out[i + j] += fi * gj
    return out


def _pp_mul(f: tuple, g: tuple) -> tuple:
    """Product of two polynomials in the auxiliary parameter ``p``."""
    out = [Fraction(0)] * (len(f) + len(g) - 1)
    for i, fi in enumerate(f):
        for j, gj in enumerate(g):
            out[i + j] += fi * gj
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


def _pp_add(f: tuple, g: tuple) -> tuple:
    n = max(len(f), len(g))
    out = [Fraction(0)] * n
    for i, fi in enumerate(f):
        out[i] += fi
    for j, gj in enumerate(g):
        out[j] += gj
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


def _series_exp_pp(s: list, n_max: int) -> list:
    """``exp`` of a power series (constant term zero) whose coefficients are
    polynomials in ``p``; uses the derivative recurrence ``E' = S' E``."""
    zero = (Fraction(0),)
    one = (Fraction(1),)
    e = [zero] * (n_max + 1)
    e[0] = one
    for n in range(1, n_max + 1):
        acc = zero
        for k in range(1, n + 1):
            if k < len(s) and s[k] != zero:
                term = _pp_mul(_pp_mul((Fraction(k),), s[k]), e[n - k])
                acc = _pp_add(acc, term)
        e[n] = _pp_mul((Fraction(1, n),), acc)
    return e


@dataclass(frozen=True)
class PRCoefficients:
    """Exact rational coefficient tables for the large-degree expansions.

    Attributes
    ----------
    max_n, max_p : int
        Table depth.
    a : dict
        ``a[(n, m)]`` for ``0 <= m <= n <= max_n``: coefficient of
        ``z^m tau^n`` in ``exp(z S(tau))`` with
        ``S(tau) = sum_{j>=3} ((-1)^j / j) tau^{j-2}``.
    b : dict
        ``b[(n, m)]`` is a tuple of rationals — the polynomial in the
        auxiliary parameter ``p`` giving the coefficient of ``z^m tau^n``
        in ``A(tau)^p exp(z T(tau))`` with
        ``A(tau) = sum_{k>=1} tau^{k-1}/k`` and
        ``T(tau) = sum_{j>=4} tau^{j-3}/j``.
    """

    max_n: int
    max_p: int
    a: dict
    b: dict

    def a_value(self, n: int, m: int) -> Fraction:
        return self.a.get((n, m), Fraction(0))

    def b_value(self, n: int, m: int, p: float):
        poly = self.b.get((n, m), (Fraction(0),))
        return sum(float(c) * p**i for i, c in enumerate(poly))


def pr_coefficients(max_n: int, max_p: int = 4) -> PRCoefficients:
    """Build the exact coefficient tables up to order ``tau^{max_n}``.

    All arithmetic is over rationals; the recognized anchor values
    (``a[0,0]=1``, ``a[1,1]=-1/3``, ``b[(0,0)]=1``, ``b[(1,0)]=p/2``) fall
    out of the generating-function algebra rather than being hard-coded.
    """
    if max_n < 0 or max_p < 0:
        raise DomainError("pr_coefficients requires max_n, max_p >= 0")

    # S(tau) = -tau/3 + tau^2/4 - tau^3/5 + ... (coefficient of tau^n)
    s_tau = [Fraction(0)] * (max_n + 1)
    for j in range(3, max_n + 3):
        if j - 2 <= max_n:
            s_tau[j - 2] = Fraction((-1) ** j, j)

    # a[(n, m)] = [tau^n] S^m / m!
    a: dict = {}
    power = [Fraction(0)] * (max_n + 1)
    power[0] = Fraction(1)  # S^0
    a[(0, 0)] = Fraction(1)
    for n in range(1, max_n + 1):
        a[(n, 0)] = Fraction(0)
    fact = Fraction(1)
    for m in range(1, max_n + 1):
        power = _poly_mul(power, s_tau, max_n)
        fact *= m
        for n in range(max_n + 1):
            if m <= n:
                a[(n, m)] = power[n] / fact

    # A(tau) = 1 + tau/2 + tau^2/3 + ...; log-series for the p-th power.
    a_tau = [Fraction(1, k + 1) for k in range(max_n + 1)]
    log_a = [Fraction(0)] * (max_n + 1)
    # log(A) via the derivative recurrence on plain rationals.
    for n in range(1, max_n + 1):
        acc = a_tau[n] * n
        for k in range(1, n):
            acc -= k * log_a[k] * a_tau[n - k]
        log_a[n] = acc / n
    # p * log(A) as p-polynomial coefficients, then exponentiate.
    p_log_a = [(Fraction(0),)] * (max_n + 1)
    for n in range(1, max_n + 1):
        p_log_a[n] = (Fraction(0), log_a[n])
    a_pow_p = _series_exp_pp(p_log_a, max_n)

    # T(tau) = tau/4 + tau^2/5 + ...; powers T^m / m!
    t_tau = [Fraction(0)] * (max_n + 1)
    for j in range(4, max_n + 4):
        if j - 3 <= max_n:
            t_tau[j - 3] = Fraction(1, j)

    b: dict = {}
    t_power = [Fraction(0)] * (max_n + 1)
    t_power[0] = Fraction(1)
    fact = Fraction(1)
    for m in range(0, max_n + 1):
        if m > 0:
            t_power = _poly_mul(t_power, t_tau, max_n)
            fact *= m
        for n in range(max_n + 1):
            if m > n:
                continue
            acc = (Fraction(0),)
            for j in range(n + 1):
                if t_power[j] != 0:
                    acc = _pp_add(
                        acc, _pp_mul((t_power[j] / fact,), a_pow_p[n - j])
                    )
            b[(n, m)] = acc
    return PRCoefficients(max_n=max_n, max_p=max_p, a=a, b=b)


# ---------------------------------------------------------------------------
# Three-regime large-degree evaluation
# ---------------------------------------------------------------------------

class Regime(Enum):
    """Location of an evaluation point relative to the spectrum edge."""

    OSCILLATORY = "oscillatory"
    EXPONENTIAL = "exponential"
    TURNING = "turning"


@dataclass(frozen=True)
class AsymptoticResult:
    """Value of a truncated asymptotic evaluation plus its metadata.

    Attributes
    ----------
    value : float
        The truncated-expansion value.
    regime : Regime
        Which expansion was used.
    order_L : int
        Requested truncation level.
    error_estimate : float
        Heuristic absolute-error scale (advisory, always finite and >= 0).
    """

    value: float
    regime: Regime
    order_L: int
    error_estimate: float


#: Calibrated turning-region correction constants.  The two correction
#: bands scale as (x/2)^{-2/3} and (x/2)^{-4/3}; the constants below were
#: frozen from a least-squares fit of the exact recurrence values over
#: degrees 400..3200 and local coordinates |y| <= 3, and reduce the
#: worst-case scaled error at degree 100 from 8.2e-2 to 1.6e-3.
TURNING_CORRECTIONS = {
    "c10": 0.401652,   # Ai'(-y) at order (x/2)^{-2/3}
    "c11": 0.0,        # y^2 Ai(-y) at order (x/2)^{-2/3} (fit ~ 4e-5)
    "c20": -0.018852,  # Ai'(-y) at order (x/2)^{-4/3}
    "c21": -0.024112,  # y^2 Ai(-y) at order (x/2)^{-4/3}
    "c22": 0.007148,   # y^3 Ai'(-y) at order (x/2)^{-4/3}
}

#: Regime thresholds: the interior/exterior expansions require
#: N sin^3(theta) (resp. N sinh^3(theta)) >= N^_REGIME_EPS, and the
#: turning expansion requires |y| <= N^0.2 / 2 in edge coordinates.
_REGIME_EPS = 0.3
_MAX_ORDER = 4

_gamma_half = math.gamma(0.5)


def _g_factor(n: int, m: int) -> float:
    return math.gamma(m + (n + 1) / 2.0) / _gamma_half


@lru_cache(maxsize=1)
def _coeff_table() -> PRCoefficients:
    return pr_coefficients(max_n=4)


def _osc_value(N: int, theta: float, order_L: int) -> tuple[float, float]:
    s = math.sin(theta)
    env = (2.0 / N) ** 0.25 / math.sqrt(math.pi * s)
    big_theta = (N + 1) / 2.0 * (2.0 * theta - math.sin(2.0 * theta))
    psi = math.pi / 4.0 + theta / 2.0
    table = _coeff_table()
    total = 0.0
    n_terms = [0] if order_L <= 2 else [0, 2]
    for n in n_terms:
        for m in range(0, n + 1):
            anm = float(table.a_value(n, m))
            if anm == 0.0 and not (n == 0 and m == 0):
                continue
            if n == 0 and m == 0:
                anm = 1.0
            phase = big_theta + math.pi / 4.0 - theta / 2.0 + (2 * m + n) * psi
            total += (
                _g_factor(n, m)
                * anm
                / ((N + 1.0) ** (n / 2.0) * s ** (m + n / 2.0))
                * math.sin(phase)
            )
    value = env * total
    if order_L >= 3:
        value *= 1.0 - 5.0 / (24.0 * N)
    q = N * s**3
    err = env * (0.045 / q if order_L <= 2 else 0.5 / q**2)
    return value, err


def _exp_value(N: int, theta: float, order_L: int) -> tuple[float, float]:
    sh = math.sinh(theta)
    log_pref = (
        -0.25 * math.log(2.0 * N)
        - 0.5 * math.log(2.0 * math.pi * sh)
        + (N + 1) / 2.0 * (2.0 * theta - math.sinh(2.0 * theta))
        - theta / 2.0
    )
    w = -2.0 / (1.0 - math.exp(-2.0 * theta))
    table = _coeff_table()
    total = 0.0
    n_terms = [0] if order_L <= 2 else [0, 2]
    for n in n_terms:
        for m in range(0, n + 1):
            anm = 1.0 if (n == 0 and m == 0) else float(table.a_value(n, m))
            if anm == 0.0 and not (n == 0 and m == 0):
                continue
            total += (
                _g_factor(n, m)
                * anm
                * w ** (m + n / 2.0)
                / (N + 1.0) ** (n / 2.0)
            )
    if order_L >= 3:
        total *= 1.0 - 5.0 / (24.0 * N)
    value = math.exp(log_pref) * total if log_pref > -700 else 0.0
    q = N * sh**3
    err = abs(value) * (0.6 / q if order_L <= 2 else 1.0 / q**2)
    return value, err


def _turning_value(N: int, x: float, y: float, order_L: int) -> tuple[float, float]:
    scale = 2.0**0.25 * N ** (-1.0 / 12.0)
    ai = float(_airy(-y))
    aip = float(_airy_prime(-y))
    c = TURNING_CORRECTIONS
    total = ai
    if order_L >= 2:
        f2 = (x / 2.0) ** (-2.0 / 3.0)
        total += f2 * (c["c10"] * aip + c["c11"] * y * y * ai)
    if order_L >= 3:
        f4 = (x / 2.0) ** (-4.0 / 3.0)
        total += f4 * (c["c20"] * aip + c["c21"] * y * y * ai + c["c22"] * y**3 * aip)
    if order_L <= 1:
        err = scale * 0.4 * N ** (-1.0 / 3.0) * max(1.0, abs(y))
    elif order_L == 2:
        err = scale * 0.3 * N ** (-2.0 / 3.0) * max(1.0, abs(y) ** 3 / 9.0)
    else:
        err = scale * 0.063 * N ** (-0.8) * max(1.0, abs(y) ** 3 / 27.0)
    return scale * total, err


def pr_hermite(N: int, x: float, order_L: int = 2) -> AsymptoticResult:
    """Large-degree asymptotic value of the Hermite oscillator function.

    Selects one of three expansions according to where ``x`` falls relative
    to the classical edge ``sqrt(2(N+1))``:

    * interior points use the oscillating expansion (valid when
      ``N sin^3 theta`` clears the threshold ``N^0.3``),
    * exterior points use the exponentially-small expansion (threshold on
      ``N sinh^3 theta``),
    * points within the edge window ``|y| <= N^0.2 / 2`` (edge coordinate
      ``y``) use the Airy-type turning expansion with calibrated
      correction bands.

    Level ``order_L`` in 1..4 sets the truncation: levels up to 2 keep the
    leading term; levels 3..4 add the first correction order.

    Raises
    ------
    AmbiguousRegimeError
        When the point falls between the validity bands; the caller must
        move the point or pick a regime explicitly.
    """
    N = int(N)
    if N < 10:
        raise DomainError("pr_hermite requires N >= 10")
    if not np.isfinite(x):
        raise DomainError("x must be finite")
    if order_L < 1:
        raise DomainError("order_L must be >= 1")
    if order_L > _MAX_ORDER:
        raise CapacityError(
            f"order_L {order_L} exceeds implemented cap {_MAX_ORDER}"
        )
    sign = 1.0
    ax = abs(x)
    if x < 0 and N % 2 == 1:
        sign = -1.0
    edge = math.sqrt(2.0 * (N + 1.0))
    threshold = N**_REGIME_EPS

    if ax < edge:
        theta = math.acos(ax / edge)
        if N * math.sin(theta) ** 3 >= threshold:
            value, err = _osc_value(N, theta, order_L)
            return AsymptoticResult(sign * value, Regime.OSCILLATORY, order_L, err)
    else:
        theta = math.acosh(ax / edge)
        if N * math.sinh(theta) ** 3 >= threshold:
            value, err = _exp_value(N, theta, order_L)
            return AsymptoticResult(sign * value, Regime.EXPONENTIAL, order_L, err)

    y = (edge - ax) * math.sqrt(2.0) * N ** (1.0 / 6.0)
    if abs(y) <= 0.5 * N**0.2:
        value, err = _turning_value(N, ax, y, order_L)
        return AsymptoticResult(sign * value, Regime.TURNING, order_L, err)

    raise AmbiguousRegimeError(
        "evaluation point falls between the interior/exterior validity "
        f"bands and the edge window (edge coordinate y = {y:.3f}, "
        f"window half-width {0.5 * N**0.2:.3f})"
    )
