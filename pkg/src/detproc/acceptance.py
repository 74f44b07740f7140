"""Quantitative verification battery for the whole library.

Fourteen numbered checks exercise every layer end to end: projection
identities, large-degree expansion rates, static and time-extended limit
kernels, configuration generating functions, exact determinantal
samplers, and stochastic path simulations.  Each check recomputes its
quantities from scratch against a fixed tolerance and returns a
:class:`CriterionResult`; :func:`run_suite` executes a battery and emits
one PASS/FAIL line per check.

Monte-Carlo checks use fixed seeds, so every run is reproducible
bit-for-bit; their tolerances include explicit sampling-error slack
(three standard errors) on top of any analytic bound.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import asymptotics, configspace, dpp, dynamics, kernels, specfun
from .configuration import Configuration
from .kernels import KernelFamily, KernelSpec

__all__ = [
    "ALL_CHECKS",
    "FAST_CHECKS",
    "CriterionResult",
    "run_suite",
    "window_rate_error",
]


@dataclass(frozen=True)
class CriterionResult:
    """Outcome of one numbered verification check."""

    number: int
    name: str
    passed: bool
    detail: str
    elapsed_s: float

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def line(self) -> str:
        return (
            f"[{self.status}] check {self.number:02d} — {self.name}: "
            f"{self.detail} [{self.elapsed_s:.2f}s]"
        )


def _finish(number, name, passed, detail, t0) -> CriterionResult:
    return CriterionResult(number, name, bool(passed), detail, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# 1. Summed-square projection identity
# ---------------------------------------------------------------------------

def criterion_01() -> CriterionResult:
    """The rank-N diagonal equals its three-term boundary form exactly."""
    t0 = time.perf_counter()
    worst = 0.0
    for N in (10, 50, 200):
        for x in (0.0, 1.0, 5.0, 10.0):
            lhs, rhs = kernels.christoffel_darboux(N, x)
            worst = max(worst, abs(lhs - rhs) / abs(lhs))
    return _finish(
        1,
        "summed-square projection identity",
        worst <= 1e-10,
        f"max relative defect {worst:.3e} (tol 1e-10)",
        t0,
    )


# ---------------------------------------------------------------------------
# 2. Interior-expansion error rate
# ---------------------------------------------------------------------------

def window_rate_error(N: int) -> float:
    """RMS envelope-relative truncation error near degree ``N``.

    Averaging over eight consecutive degrees washes out the oscillatory
    modulation of the pointwise error, leaving the clean decay rate.
    """
    theta = math.pi / 3.0
    envelope_s = math.sin(theta)
    acc = 0.0
    n_window = 8
    for j in range(N, N + n_window):
        edge = math.sqrt(2.0 * (j + 1.0))
        x = edge * math.cos(theta)
        exact = specfun.hermite_phi(j, x)
        approx = asymptotics.pr_hermite(j, x, order_L=2).value
        envelope = (2.0 / j) ** 0.25 / math.sqrt(math.pi * envelope_s)
        acc += ((approx - exact) / envelope) ** 2
    return math.sqrt(acc / n_window)


def criterion_02() -> CriterionResult:
    """Doubling the degree halves the truncation error of the interior expansion."""
    t0 = time.perf_counter()
    errs = {N: window_rate_error(N) for N in (100, 200, 400)}
    r1 = errs[200] / errs[100]
    r2 = errs[400] / errs[200]
    passed = 0.3 <= r1 <= 0.7 and 0.3 <= r2 <= 0.7
    return _finish(
        2,
        "interior-expansion error halves per degree doubling",
        passed,
        f"decay ratios {r1:.3f}, {r2:.3f} (required within [0.3, 0.7])",
        t0,
    )


# ---------------------------------------------------------------------------
# 3. Edge density far-field profile
# ---------------------------------------------------------------------------

def criterion_03() -> CriterionResult:
    """Left tail of the edge density approaches sqrt(x)/pi; right tail vanishes."""
    t0 = time.perf_counter()
    xs = np.linspace(5.0, 50.0, 901)
    dens = kernels.airy_density(-xs)
    weighted = xs * np.abs(dens - np.sqrt(xs) / math.pi)
    worst = float(np.max(weighted))
    right = float(kernels.airy_density(5.0))
    passed = worst <= 1.0 and right <= 1e-6
    return _finish(
        3,
        "edge density far-field profile",
        passed,
        f"max weighted left-tail deviation {worst:.4f} (tol 1.0); "
        f"density at +5 is {right:.3e} (tol 1e-6)",
        t0,
    )


# ---------------------------------------------------------------------------
# 4. Finite-rank edge density: weighted closeness without growth
# ---------------------------------------------------------------------------

def criterion_04() -> CriterionResult:
    """|x|-weighted gap between the finite edge density and its profile stays bounded."""
    t0 = time.perf_counter()
    consts = {}
    for N in (50, 200):
        left = np.linspace(-4.0 * N**0.09, -5.0, 121)
        right = np.linspace(5.0, 20.0, 121)
        xs = np.concatenate([left, right])
        gap = np.abs(kernels.rho_A(N, xs) - kernels.semicircle_edge(N, xs))
        consts[N] = float(np.max(np.abs(xs) * gap))
    # "Bounded by one constant across N" operationally: the larger rank may
    # not exceed the smaller one beyond a fixed noise allowance.
    passed = consts[200] <= 1.2 * consts[50] + 0.1
    return _finish(
        4,
        "weighted finite-rank edge deviation stays bounded",
        passed,
        f"weighted sup at rank 50: {consts[50]:.4f}; at rank 200: "
        f"{consts[200]:.4f} (no growth allowed)",
        t0,
    )


# ---------------------------------------------------------------------------
# 5. Center-scaled kernels approach the translation-invariant limit
# ---------------------------------------------------------------------------

def criterion_05() -> CriterionResult:
    """Center-window sup distance to the translation-invariant kernel decreases."""
    t0 = time.perf_counter()
    grid = np.linspace(-2.0, 2.0, 21)
    ref = kernels.sine_kernel(grid, grid)
    sups = []
    for N in (10, 50, 200):
        t = kernels.bulk_time(N)
        mat = kernels.finite_hermite_kernel(N, t, grid, t, grid)
        sups.append(float(np.max(np.abs(mat - ref))))
    passed = sups[0] > sups[1] > sups[2] and sups[2] <= 0.02
    seq = ", ".join(f"{v:.5f}" for v in sups)
    return _finish(
        5,
        "center-scaled kernels approach the translation-invariant limit",
        passed,
        f"sup distances at ranks 10/50/200: {seq} "
        "(strictly decreasing, final <= 0.02)",
        t0,
    )


# ---------------------------------------------------------------------------
# 6. Wall-scaled kernels approach the hard-edge limit
# ---------------------------------------------------------------------------

def criterion_06() -> CriterionResult:
    """Hard-wall sup distance to the limiting kernel decreases at both indices."""
    t0 = time.perf_counter()
    grid = np.linspace(0.0, 4.0, 21)
    passed = True
    pieces = []
    for nu in (0.0, 0.5):
        ref = kernels.bessel_kernel(nu, grid, grid)
        sups = []
        for N in (10, 50, 200):
            t = kernels.hard_edge_time(N)
            mat = kernels.finite_laguerre_kernel(N, nu, t, grid, t, grid)
            sups.append(float(np.max(np.abs(mat - ref))))
        passed = passed and sups[0] > sups[1] > sups[2]
        pieces.append(
            f"nu={nu}: " + "/".join(f"{v:.5f}" for v in sups)
        )
    return _finish(
        6,
        "wall-scaled kernels approach the hard-edge limit",
        passed,
        "sup distances at ranks 10/50/200 — " + "; ".join(pieces)
        + " (strictly decreasing)",
        t0,
    )


# ---------------------------------------------------------------------------
# 7. Edge-scaled density approaches the limiting edge density
# ---------------------------------------------------------------------------

def criterion_07() -> CriterionResult:
    """Sup distance of the finite edge density to its limit decreases in rank."""
    t0 = time.perf_counter()
    grid = np.linspace(-5.0, 3.0, 161)
    ref = kernels.airy_density(grid)
    sups = []
    for N in (20, 50, 200):
        sups.append(float(np.max(np.abs(kernels.rho_A(N, grid) - ref))))
    passed = sups[0] > sups[1] > sups[2]
    seq = ", ".join(f"{v:.5f}" for v in sups)
    return _finish(
        7,
        "edge-scaled density approaches the limiting edge density",
        passed,
        f"sup distances at ranks 20/50/200: {seq} (strictly decreasing)",
        t0,
    )


# ---------------------------------------------------------------------------
# 8. Equal-time reduction of the time-extended kernels
# ---------------------------------------------------------------------------

def criterion_08() -> CriterionResult:
    """Each time-extended kernel collapses to its static form at equal times."""
    t0 = time.perf_counter()
    tiny = 1e-300
    worst = {}
    g = np.linspace(-3.0, 3.0, 20)
    worst["translation-invariant"] = float(
        np.max(
            np.abs(
                kernels.extended_sine_kernel(0.0, g, tiny, g)
                - kernels.sine_kernel(g, g)
            )
        )
    )
    ga = np.linspace(-4.0, 2.0, 20)
    worst["edge"] = float(
        np.max(
            np.abs(
                kernels.extended_airy_kernel(0.0, ga, 0.0, ga)
                - kernels.airy_kernel(ga, ga)
            )
        )
    )
    gb = np.linspace(0.0, 4.0, 20)
    for nu in (0.0, 0.5):
        worst[f"hard-edge nu={nu}"] = float(
            np.max(
                np.abs(
                    kernels.extended_bessel_kernel(nu, 0.0, gb, tiny, gb)
                    - kernels.bessel_kernel(nu, gb, gb)
                )
            )
        )
    passed = all(v <= 1e-10 for v in worst.values())
    detail = "; ".join(f"{k}: {v:.2e}" for k, v in worst.items())
    return _finish(
        8,
        "time-extended kernels collapse to static forms at equal times",
        passed,
        detail + " (tol 1e-10, 20x20 grids)",
        t0,
    )


# ---------------------------------------------------------------------------
# 9. Two-time block determinant vs. path-simulation statistics
# ---------------------------------------------------------------------------

def criterion_09() -> CriterionResult:
    """Two-time multiplicative statistics: block determinant vs. simulation."""
    t0 = time.perf_counter()
    amps = (0.35, -0.45)
    windows = [(-1.6, 0.9), (-0.8, 1.7)]
    times = (0.5, 1.0)
    spec = KernelSpec(family=KernelFamily.HERMITE_N, N=2)
    chis = [math.expm1(a) for a in amps]
    pred = dpp.multitime_fredholm(spec, times, windows, chis, n_nodes=48).value

    ens = dynamics.simulate_dyson(
        2, "origin", (0.0,) + times, dt_max=0.005, R=100_000, seed=109
    )

    def _bump(a, lo, hi):
        return lambda x: a * ((x >= lo) & (x <= hi)).astype(float)

    fs = [_bump(a, lo, hi) for a, (lo, hi) in zip(amps, windows)]
    est, se = dynamics.empirical_mgf(ens, times, fs)
    gap = abs(pred - est)
    passed = gap <= 3.0 * se
    return _finish(
        9,
        "two-time block determinant matches simulated statistics",
        passed,
        f"determinant {pred:.6f}, simulation {est:.6f} ± {se:.6f} "
        f"(|gap| = {gap / max(se, 1e-300):.2f} standard errors, limit 3)",
        t0,
    )


# ---------------------------------------------------------------------------
# 10. Sampled counts satisfy the centered moment bounds
# ---------------------------------------------------------------------------

def _sine_samples(n_samples: int, seed: int):
    op = dpp.nystrom(kernels.sine_kernel, (0.0, 5.0), 64)
    dec = dpp.decompose(op, kernel=kernels.sine_kernel)
    rng = np.random.default_rng(seed)
    return [dpp.sample(dec, rng) for _ in range(n_samples)]


def criterion_10() -> CriterionResult:
    """Centered count moments of the sampled point process meet their bounds."""
    t0 = time.perf_counter()
    samples = _sine_samples(10_000, seed=110)
    counts = np.array([s.count_in(0.0, 5.0) for s in samples], dtype=float)
    passed = True
    pieces = []
    for k in (1, 2):
        emp, bound = dpp.moment_diagnostic(samples, (0.0, 5.0), k, 5.0)
        stats = np.abs(counts - 5.0) ** (2 * k)
        se = float(np.std(stats, ddof=1) / math.sqrt(stats.size))
        passed = passed and emp <= bound + 3.0 * se
        pieces.append(f"order {2 * k}: {emp:.3f} vs bound {bound:.0f} (se {se:.3f})")
    return _finish(
        10,
        "sampled counts satisfy centered moment bounds",
        passed,
        "; ".join(pieces) + " — 10000 draws on [0, 5]",
        t0,
    )


# ---------------------------------------------------------------------------
# 11. Sampled correlations match the determinant formulas
# ---------------------------------------------------------------------------

def criterion_11() -> CriterionResult:
    """One- and two-point counting statistics agree with determinant values."""
    t0 = time.perf_counter()
    samples = _sine_samples(10_000, seed=111)
    R = len(samples)
    passed = True
    worst_one = 0.0
    # One-point: expected count in each unit cell equals the diagonal mass 1.
    for lo in range(5):
        counts = np.array(
            [s.count_in(float(lo), float(lo + 1)) for s in samples], dtype=float
        )
        se = float(np.std(counts, ddof=1) / math.sqrt(R))
        z = abs(float(np.mean(counts)) - 1.0) / se
        worst_one = max(worst_one, z)
        passed = passed and z <= 3.0
    # Two-point: expected ordered-pair count over disjoint cells A x B equals
    # the double integral of the pair intensity det[[K(x,x), K(x,y)], ...].
    from .quadrature import gauss_legendre

    worst_two = 0.0
    for (a_lo, a_hi), (b_lo, b_hi) in (
        ((0.0, 1.0), (2.0, 3.0)),
        ((1.0, 2.0), (4.0, 5.0)),
        ((0.0, 2.0), (3.0, 5.0)),
    ):
        xs, wx = gauss_legendre(a_lo, a_hi, 24)
        ys, wy = gauss_legendre(b_lo, b_hi, 24)
        kxy = kernels.sine_kernel(xs, ys)
        pair_intensity = 1.0 - kxy**2  # diagonal is identically one
        expected = float(wx @ pair_intensity @ wy)
        stats = np.array(
            [
                s.count_in(a_lo, a_hi) * s.count_in(b_lo, b_hi)
                for s in samples
            ],
            dtype=float,
        )
        se = float(np.std(stats, ddof=1) / math.sqrt(R))
        z = abs(float(np.mean(stats)) - expected) / se
        worst_two = max(worst_two, z)
        passed = passed and z <= 3.0
    return _finish(
        11,
        "sampled correlations match determinant formulas",
        passed,
        f"worst one-point deviation {worst_one:.2f} se over 5 cells; "
        f"worst two-point deviation {worst_two:.2f} se over 3 cell pairs "
        "(limit 3)",
        t0,
    )


# ---------------------------------------------------------------------------
# 12. Path-simulation marginals match exact laws
# ---------------------------------------------------------------------------

def _binned_l1(p_hat: np.ndarray, p_exact: np.ndarray) -> float:
    """Total variation-style L1 over partition cells including both tails."""
    tail_hat = max(0.0, 1.0 - float(np.sum(p_hat)))
    tail_exact = max(0.0, 1.0 - float(np.sum(p_exact)))
    return float(np.sum(np.abs(p_hat - p_exact))) + abs(tail_hat - tail_exact)


def criterion_12() -> CriterionResult:
    """Single-particle and small-rank simulation marginals match exact laws."""
    t0 = time.perf_counter()
    pieces = []
    passed = True

    # (a) One free particle from the origin: variance grows linearly in time.
    ens = dynamics.simulate_dyson(
        1, "origin", (0.0, 0.5, 1.0), dt_max=0.005, R=20_000, seed=112
    )
    for t in (0.5, 1.0):
        x = ens.positions_at(t)[:, 0]
        R = x.size
        var = float(np.var(x, ddof=1))
        centered = x - float(np.mean(x))
        m2 = float(np.mean(centered**2))
        m4 = float(np.mean(centered**4))
        se_var = math.sqrt(max(m4 - m2 * m2, 0.0) / R)
        z = abs(var - t) / se_var
        passed = passed and z <= 3.0
        pieces.append(f"variance at t={t}: {var:.4f} vs {t} ({z:.2f} se)")

    # (b) One squared-radial particle from the origin: marginal density at
    # index 0 and time 0.5 is exponential with scale 2t = 1.
    ens_b = dynamics.simulate_besq(
        1, 0.0, "origin", (0.0, 0.5), dt_max=0.00125, R=20_000, seed=1120
    )
    xb = ens_b.positions_at(0.5)[:, 0]
    edges = np.arange(0.0, 8.0 + 1e-12, 0.5)
    counts, _ = np.histogram(xb, bins=edges)
    p_hat = counts / xb.size
    p_exact = np.exp(-edges[:-1]) - np.exp(-edges[1:])
    l1_b = _binned_l1(p_hat, p_exact)
    passed = passed and l1_b < 0.05
    pieces.append(f"wall-process marginal L1 {l1_b:.4f} (tol 0.05)")

    # (c) Ten interacting particles from the origin: per-particle position
    # histogram at time 1 against the exact rank-10 density.
    from .quadrature import gauss_legendre

    ens_c = dynamics.simulate_dyson(
        10, "origin", (0.0, 1.0), dt_max=0.002, R=1_000, seed=1121
    )
    xc = ens_c.positions_at(1.0).ravel()
    edges_c = np.arange(-8.0, 8.0 + 1e-12, 1.0)
    counts_c, _ = np.histogram(xc, bins=edges_c)
    p_hat_c = counts_c / xc.size
    p_exact_c = np.empty(edges_c.size - 1)
    for i in range(edges_c.size - 1):
        nodes, wts = gauss_legendre(edges_c[i], edges_c[i + 1], 24)
        p_exact_c[i] = float(wts @ kernels.gue_density(10, 1.0, nodes)) / 10.0
    l1_c = _binned_l1(p_hat_c, p_exact_c)
    passed = passed and l1_c < 0.05
    pieces.append(f"rank-10 marginal L1 {l1_c:.4f} (tol 0.05)")

    return _finish(
        12,
        "path-simulation marginals match exact laws",
        passed,
        "; ".join(pieces),
        t0,
    )


# ---------------------------------------------------------------------------
# 13. Configuration generating functions: identities and metric checks
# ---------------------------------------------------------------------------

def criterion_13() -> CriterionResult:
    """Exact identities of the configuration generating functions."""
    t0 = time.perf_counter()
    passed = True
    notes = []

    # Order-0 primary factor is literally 1 - u.
    exact_zero = all(
        configspace.weierstrass_G(u, 0) == 1.0 - u
        for u in (0.3, -1.2, 0.5 + 2.0j, 0.0)
    )
    passed = passed and exact_zero
    notes.append(f"order-0 factor exact: {exact_zero}")

    # Multiplicativity over disjoint unions.
    xi1 = Configuration.from_points([1.0, 2.5, -0.7])
    xi2 = Configuration.from_points([-3.2, 0.4])
    union = Configuration.from_points([1.0, 2.5, -0.7, -3.2, 0.4])
    z = 0.1
    ws = np.array([0.6 + 0.4j, -1.3 + 0.0j, 2.2 - 1.1j])
    worst_mult = 0.0
    for p in (0, 1, 2):
        lhs = configspace.phi_entire(union, p, z, ws)
        rhs = configspace.phi_entire(xi1, p, z, ws) * configspace.phi_entire(
            xi2, p, z, ws
        )
        worst_mult = max(
            worst_mult, float(np.max(np.abs(lhs - rhs) / np.abs(rhs)))
        )
    passed = passed and worst_mult <= 1e-12
    notes.append(f"union multiplicativity defect {worst_mult:.2e} (tol 1e-12)")

    # Translation covariance: shifting configuration, anchor, and argument
    # together leaves the value unchanged.
    shift = 0.6180339887498949
    xi_shift = Configuration.from_points([pt + shift for pt in (1.0, 2.5, -0.7)])
    worst_shift = 0.0
    for p in (0, 1, 2):
        a = configspace.phi_entire(xi1, p, z, ws)
        b = configspace.phi_entire(xi_shift, p, z + shift, ws + shift)
        worst_shift = max(worst_shift, float(np.max(np.abs(a - b) / np.abs(a))))
    passed = passed and worst_shift <= 1e-12
    notes.append(f"translation covariance defect {worst_shift:.2e} (tol 1e-12)")

    # Sup-metric sanity: symmetry, identity, triangle inequality on random
    # configuration triples.
    rng = np.random.default_rng(113)
    worst_tri = -np.inf
    ok_metric = True
    for _ in range(10):
        cfgs = [
            Configuration.from_points(
                np.round(rng.uniform(-5.0, 5.0, rng.integers(3, 7)), 6)
            )
            for _ in range(3)
        ]
        d12 = configspace.moderate_distance(cfgs[0], cfgs[1])
        d21 = configspace.moderate_distance(cfgs[1], cfgs[0])
        d23 = configspace.moderate_distance(cfgs[1], cfgs[2])
        d13 = configspace.moderate_distance(cfgs[0], cfgs[2])
        ok_metric = ok_metric and abs(d12 - d21) <= 1e-12
        ok_metric = (
            ok_metric
            and configspace.moderate_distance(cfgs[0], cfgs[0]) == 0.0
        )
        slack = d12 + d23 - d13
        worst_tri = max(worst_tri, -slack)
        ok_metric = ok_metric and slack >= -1e-12
    passed = passed and ok_metric
    notes.append(
        f"metric checks on 10 random triples: worst triangle defect "
        f"{max(worst_tri, 0.0):.2e}"
    )

    return _finish(
        13,
        "configuration generating functions: identities and metric",
        passed,
        "; ".join(notes),
        t0,
    )


# ---------------------------------------------------------------------------
# 14. Edge-profile inverse-first moment
# ---------------------------------------------------------------------------

def criterion_14() -> CriterionResult:
    """Numerical inverse-first moment of the edge profile hits -N^(1/3)."""
    t0 = time.perf_counter()
    worst = 0.0
    for N in (8, 27, 125):
        val = kernels.DriftDensity.semicircle(N).drift_integral()
        worst = max(worst, abs(val + float(N) ** (1.0 / 3.0)))
    return _finish(
        14,
        "edge-profile inverse-first moment matches closed form",
        worst <= 1e-8,
        f"max absolute defect {worst:.3e} (tol 1e-8) over ranks 8, 27, 125",
        t0,
    )


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

_REGISTRY = {
    1: criterion_01,
    2: criterion_02,
    3: criterion_03,
    4: criterion_04,
    5: criterion_05,
    6: criterion_06,
    7: criterion_07,
    8: criterion_08,
    9: criterion_09,
    10: criterion_10,
    11: criterion_11,
    12: criterion_12,
    13: criterion_13,
    14: criterion_14,
}

#: Checks cheap enough for an edit-test loop (well under two minutes total).
FAST_CHECKS = (1, 2, 3, 8, 13, 14)

#: Every check, Monte-Carlo batteries included (under thirty minutes total).
ALL_CHECKS = tuple(sorted(_REGISTRY))


def run_suite(which="fast", emit=None) -> list[CriterionResult]:
    """Run a battery of verification checks.

    Parameters
    ----------
    which : "fast", "full", or iterable of check numbers
    emit : callable or None
        Called with each result line as it completes (e.g. ``print``).

    Returns the list of :class:`CriterionResult`, in execution order.
    """
    if which == "fast":
        numbers = FAST_CHECKS
    elif which == "full":
        numbers = ALL_CHECKS
    else:
        numbers = tuple(int(n) for n in which)
        unknown = [n for n in numbers if n not in _REGISTRY]
        if unknown:
            raise ValueError(f"unknown check numbers: {unknown}")
    results = []
    for n in numbers:
        res = _REGISTRY[n]()
        if emit is not None:
            emit(res.line())
        results.append(res)
    return results
