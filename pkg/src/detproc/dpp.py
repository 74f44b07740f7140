"""Determinantal point process machinery.

Nystrom discretization of correlation operators, Fredholm determinants
(single-time and multitime block form), exact sampling through the
Bernoulli-thinned chain rule, and moment / tail diagnostics for sampled
configurations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg as _la

from .configuration import Configuration
from .errors import (
    DomainError,
    SamplerInstabilityError,
    ValidationError,
)
from .kernels import KernelSpec
from .quadrature import gauss_legendre

__all__ = [
    "DiscretizedOperator",
    "SpectralDecomposition",
    "nystrom",
    "decompose",
    "fredholm_det",
    "MultitimeResult",
    "multitime_fredholm",
    "correlation_fn",
    "sample",
    "moment_diagnostic",
    "TailFieldReport",
    "tail_field_diagnostic",
    "write_samples",
    "read_samples",
    "write_fredholm_csv",
]


# ---------------------------------------------------------------------------
# Discretization
# ---------------------------------------------------------------------------

def _normalize_domain(domain) -> list[tuple[float, float]]:
    """Accept ``(lo, hi)`` or an iterable of such pairs; drop empty pieces."""
    if domain is None:
        return []
    first = np.asarray(domain, dtype=float)
    if first.ndim == 1 and first.size == 2:
        pieces = [tuple(first)]
    else:
        pieces = [tuple(np.asarray(p, dtype=float)) for p in domain]
    out = []
    for lo, hi in pieces:
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise DomainError("domain endpoints must be finite")
        if hi < lo:
            raise DomainError(f"empty orientation in domain piece ({lo}, {hi})")
        if hi > lo:
            out.append((float(lo), float(hi)))
    return out


@dataclass(frozen=True)
class DiscretizedOperator:
    """A kernel restricted to a bounded domain, sampled on quadrature nodes.

    Attributes
    ----------
    nodes, weights : ndarray
        Quadrature rule over the domain (weights strictly positive).
    kmat : ndarray
        Symmetric kernel matrix ``K(x_i, x_j)``.
    domain : tuple of (lo, hi) pairs
    """

    nodes: np.ndarray
    weights: np.ndarray
    kmat: np.ndarray
    domain: tuple

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        kmat = np.asarray(self.kmat, dtype=float)
        if nodes.ndim != 1 or weights.shape != nodes.shape:
            raise ValidationError("nodes and weights must be matching vectors")
        if kmat.shape != (nodes.size, nodes.size):
            raise ValidationError("kernel matrix shape must match the node count")
        if np.any(weights <= 0):
            raise ValidationError("quadrature weights must be positive")
        if not np.all(np.isfinite(kmat)):
            raise ValidationError("kernel matrix contains non-finite entries")
        if kmat.size and np.max(np.abs(kmat - kmat.T)) > 1e-12 * max(
            1.0, float(np.max(np.abs(kmat)))
        ):
            raise ValidationError("kernel matrix must be symmetric to 1e-12")
        for arr in (nodes, weights, kmat):
            arr.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "kmat", kmat)

    @property
    def dim(self) -> int:
        return self.nodes.size

    def trace(self) -> float:
        """Weighted trace, approximating the integral of the diagonal."""
        if self.dim == 0:
            return 0.0
        return float(np.sum(self.weights * np.diag(self.kmat)))

    def symmetrized_matrix(self) -> np.ndarray:
        """``W^{1/2} K W^{1/2}``, the similarity-transformed symmetric form."""
        if self.dim == 0:
            return np.zeros((0, 0))
        sq = np.sqrt(self.weights)
        return sq[:, None] * self.kmat * sq[None, :]


def _kernel_matrix(kernel, xs: np.ndarray, ys: np.ndarray, time) -> np.ndarray:
    if isinstance(kernel, KernelSpec):
        return np.asarray(kernel.matrix(time, xs, time, ys), dtype=float)
    return np.asarray(kernel(xs, ys), dtype=float)


def nystrom(kernel, domain, n_nodes: int, time: float | None = None) -> DiscretizedOperator:
    """Discretize a kernel on a bounded domain with Gauss-Legendre rules.

    Parameters
    ----------
    kernel : KernelSpec or callable
        A callable must follow the grid-axis convention
        ``kernel(x_axis, y_axis) -> matrix``.
    domain : (lo, hi) or iterable of such pairs
        Each piece gets its own ``n_nodes``-point rule.
    n_nodes : int
        Nodes per piece, at least 4.
    time : float, optional
        Time slice forwarded to time-dependent kernel specs.
    """
    pieces = _normalize_domain(domain)
    if not pieces:
        return DiscretizedOperator(
            nodes=np.zeros(0), weights=np.zeros(0), kmat=np.zeros((0, 0)), domain=()
        )
    if n_nodes < 4:
        raise ValidationError("nystrom requires n_nodes >= 4")
    xs_list, ws_list = [], []
    for lo, hi in pieces:
        x, w = gauss_legendre(lo, hi, n_nodes)
        xs_list.append(x)
        ws_list.append(w)
    nodes = np.concatenate(xs_list)
    weights = np.concatenate(ws_list)
    try:
        kmat = _kernel_matrix(kernel, nodes, nodes, time)
    except Exception as exc:
        lo = float(nodes.min())
        hi = float(nodes.max())
        raise type(exc)(
            f"{exc} [while evaluating the kernel on nodes in [{lo:.6g}, {hi:.6g}]]"
        ) from exc
    kmat = 0.5 * (kmat + kmat.T)
    return DiscretizedOperator(
        nodes=nodes, weights=weights, kmat=kmat, domain=tuple(pieces)
    )


# ---------------------------------------------------------------------------
# Spectral decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigen-data of a discretized operator, prepared for sampling.

    ``eigenvalues`` are clamped to [0, 1]; ``raw_eigenvalues`` keep the
    pre-clamp values for extension formulas.  ``funcs`` holds the
    weight-orthonormal eigenfunction values at the nodes, one column per
    eigenfunction.  ``kernel`` retains the evaluator for off-node
    extension, when available.
    """

    operator: DiscretizedOperator
    eigenvalues: np.ndarray
    raw_eigenvalues: np.ndarray
    funcs: np.ndarray
    kernel: object = None
    time: float | None = None

    def extend(self, x: np.ndarray, indices: np.ndarray) -> np.ndarray:
        """Eigenfunction values at arbitrary points via the quadrature
        extension ``phi_j(x) = (1/lambda_j) sum_i w_i K(x, x_i) phi_j(x_i)``.

        Returns an array of shape ``(len(x), len(indices))``.
        """
        if self.kernel is None:
            raise ValidationError(
                "off-node evaluation needs the kernel retained at decomposition"
            )
        x = np.atleast_1d(np.asarray(x, dtype=float))
        op = self.operator
        kx = _kernel_matrix(self.kernel, x, op.nodes, self.time)
        lam = np.maximum(self.raw_eigenvalues[indices], 1e-12)
        return (kx * op.weights[None, :]) @ self.funcs[:, indices] / lam[None, :]


def decompose(
    op: DiscretizedOperator,
    kernel=None,
    time: float | None = None,
    clamp_tol: float = 1e-8,
) -> SpectralDecomposition:
    """Symmetric eigendecomposition of ``W^{1/2} K W^{1/2}`` with
    probability clamping.

    Eigenvalues within ``clamp_tol`` outside [0, 1] are clamped; larger
    excursions raise, because Bernoulli selection would lose its meaning.
    """
    b = op.symmetrized_matrix()
    if op.dim == 0:
        return SpectralDecomposition(
            operator=op,
            eigenvalues=np.zeros(0),
            raw_eigenvalues=np.zeros(0),
            funcs=np.zeros((0, 0)),
            kernel=kernel,
            time=time,
        )
    lam, vec = np.linalg.eigh(b)
    if lam.min() < -clamp_tol or lam.max() > 1.0 + clamp_tol:
        raise ValidationError(
            f"operator spectrum [{lam.min():.3e}, {lam.max():.3e}] leaves "
            f"[0, 1] by more than {clamp_tol:g}; not a correlation operator "
            "on this discretization"
        )
    clamped = np.clip(lam, 0.0, 1.0)
    funcs = vec / np.sqrt(op.weights)[:, None]
    return SpectralDecomposition(
        operator=op,
        eigenvalues=clamped,
        raw_eigenvalues=lam,
        funcs=funcs,
        kernel=kernel,
        time=time,
    )


# ---------------------------------------------------------------------------
# Fredholm determinants
# ---------------------------------------------------------------------------

def fredholm_det(op: DiscretizedOperator, z: float) -> float:
    """``det(I - z W^{1/2} K W^{1/2})`` through the symmetric spectrum.

    At ``z = 1`` this is the probability that the process puts no point in
    the operator's domain.
    """
    if op.dim == 0:
        return 1.0
    lam = np.linalg.eigvalsh(op.symmetrized_matrix())
    return float(np.prod(1.0 - z * lam))


@dataclass(frozen=True)
class MultitimeResult:
    """Value of a multitime block determinant plus a self-convergence check.

    ``coarse_value`` comes from a two-thirds-resolution grid; ``warning``
    is set when the two disagree beyond tolerance.
    """

    value: float
    coarse_value: float | None
    warning: str | None

    def __float__(self) -> float:
        return self.value


def _as_multiplier(chi):
    if callable(chi):
        return chi
    const = float(chi)
    return lambda xs: np.full_like(np.asarray(xs, dtype=float), const)


def _block_det(spec: KernelSpec, times, domains, chis, n_nodes: int) -> float:
    rules = [gauss_legendre(lo, hi, n_nodes) for lo, hi in domains]
    xs = [r[0] for r in rules]
    chi_w = [np.asarray(chis[m](xs[m]), dtype=float) * rules[m][1] for m in range(len(times))]
    sizes = [x.size for x in xs]
    total = sum(sizes)
    a = np.eye(total)
    offs = np.concatenate([[0], np.cumsum(sizes)])
    for i, ti in enumerate(times):
        for j, tj in enumerate(times):
            block = spec.matrix(ti, xs[i], tj, xs[j])
            a[offs[i]:offs[i + 1], offs[j]:offs[j + 1]] += block * chi_w[j][None, :]
    lu, piv = _la.lu_factor(a, check_finite=True)
    sign = 1.0 if np.sum(piv != np.arange(total)) % 2 == 0 else -1.0
    diag = np.diag(lu)
    sign *= float(np.prod(np.sign(diag)))
    log_mag = float(np.sum(np.log(np.abs(diag))))
    return sign * math.exp(log_mag)


def multitime_fredholm(
    spec: KernelSpec,
    times,
    domains,
    chis,
    n_nodes: int = 48,
    check: bool = True,
    check_tol: float = 1e-6,
) -> MultitimeResult:
    """Block Fredholm determinant ``det(I + K chi)`` over several times.

    Parameters
    ----------
    spec : KernelSpec
        A time-extended kernel family.
    times : increasing floats
    domains : one bounded interval per time
    chis : one callable (or constant) per time
        Multiplier functions, bounded, supported inside their intervals;
        ``-1`` on a window turns the determinant into the probability of
        seeing no point there.
    n_nodes : int
        Gauss-Legendre nodes per interval.
    check : bool
        Re-evaluate on a two-thirds grid; disagreement sets the warning
        field instead of raising.

    Notes
    -----
    The block matrix is genuinely non-symmetric (the backward-time branch
    breaks symmetry), so a pivoted LU factorization supplies the
    determinant, with the sign recovered from the permutation parity.
    """
    times = [float(t) for t in times]
    if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
        raise ValidationError("times must be strictly increasing")
    domains = _normalize_domain(domains)
    if len(domains) != len(times) or len(chis) != len(times):
        raise ValidationError("need one domain and one multiplier per time")
    chis = [_as_multiplier(c) for c in chis]
    value = _block_det(spec, times, domains, chis, n_nodes)
    coarse = None
    warning = None
    if check:
        coarse = _block_det(spec, times, domains, chis, max(8, (2 * n_nodes) // 3))
        if abs(coarse - value) > check_tol * max(1.0, abs(value)):
            warning = (
                f"grid self-convergence check failed: {value:.10e} vs "
                f"{coarse:.10e} on the coarser grid"
            )
    return MultitimeResult(value=value, coarse_value=coarse, warning=warning)


def correlation_fn(kernel, points) -> float:
    """Joint intensity at distinct points: the determinant of the kernel
    matrix over the point set."""
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    if pts.size < 1:
        raise ValidationError("correlation_fn needs at least one point")
    if isinstance(kernel, DiscretizedOperator):
        idx = []
        for p in pts:
            hit = np.nonzero(np.isclose(kernel.nodes, p, rtol=0.0, atol=1e-12))[0]
            if hit.size == 0:
                raise ValidationError(
                    "for discretized operators, correlation points must be nodes"
                )
            idx.append(hit[0])
        mat = kernel.kmat[np.ix_(idx, idx)]
    else:
        mat = _kernel_matrix(kernel, pts, pts, None)
    return float(np.linalg.det(mat))


# ---------------------------------------------------------------------------
# Exact sampling
# ---------------------------------------------------------------------------

def _uniform_in(domain, rng: np.random.Generator) -> float:
    lengths = np.array([hi - lo for lo, hi in domain])
    probs = lengths / lengths.sum()
    piece = rng.choice(len(domain), p=probs)
    lo, hi = domain[piece]
    return float(lo + (hi - lo) * rng.random())


def sample(
    dec: SpectralDecomposition,
    rng: np.random.Generator,
    max_rejections: int = 200_000,
) -> Configuration:
    """Draw one configuration exactly from the determinantal law.

    Two stages: each eigenfunction joins the active set independently with
    probability equal to its eigenvalue; the resulting projection process
    is then sampled by the chain rule, drawing each point from the current
    marginal intensity by rejection (uniform proposals against a 1.2 x
    node-maximum envelope) and removing the matched direction with an
    exact rotation followed by modified Gram-Schmidt re-orthonormalization.
    """
    op = dec.operator
    if op.dim == 0 or dec.eigenvalues.size == 0:
        return Configuration.empty()
    keep = rng.random(dec.eigenvalues.size) < dec.eigenvalues
    idx = np.nonzero(keep)[0]
    n_pts = idx.size
    if n_pts == 0:
        return Configuration.empty()

    # Coefficient rows express the current basis in the selected eigenbasis.
    coeff = np.eye(n_pts)
    funcs_nodes = dec.funcs[:, idx]  # (n_nodes, n_sel)
    domain = op.domain
    points = []
    rejections = 0
    for remaining in range(n_pts, 0, -1):
        vals_nodes = funcs_nodes @ coeff.T  # (n_nodes, remaining)
        density_nodes = np.sum(vals_nodes * vals_nodes, axis=1) / remaining
        dmin = float(density_nodes.min())
        if dmin < -1e-9:
            raise SamplerInstabilityError(
                f"marginal density reached {dmin:.3e} at a node; "
                "discretization too coarse for stable sampling"
            )
        envelope = 1.2 * float(density_nodes.max())
        if envelope <= 0:
            raise SamplerInstabilityError("marginal density vanished identically")
        while True:
            rejections += 1
            if rejections > max_rejections:
                raise SamplerInstabilityError(
                    f"rejection budget {max_rejections} exhausted"
                )
            x = _uniform_in(domain, rng)
            ext = dec.extend(np.array([x]), idx)[0]  # eigenfunction values
            v = coeff @ ext  # current-basis values at x
            dens = float(np.dot(v, v)) / remaining
            if dens < -1e-9:
                raise SamplerInstabilityError(
                    f"marginal density {dens:.3e} at x={x:.6g}"
                )
            if rng.random() * envelope <= max(dens, 0.0):
                break
        points.append(x)
        if remaining == 1:
            break
        # Rotate the matched direction into the last slot and drop it.
        norm_v = math.sqrt(max(np.dot(v, v), 1e-300))
        u = v / norm_v
        # u holds row-basis components; express the removed direction in
        # eigen-coordinates, then project every row off it.
        direction = coeff.T @ u
        proj = coeff @ direction
        coeff = coeff - proj[:, None] * direction[None, :]
        # Modified Gram-Schmidt, dropping the most depleted row.
        norms = np.linalg.norm(coeff, axis=1)
        order = np.argsort(-norms)
        rows = []
        for r in order:
            vec = coeff[r].copy()
            for q in rows:
                vec -= np.dot(vec, q) * q
            nv = np.linalg.norm(vec)
            if nv > 1e-10 and len(rows) < remaining - 1:
                rows.append(vec / nv)
        if len(rows) != remaining - 1:
            raise SamplerInstabilityError(
                "basis lost rank during conditioning; refine the grid"
            )
        coeff = np.array(rows)
    return Configuration.from_points(points)


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------

def moment_diagnostic(samples, interval, k: int, rho_D: float) -> tuple[float, float]:
    """Empirical ``E|count(D) - rho(D)|^{2k}`` against the ``(3 rho(D))^k``
    moment bound.

    Returns ``(empirical, bound)``; the caller decides how much Monte
    Carlo slack to allow on top of the bound.
    """
    if k < 1:
        raise ValidationError("moment order k must be >= 1")
    lo, hi = float(interval[0]), float(interval[1])
    counts = np.array([xi.count_in(lo, hi) for xi in samples], dtype=float)
    empirical = float(np.mean(np.abs(counts - rho_D) ** (2 * k)))
    bound = (3.0 * rho_D) ** k
    return empirical, bound


@dataclass(frozen=True)
class TailFieldReport:
    """Cutoff profiles of count fluctuations and the signed tail field."""

    L_grid: tuple
    count_deviation: tuple
    tail_field: tuple

    def to_json(self) -> str:
        return json.dumps(
            {
                "L_grid": list(self.L_grid),
                "count_deviation": list(self.count_deviation),
                "tail_field": list(self.tail_field),
            },
            indent=2,
        )


def tail_field_diagnostic(
    xi: Configuration,
    rho,
    L_grid,
    support_radius: float | None = None,
    n_quad: int = 400,
) -> TailFieldReport:
    """Tabulate, for each cutoff ``L``:

    * ``|count([0, L]) - integral_0^L rho|`` - the one-sided count
      fluctuation, and
    * ``|integral_{|x| >= L} rho(x)/x dx - sum_{|x| >= L} mult/x|`` - the
      compensated tail field.

    ``rho`` is a vectorized density evaluator assumed negligible beyond
    ``support_radius`` (defaults to twice the configuration's extent).
    """
    L_grid = np.asarray(L_grid, dtype=float)
    if support_radius is None:
        ext = max((abs(float(x)) for x in xi.points), default=1.0)
        support_radius = 2.0 * max(ext, float(L_grid.max()))
    count_dev = []
    tail = []
    for L in L_grid:
        u, w = gauss_legendre(0.0, L, n_quad)
        integral = float(w @ np.asarray(rho(u), dtype=float))
        count_dev.append(abs(xi.count_in(0.0, L) - integral))
        t_val = 0.0
        if support_radius > L:
            up, wp = gauss_legendre(L, support_radius, n_quad)
            t_val += float(wp @ (np.asarray(rho(up), dtype=float) / up))
            un, wn = gauss_legendre(-support_radius, -L, n_quad)
            t_val += float(wn @ (np.asarray(rho(un), dtype=float) / un))
        for x, mult in zip(xi.points, xi.multiplicities):
            if abs(x) >= L and x != 0.0:
                t_val -= mult / x
        tail.append(abs(t_val))
    return TailFieldReport(
        L_grid=tuple(float(v) for v in L_grid),
        count_deviation=tuple(count_dev),
        tail_field=tuple(tail),
    )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def write_samples(path, samples, metadata: dict) -> None:
    """Dump configurations as JSON lines under a metadata header line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps({"type": "sample-dump", **metadata}, sort_keys=True))
        fh.write("\n")
        for xi in samples:
            fh.write(json.dumps([float(x) for x in xi.expanded()]))
            fh.write("\n")


def read_samples(path) -> tuple[dict, list[Configuration]]:
    """Read a sample dump; returns ``(metadata, configurations)``."""
    with open(path, "r", encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        samples = [
            Configuration.from_points(json.loads(line))
            for line in fh
            if line.strip()
        ]
    return header, samples


def write_fredholm_csv(path, rows) -> None:
    """CSV of determinant evaluations: ``domain_lo,domain_hi,n_nodes,z,det``
    with 17-significant-digit round-trip formatting."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("domain_lo,domain_hi,n_nodes,z,det\n")
        for lo, hi, n, z, det in rows:
            fh.write(
                f"{lo:.16e},{hi:.16e},{int(n)},{z:.16e},{det:.16e}\n"
            )
