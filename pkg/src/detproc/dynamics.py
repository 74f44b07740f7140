"""Simulation of the noncolliding diffusions and empirical estimators.

Three models share one adaptive Euler-Maruyama engine:

* ``dyson`` - unit diffusion with inverse-gap repulsion;
* ``besq`` - squared-radius diffusion of index ``nu`` with a wall at 0;
* ``drifted`` - the ``dyson`` paths carried by the deterministic shift
  ``t^2/4 + t * integral(rho(x)/x dx)`` of a reference density.

Reproducibility contract: identical ``(seed, parameters)`` give
bit-identical ensembles.  Noise is drawn from counter-keyed Philox
streams indexed by (iteration, replica-batch, lane), with a fixed batch
width of 1000 replicas, so the results do not depend on how replicas are
scheduled across threads or checkpoint chunks (chunks must be multiples
of the batch width).
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    SimulationError,
    ValidationError,
)
from .kernels import (
    DriftDensity,
    SpaceTimePoint,
    bulk_time,
    hard_edge_time,
    soft_edge_time,
)

__all__ = [
    "PathEnsemble",
    "simulate_dyson",
    "simulate_besq",
    "simulate_drifted",
    "DensityHistogram",
    "empirical_density",
    "empirical_mgf",
    "scaling_map",
    "BATCH_WIDTH",
    "CHECKPOINT_REPLICAS",
]

BATCH_WIDTH = 1000
CHECKPOINT_REPLICAS = 10_000

_MODEL_CODES = {"dyson": 0, "besq": 1, "drifted": 2}
_MODEL_NAMES = {v: k for k, v in _MODEL_CODES.items()}

_MAGIC = b"DPEN"
_VERSION = 1

_GAP_FACTOR = 0.1
_MIN_SHRINK = 1e-8
_MAX_ITER = 5_000_000
_COLLISION_TOL = 1e-12


# ---------------------------------------------------------------------------
# Ensemble container
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PathEnsemble:
    """Positions of an ensemble of noncolliding paths on a time grid.

    ``positions`` has shape ``(R, T, N)`` - replica, then time index, then
    particle in ascending spatial order - matching the on-disk layout.

    ``rejections`` counts rejected step attempts during simulation (a
    performance diagnostic); ``violations`` counts ordering violations in
    the *accepted* ensemble and must be zero.
    """

    model: str
    N: int
    R: int
    seed: int
    t_grid: np.ndarray
    positions: np.ndarray
    dt_max: float
    nu: float | None = None
    drift_label: str | None = None
    rejections: int = 0
    violations: int = 0
    x0_label: str = "origin"

    def __post_init__(self):
        t_grid = np.asarray(self.t_grid, dtype=float)
        pos = np.asarray(self.positions, dtype=float)
        if self.model not in _MODEL_CODES:
            raise ValidationError(f"unknown model {self.model!r}")
        if t_grid.ndim != 1 or t_grid.size == 0 or t_grid[0] != 0.0:
            raise ValidationError("time grid must start at 0")
        if np.any(np.diff(t_grid) <= 0):
            raise ValidationError("time grid must be strictly increasing")
        if pos.shape != (self.R, t_grid.size, self.N):
            raise ValidationError(
                f"positions shape {pos.shape} != (R, T, N) = "
                f"({self.R}, {t_grid.size}, {self.N})"
            )
        diffs = np.diff(pos, axis=2)
        bad = int(np.sum(np.any(diffs < 0, axis=2)))
        if bad:
            raise ValidationError(
                f"{bad} replica/time slices are not in ascending order"
            )
        if self.model == "besq" and np.any(pos < 0):
            raise ValidationError("squared-radius positions must be nonnegative")
        t_grid.setflags(write=False)
        pos.setflags(write=False)
        object.__setattr__(self, "t_grid", t_grid)
        object.__setattr__(self, "positions", pos)

    # -- access --------------------------------------------------------
    @property
    def T(self) -> int:
        return self.t_grid.size

    def time_index(self, t: float) -> int:
        hit = np.nonzero(np.isclose(self.t_grid, t, rtol=0.0, atol=1e-12))[0]
        if hit.size == 0:
            raise ValidationError(
                f"time {t} is not on the ensemble grid (no interpolation)"
            )
        return int(hit[0])

    def positions_at(self, t: float) -> np.ndarray:
        """All replica positions at a grid time, shape ``(R, N)``."""
        return self.positions[:, self.time_index(t), :]

    # -- persistence ---------------------------------------------------
    def save(self, path) -> None:
        """Binary dump plus JSON sidecar (``<path>.json``).

        Layout: magic, version, model code, N, R, T as little-endian
        uint32 after the 4-byte magic; seed as uint64; index parameter as
        float64 (NaN when absent); a 32-byte drift label; then the
        positions as little-endian float64 in (replica, time, particle)
        order.
        """
        label = (self.drift_label or "").encode("utf-8")[:32]
        label = label.ljust(32, b"\0")
        header = struct.pack(
            "<4sIIIIIQd32s",
            _MAGIC,
            _VERSION,
            _MODEL_CODES[self.model],
            self.N,
            self.R,
            self.T,
            self.seed,
            float("nan") if self.nu is None else float(self.nu),
            label,
        )
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(np.ascontiguousarray(self.positions, dtype="<f8").tobytes())
        sidecar = {
            "model": self.model,
            "N": self.N,
            "R": self.R,
            "T": self.T,
            "seed": self.seed,
            "t_grid": [float(t) for t in self.t_grid],
            "dt_max": self.dt_max,
            "nu": self.nu,
            "drift_label": self.drift_label,
            "x0": self.x0_label,
            "rejections": self.rejections,
            "violations": self.violations,
            "version": _VERSION,
        }
        with open(str(path) + ".json", "w", encoding="utf-8") as fh:
            json.dump(sidecar, fh, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path) -> "PathEnsemble":
        with open(str(path) + ".json", "r", encoding="utf-8") as fh:
            sidecar = json.load(fh)
        head_size = struct.calcsize("<4sIIIIIQd32s")
        with open(path, "rb") as fh:
            header = fh.read(head_size)
            if len(header) != head_size:
                raise ValidationError("not an ensemble file (truncated header)")
            magic, version, code, n, r, t, seed, nu, label = struct.unpack(
                "<4sIIIIIQd32s", header
            )
            if magic != _MAGIC:
                raise ValidationError("not an ensemble file (bad magic)")
            if version != _VERSION:
                raise ValidationError(f"unsupported ensemble version {version}")
            payload = np.frombuffer(fh.read(), dtype="<f8")
        if payload.size != r * t * n:
            raise ValidationError("ensemble payload size mismatch")
        return cls(
            model=_MODEL_NAMES[code],
            N=n,
            R=r,
            seed=seed,
            t_grid=np.asarray(sidecar["t_grid"], dtype=float),
            positions=payload.reshape(r, t, n).copy(),
            dt_max=float(sidecar["dt_max"]),
            nu=None if (isinstance(nu, float) and math.isnan(nu)) else float(nu),
            drift_label=sidecar.get("drift_label"),
            rejections=int(sidecar.get("rejections", 0)),
            violations=int(sidecar.get("violations", 0)),
            x0_label=sidecar.get("x0", "origin"),
        )

    def to_csv(self, path, t: float) -> None:
        """One time slice as CSV rows ``t,replica,particle,position``."""
        idx = self.time_index(t)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("t,replica,particle,position\n")
            for r in range(self.R):
                for j in range(self.N):
                    fh.write(
                        f"{self.t_grid[idx]:.16e},{r},{j},"
                        f"{self.positions[r, idx, j]:.16e}\n"
                    )


# ---------------------------------------------------------------------------
# Noise streams
# ---------------------------------------------------------------------------

def _batch_rng(seed: int, iteration: int, batch: int, lane: int) -> np.random.Generator:
    """Counter-keyed stream: one block per (iteration, batch, lane).

    The indices occupy the three high words of the 256-bit counter; the
    low word stays zero so in-stream consumption (which increments the
    counter from the low end) can never run into a neighboring block.
    """
    bitgen = np.random.Philox(
        key=np.uint64(seed), counter=[0, iteration, batch, lane]
    )
    return np.random.Generator(bitgen)


def _gue_start(seed: int, batch: int, n_rep: int, N: int, t0: float) -> np.ndarray:
    """Exact origin-start positions at small time ``t0``: eigenvalues of a
    Hermitian Gaussian matrix whose entries carry the diffusion's law at
    ``t0`` (diagonal variance ``t0``, off-diagonal real/imaginary variance
    ``t0/2``)."""
    rng = _batch_rng(seed, 0, batch, lane=1)
    z = rng.standard_normal((n_rep, N, N, 2))
    re = z[..., 0]
    im = z[..., 1]
    h = np.zeros((n_rep, N, N), dtype=complex)
    iu = np.triu_indices(N, k=1)
    h[:, iu[0], iu[1]] = (re[:, iu[0], iu[1]] + 1j * im[:, iu[0], iu[1]]) / math.sqrt(2.0)
    h += np.conj(np.swapaxes(h, 1, 2))
    dg = np.arange(N)
    h[:, dg, dg] = re[:, dg, dg]
    vals = np.linalg.eigvalsh(h * math.sqrt(t0))
    return np.sort(vals.real, axis=1)


def _chgue_start(
    seed: int, batch: int, n_rep: int, N: int, nu_int: int, t0: float
) -> np.ndarray:
    """Exact origin start for the squared-radius model at integer index:
    eigenvalues of ``Z* Z`` with ``Z`` an ``(N+nu) x N`` complex Gaussian
    matrix whose real and imaginary parts have variance ``t0``."""
    rng = _batch_rng(seed, 0, batch, lane=1)
    z = rng.standard_normal((n_rep, N + nu_int, N, 2)) * math.sqrt(t0)
    zc = z[..., 0] + 1j * z[..., 1]
    w = np.einsum("rij,rik->rjk", np.conj(zc), zc)
    vals = np.linalg.eigvalsh(w)
    return np.sort(np.maximum(vals.real, 0.0), axis=1)


# ---------------------------------------------------------------------------
# Stepping engine
# ---------------------------------------------------------------------------

def _pairwise_inverse_gap_sum(x: np.ndarray) -> np.ndarray:
    """``sum_{k != j} 1/(x_j - x_k)`` for each particle, batched.

    ``x`` has shape (B, N); returns the same shape.
    """
    n = x.shape[1]
    if n == 1:
        return np.zeros_like(x)
    d = x[:, :, None] - x[:, None, :]
    idx = np.arange(n)
    d[:, idx, idx] = np.inf
    return np.sum(1.0 / d, axis=2)


def _advance_batch(
    model: str,
    pos: np.ndarray,
    t_start: float,
    t_end: float,
    dt_max: float,
    seed: int,
    batch: int,
    nu: float | None,
    iteration_start: int,
) -> tuple[np.ndarray, int, int]:
    """Advance one replica batch from ``t_start`` to ``t_end``.

    Returns ``(positions, next_iteration, rejections)``.  Every replica
    attempts one sub-step per iteration with its own adaptive ``dt``;
    rejected attempts halve a per-replica shrink factor which recovers
    geometrically after acceptance.
    """
    b_size, n_part = pos.shape
    tau = np.full(b_size, t_start)
    shrink = np.ones(b_size)
    rejections = 0
    iteration = iteration_start
    reflect = model == "besq" and nu is not None and nu < 0
    while True:
        remaining = t_end - tau
        active = remaining > 1e-15 * max(1.0, abs(t_end))
        if not np.any(active):
            break
        if iteration - iteration_start > _MAX_ITER:
            worst = int(np.argmax(remaining))
            raise SimulationError(
                "sub-step budget exhausted",
                diagnostics={
                    "model": model,
                    "replica_in_batch": worst,
                    "time_reached": float(tau[worst]),
                    "target": float(t_end),
                    "min_gap": float(np.min(np.diff(pos[worst])))
                    if n_part > 1
                    else float("inf"),
                    "shrink": float(shrink[worst]),
                },
            )
        if np.any(shrink < _MIN_SHRINK):
            worst = int(np.argmin(shrink))
            raise SimulationError(
                "step size collapsed after repeated rejections",
                diagnostics={
                    "model": model,
                    "replica_in_batch": worst,
                    "time_reached": float(tau[worst]),
                    "min_gap": float(np.min(np.diff(pos[worst])))
                    if n_part > 1
                    else float("inf"),
                },
            )
        if n_part > 1:
            gaps = np.min(np.diff(pos, axis=1), axis=1)
        else:
            gaps = np.full(b_size, np.inf)
        if model == "dyson" or model == "drifted":
            drift = _pairwise_inverse_gap_sum(pos)
            dt_cap = _GAP_FACTOR * gaps * gaps
            sigma = None
        else:
            inv = _pairwise_inverse_gap_sum(pos)
            drift = 2.0 * (nu + 1.0) + 4.0 * pos * inv
            xmax = np.max(pos, axis=1)
            bmax = np.max(np.abs(drift), axis=1)
            # Noise constraint: sigma^2 dt << gap^2 with sigma^2 <= 4 xmax;
            # near the wall xmax itself is tiny and the drift cap below
            # binds instead, so the denominator floor is only a guard
            # against exact zeros.
            dt_cap = np.minimum(
                _GAP_FACTOR * gaps * gaps / np.maximum(4.0 * xmax, 1e-12),
                _GAP_FACTOR * gaps / (1.0 + bmax),
            )
            sigma = 2.0 * np.sqrt(np.maximum(pos, 0.0))
        dt = np.minimum(dt_max, remaining)
        dt = np.minimum(dt, dt_cap) * shrink
        dt = np.where(active, np.minimum(dt, remaining), 0.0)
        noise = _batch_rng(seed, iteration, batch, lane=0).standard_normal(
            (b_size, n_part)
        )
        sq = np.sqrt(np.maximum(dt, 0.0))[:, None]
        if sigma is None:
            prop = pos + drift * dt[:, None] + sq * noise
        else:
            prop = pos + drift * dt[:, None] + sigma * sq * noise
        if reflect:
            prop = np.abs(prop)
        if n_part > 1:
            ok_order = np.all(np.diff(prop, axis=1) > _COLLISION_TOL, axis=1)
        else:
            ok_order = np.ones(b_size, dtype=bool)
        if model == "besq" and not reflect:
            ok_order &= np.all(prop >= 0.0, axis=1)
        accept = active & ok_order
        reject = active & ~ok_order
        rejections += int(np.sum(reject))
        pos = np.where(accept[:, None], prop, pos)
        tau = np.where(accept, tau + dt, tau)
        shrink = np.where(reject, shrink * 0.5, np.minimum(1.0, shrink * 2.0))
        iteration += 1
    return pos, iteration, rejections


def _resolve_x0(model: str, x0, N: int, nu) -> tuple[str, np.ndarray | None]:
    if isinstance(x0, str):
        if x0 != "origin":
            raise ValidationError("x0 must be a vector or the string 'origin'")
        return "origin", None
    arr = np.sort(np.asarray(x0, dtype=float))
    if arr.shape != (N,):
        raise ValidationError(f"x0 must have length N = {N}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("x0 must be finite")
    if N > 1 and np.min(np.diff(arr)) <= 0:
        raise ValidationError("initial points must be distinct")
    if model == "besq" and np.any(arr < 0):
        raise DomainError("squared-radius model needs x0 >= 0")
    return "explicit", arr


def _simulate(
    model: str,
    N: int,
    x0,
    t_grid,
    dt_max: float,
    R: int,
    seed: int,
    nu: float | None = None,
    drift: DriftDensity | None = None,
    replica_offset: int = 0,
) -> PathEnsemble:
    if N < 1 or R < 1:
        raise ValidationError("need N >= 1 and R >= 1")
    if not dt_max > 0:
        raise ValidationError("dt_max must be positive")
    if replica_offset % BATCH_WIDTH:
        raise ValidationError(
            f"replica_offset must be a multiple of {BATCH_WIDTH}"
        )
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0 or t_grid[0] != 0.0:
        raise ValidationError("time grid must start at 0")
    if t_grid.size > 1 and np.any(np.diff(t_grid) <= 0):
        raise ValidationError("time grid must be strictly increasing")
    x0_label, x0_arr = _resolve_x0(model, x0, N, nu)
    integer_nu = nu is not None and float(nu).is_integer() and nu >= 0
    if model == "besq" and x0_label == "origin" and not integer_nu:
        x0_label = "origin-spread"

    T = t_grid.size
    positions = np.empty((R, T, N))
    total_rejections = 0
    first_batch = replica_offset // BATCH_WIDTH
    for local_start in range(0, R, BATCH_WIDTH):
        b_size = min(BATCH_WIDTH, R - local_start)
        batch = first_batch + local_start // BATCH_WIDTH
        iteration = 1  # iteration 0 is reserved for start-up draws
        if x0_label == "explicit":
            pos = np.tile(x0_arr, (b_size, 1))
            t_cur = 0.0
            positions[local_start:local_start + b_size, 0] = pos
            grid_rest = enumerate(t_grid[1:], start=1)
        else:
            # Origin start: record the degenerate slice, then jump to a
            # small positive time with the exact matrix realization.
            positions[local_start:local_start + b_size, 0] = 0.0
            t1 = t_grid[1] if T > 1 else dt_max
            t0 = min(dt_max, t1 / 100.0)
            if model == "besq":
                if integer_nu:
                    pos = _chgue_start(seed, batch, b_size, N, int(nu), t0)
                else:
                    spread = 1e-6 * np.arange(1, N + 1, dtype=float)
                    pos = np.tile(spread, (b_size, 1))
                    t0 = 0.0
            else:
                pos = _gue_start(seed, batch, b_size, N, t0)
            t_cur = t0
            grid_rest = enumerate(t_grid[1:], start=1)
        for m, t_next in grid_rest:
            pos, iteration, rej = _advance_batch(
                model,
                pos,
                t_cur,
                float(t_next),
                dt_max,
                seed,
                batch,
                nu,
                iteration,
            )
            total_rejections += rej
            t_cur = float(t_next)
            positions[local_start:local_start + b_size, m] = pos

    if model == "drifted":
        const = (
            drift.exact_drift_integral
            if drift.exact_drift_integral is not None
            else drift.drift_integral()
        )
        shift = t_grid * t_grid / 4.0 + t_grid * const
        positions = positions + shift[None, :, None]

    return PathEnsemble(
        model=model,
        N=N,
        R=R,
        seed=seed,
        t_grid=t_grid,
        positions=positions,
        dt_max=dt_max,
        nu=nu,
        drift_label=None if drift is None else drift.label,
        rejections=total_rejections,
        violations=0,
        x0_label=x0_label,
    )


def simulate_dyson(
    N: int, x0, t_grid, dt_max: float, R: int, seed: int,
    replica_offset: int = 0,
) -> PathEnsemble:
    """Euler-Maruyama paths of the log-repelling diffusion.

    ``x0`` is a vector of distinct starting points or ``"origin"``; the
    origin start replaces the singular first step by an exact matrix
    realization at a small positive time (see module notes), after which
    ordinary adaptive stepping takes over.  Steps obey
    ``dt <= min(dt_max, 0.1 * min_gap^2, remaining)`` with rejection and
    halving on ordering violations.
    """
    return _simulate("dyson", N, x0, t_grid, dt_max, R, seed,
                     replica_offset=replica_offset)


def simulate_besq(
    N: int, nu: float, x0, t_grid, dt_max: float, R: int, seed: int,
    replica_offset: int = 0,
) -> PathEnsemble:
    """Euler-Maruyama paths of the noncolliding squared-radius diffusion.

    Diffusion coefficient ``2 sqrt(X)``, constant drift ``2(nu+1)``, and
    interaction ``4X * sum 1/(X_j - X_k)``.  For ``-1 < nu < 0`` the wall
    acts by reflection (absolute value after each step); for ``nu >= 0``
    negative excursions are rejected and the step halved.  Origin starts
    use the exact matrix realization for integer ``nu`` and a documented
    tiny-spread approximation (``1e-6 * (1, ..., N)``) otherwise.
    """
    if not nu > -1:
        raise DomainError("besq requires nu > -1")
    return _simulate("besq", N, x0, t_grid, dt_max, R, seed, nu=nu,
                     replica_offset=replica_offset)


def simulate_drifted(
    N: int, x0, t_grid, dt_max: float, R: int, seed: int,
    drift: DriftDensity,
    replica_offset: int = 0,
) -> PathEnsemble:
    """Log-repelling paths carried by the deterministic parabolic shift.

    The paths solve the same equations as :func:`simulate_dyson`; the
    shift ``t^2/4 + t * integral(rho(x)/x dx)`` is applied exactly to the
    recorded slices (no stochastic step for the shift).  For the built-in
    edge profile the shift rate is exactly ``-N^{1/3}``.
    """
    if drift is None:
        raise ValidationError("drifted model requires a drift density")
    return _simulate("drifted", N, x0, t_grid, dt_max, R, seed, drift=drift,
                     replica_offset=replica_offset)


# ---------------------------------------------------------------------------
# Empirical estimators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityHistogram:
    """Density histogram normalized to total mass ``N``.

    ``density`` is counts per replica per unit length; ``std_error`` is
    the per-bin Monte Carlo standard error of that density estimate.
    """

    edges: np.ndarray
    density: np.ndarray
    std_error: np.ndarray
    t: float
    mass: float

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])


def empirical_density(ens: PathEnsemble, t: float, bins) -> DensityHistogram:
    """Histogram of all particle positions at a grid time.

    ``bins`` is either a bin count (spanning the sampled range) or an
    explicit edge array.  The histogram integrates to the particle count
    ``N`` (up to out-of-range mass when explicit edges clip the data).
    """
    slab = ens.positions_at(t)  # (R, N)
    if np.isscalar(bins):
        lo = float(slab.min())
        hi = float(slab.max())
        span = max(hi - lo, 1e-12)
        edges = np.linspace(lo - 0.025 * span, hi + 0.025 * span, int(bins) + 1)
    else:
        edges = np.asarray(bins, dtype=float)
    widths = np.diff(edges)
    if np.any(widths <= 0):
        raise ValidationError("bin edges must be increasing")
    per_rep = np.stack(
        [np.histogram(slab[r], bins=edges)[0] for r in range(ens.R)]
    ).astype(float)
    dens_rep = per_rep / widths[None, :]
    density = dens_rep.mean(axis=0)
    if ens.R > 1:
        se = dens_rep.std(axis=0, ddof=1) / math.sqrt(ens.R)
    else:
        se = np.zeros_like(density)
    mass = float(np.sum(density * widths))
    return DensityHistogram(
        edges=edges, density=density, std_error=se, t=float(t), mass=mass
    )


def empirical_mgf(ens: PathEnsemble, times, fs) -> tuple[float, float]:
    """Monte Carlo estimate of ``E exp(sum_m sum_j f_m(X_j(t_m)))``.

    Returns ``(estimate, standard_error)`` with a jackknife standard
    error.  Exponents beyond the overflow range raise instead of being
    clipped.
    """
    if len(times) != len(fs):
        raise ValidationError("need one test function per time")
    s = np.zeros(ens.R)
    for t, f in zip(times, fs):
        slab = ens.positions_at(t)
        vals = np.asarray(f(slab), dtype=float)
        if vals.shape != slab.shape:
            raise ValidationError(
                "test functions must act elementwise on positions"
            )
        if not np.all(np.isfinite(vals)):
            raise SimulationError(
                "test function returned non-finite values",
                diagnostics={"time": float(t)},
            )
        s += np.sum(vals, axis=1)
    if np.any(s > 700.0):
        raise SimulationError(
            "exponent overflow in the generating functional; "
            "no silent clipping is performed",
            diagnostics={"max_exponent": float(np.max(s))},
        )
    w = np.exp(s)
    est = float(np.mean(w))
    r = ens.R
    if r > 1:
        total = np.sum(w)
        jack = (total - w) / (r - 1)
        jbar = float(np.mean(jack))
        se = math.sqrt((r - 1) / r * float(np.sum((jack - jbar) ** 2)))
    else:
        se = 0.0
    return est, se


# ---------------------------------------------------------------------------
# Scaling maps
# ---------------------------------------------------------------------------

def scaling_map(point: SpaceTimePoint, family: str, N: int) -> SpaceTimePoint:
    """Send limit-regime coordinates ``(s, x)`` to finite-rank coordinates.

    * ``bulk``: time offset around the density-one center time, position
      unchanged: ``(bulk_time(N) + s, x)``.
    * ``hard_edge``: ``(hard_edge_time(N) + s, x)``.
    * ``soft_edge``: ``(N^{1/3} + s, 2 N^{2/3} + N^{1/3} s - s^2/4 + x)``.
    """
    if N < 1:
        raise ValidationError("scaling_map requires N >= 1")
    s, x = point.t, point.x
    if family == "bulk":
        return SpaceTimePoint(t=bulk_time(N) + s, x=x)
    if family == "hard_edge":
        return SpaceTimePoint(t=hard_edge_time(N) + s, x=x)
    if family == "soft_edge":
        c = N ** (1.0 / 3.0)
        return SpaceTimePoint(
            t=soft_edge_time(N) + s,
            x=2.0 * N ** (2.0 / 3.0) + c * s - s * s / 4.0 + x,
        )
    raise ValidationError(
        f"unknown scaling family {family!r}; expected bulk, hard_edge, soft_edge"
    )
