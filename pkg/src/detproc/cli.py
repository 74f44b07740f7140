"""Command-line interface for experiments, exports, and verification.

Ten subcommands expose the library end to end::

    kernel-table      evaluate a kernel on a grid
    gap-prob          Fredholm determinant of a windowed kernel
    mgf-check         two-time block determinant vs. path simulation
    sample-dpp        draw configurations from a determinantal law
    simulate          noncolliding path ensembles (checkpointed)
    scaling-check     finite-kernel convergence toward a limit kernel
    asymptotics-check large-degree expansion error decay
    config-check      configuration regularity report
    density-check     simulated marginal vs. exact density
    verify            run the numbered verification battery

Every run writes its primary artifact (CSV or JSON) plus a run manifest
``<artifact>.manifest.json`` recording the resolved parameters, library
version, seed, and wall time; pointing ``--config`` at a manifest replays
the run.  Floats in CSV artifacts carry 17 significant digits, so equal
configurations give byte-identical files.  Report commands also render a
PNG figure next to the artifact unless ``--no-plot`` is passed.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4
verification failure.  Failures print one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, acceptance, configspace, dpp, dynamics, kernels, specfun
from .configuration import Configuration
from .errors import NumericalError, ValidationError
from .kernels import DriftDensity, KernelFamily, KernelSpec

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_VERIFY = 4

_SEED_ENV = "DETPROC_SEED"


# ---------------------------------------------------------------------------
# Small parsing helpers
# ---------------------------------------------------------------------------

def _parse_range(text: str) -> np.ndarray:
    """Parse ``lo:hi:step`` into an inclusive grid, or ``a,b,c`` directly."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValidationError(f"expected lo:hi:step, got {text!r}")
        lo, hi, step = (float(p) for p in parts)
        if not step > 0:
            raise ValidationError("grid step must be positive")
        n = int(math.floor((hi - lo) / step + 1e-9)) + 1
        if n < 1:
            raise ValidationError(f"empty grid from {text!r}")
        return lo + step * np.arange(n)
    return np.array([float(p) for p in text.split(",") if p.strip() != ""])


def _parse_floats(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip() != ""]


def _parse_interval(text: str) -> tuple[float, float]:
    vals = _parse_floats(text)
    if len(vals) != 2 or not vals[1] > vals[0]:
        raise ValidationError(f"expected an increasing pair a,b, got {text!r}")
    return vals[0], vals[1]


def _parse_windows(text: str) -> list[tuple[float, float]]:
    out = []
    for piece in text.split(","):
        lo, _, hi = piece.partition(":")
        try:
            pair = (float(lo), float(hi))
        except ValueError as exc:
            raise ValidationError(f"bad window {piece!r}; expected lo:hi") from exc
        if not pair[1] > pair[0]:
            raise ValidationError(f"window {piece!r} is not increasing")
        out.append(pair)
    if not out:
        raise ValidationError("need at least one window")
    return out


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    env = os.environ.get(_SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ValidationError(
                f"{_SEED_ENV} must be an integer, got {env!r}"
            ) from exc
    raise ValidationError(
        f"this command draws random numbers: pass --seed or set {_SEED_ENV}"
    )


def _map_ordered(fn, items, threads: int) -> list:
    """Apply ``fn`` over ``items``, optionally on a thread pool.

    Results always come back in input order, so the assembled output is
    independent of the thread count.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn, item) for item in items]
        return [f.result() for f in futures]


def _fmt(v: float) -> str:
    return f"{float(v):.16e}"


def _artifact_path(args, default_name: str) -> Path:
    out = getattr(args, "output", None)
    return Path(out) if out else Path(default_name)


def _maybe_plot(args) -> bool:
    return not getattr(args, "no_plot", False)


def _fig_path(artifact: Path) -> Path:
    return artifact.with_suffix(".png")


# ---------------------------------------------------------------------------
# Kernel construction shared by several commands
# ---------------------------------------------------------------------------

def _static_kernel(args):
    family = args.family
    if family == "sine":
        return kernels.sine_kernel
    if family == "airy":
        return kernels.airy_kernel
    if family == "bessel":
        if args.nu is None:
            raise ValidationError("--nu is required for the hard-edge family")
        nu = float(args.nu)
        return lambda x, y, _nu=nu: kernels.bessel_kernel(_nu, x, y)
    raise ValidationError(f"unsupported family {family!r} for this command")


def _kernel_spec(args) -> KernelSpec:
    family = args.family
    if family == "sine":
        return KernelSpec(family=KernelFamily.SINE)
    if family == "airy":
        return KernelSpec(family=KernelFamily.AIRY)
    if family == "bessel":
        if args.nu is None:
            raise ValidationError("--nu is required for the hard-edge family")
        return KernelSpec(family=KernelFamily.BESSEL, nu=float(args.nu))
    if family == "hermite":
        if args.N is None:
            raise ValidationError("--N is required for the finite families")
        return KernelSpec(family=KernelFamily.HERMITE_N, N=int(args.N))
    if family == "laguerre":
        if args.N is None or args.nu is None:
            raise ValidationError(
                "--N and --nu are required for the finite hard-edge family"
            )
        return KernelSpec(
            family=KernelFamily.LAGUERRE_N, N=int(args.N), nu=float(args.nu)
        )
    raise ValidationError(f"unknown family {family!r}")


# ---------------------------------------------------------------------------
# Checkpointed ensemble construction
# ---------------------------------------------------------------------------

def _concat_ensembles(parts: list[dynamics.PathEnsemble]) -> dynamics.PathEnsemble:
    head = parts[0]
    positions = np.concatenate([p.positions for p in parts], axis=0)
    return dynamics.PathEnsemble(
        model=head.model,
        N=head.N,
        R=sum(p.R for p in parts),
        seed=head.seed,
        t_grid=head.t_grid,
        positions=positions,
        dt_max=head.dt_max,
        nu=head.nu,
        drift_label=head.drift_label,
        rejections=sum(p.rejections for p in parts),
        violations=sum(p.violations for p in parts),
        x0_label=head.x0_label,
    )


def _simulate_chunk(model, N, x0, t_grid, dt_max, R, seed, nu, drift, offset):
    if model == "dyson":
        return dynamics.simulate_dyson(
            N, x0, t_grid, dt_max, R, seed, replica_offset=offset
        )
    if model == "besq":
        return dynamics.simulate_besq(
            N, nu, x0, t_grid, dt_max, R, seed, replica_offset=offset
        )
    if model == "drifted":
        return dynamics.simulate_drifted(
            N, x0, t_grid, dt_max, R, seed, drift, replica_offset=offset
        )
    raise ValidationError(f"unknown model {model!r}")


def _checkpoint_compatible(ck: dynamics.PathEnsemble, model, N, t_grid, dt_max,
                           seed, nu) -> bool:
    return (
        ck.model == model
        and ck.N == N
        and ck.seed == seed
        and ck.dt_max == dt_max
        and (ck.nu is None) == (nu is None)
        and (ck.nu is None or float(ck.nu) == float(nu))
        and ck.t_grid.size == len(t_grid)
        and bool(np.all(ck.t_grid == np.asarray(t_grid, dtype=float)))
        and ck.R % dynamics.CHECKPOINT_REPLICAS == 0
    )


def _build_ensemble(model, N, x0, t_grid, dt_max, R, seed, nu=None, drift=None,
                    threads: int = 1, checkpoint: Path | None = None,
                    log=lambda msg: None) -> dynamics.PathEnsemble:
    """Simulate ``R`` replicas in checkpoint-sized slices.

    Completed slices are persisted after each checkpoint boundary, so an
    interrupted long run resumes from the last saved slice instead of
    starting over.  Slicing is over the replica axis with explicit
    offsets, so the assembled ensemble is bit-identical to a single
    unsliced run regardless of checkpointing or thread count.
    """
    if R < 1:
        raise ValidationError("need at least one replica")
    parts: list[dynamics.PathEnsemble] = []
    done = 0
    if checkpoint is not None and checkpoint.exists():
        prior = dynamics.PathEnsemble.load(checkpoint)
        if _checkpoint_compatible(prior, model, N, t_grid, dt_max, seed, nu) and (
            prior.R <= R
        ):
            parts.append(prior)
            done = prior.R
            log(f"resumed {done} replicas from {checkpoint}")
        else:
            log(f"ignoring incompatible checkpoint {checkpoint}")
    step = dynamics.CHECKPOINT_REPLICAS
    offsets = list(range(done, R, step))
    chunk_of = {off: min(step, R - off) for off in offsets}

    def run(off):
        return _simulate_chunk(
            model, N, x0, t_grid, dt_max, chunk_of[off], seed, nu, drift, off
        )

    # Ordered reduction: chunks may run concurrently but are assembled and
    # checkpointed strictly in offset order.
    new_parts = _map_ordered(run, offsets, threads)
    for off, part in zip(offsets, new_parts):
        parts.append(part)
        done = off + part.R
        if checkpoint is not None and done % step == 0 and done < R:
            _concat_ensembles(parts).save(checkpoint)
            log(f"checkpoint at {done}/{R} replicas")
    ens = _concat_ensembles(parts) if len(parts) > 1 else parts[0]
    if checkpoint is not None and checkpoint.exists():
        checkpoint.unlink()
        sidecar = Path(str(checkpoint) + ".json")
        if sidecar.exists():
            sidecar.unlink()
    return ens


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def cmd_kernel_table(args) -> dict:
    spec = _kernel_spec(args)
    xs = _parse_range(args.grid)
    ys = _parse_range(args.grid_y) if args.grid_y else xs
    s = args.s
    t = args.t
    if spec.family in (KernelFamily.HERMITE_N, KernelFamily.LAGUERRE_N):
        if s is None or t is None:
            raise ValidationError("finite families need --s and --t")
    n_chunk = max(1, int(math.ceil(xs.size / max(args.threads, 1))))
    chunks = [xs[i:i + n_chunk] for i in range(0, xs.size, n_chunk)]
    blocks = _map_ordered(
        lambda cx: spec.matrix(s, cx, t, ys), chunks, args.threads
    )
    kmat = np.vstack(blocks)
    artifact = _artifact_path(args, "kernel_table.csv")
    rows = (
        (
            spec.family.value,
            spec.N,
            spec.nu,
            s,
            xs[i],
            t,
            ys[j],
            kmat[i, j],
        )
        for i in range(xs.size)
        for j in range(ys.size)
    )
    kernels.write_kernel_csv(artifact, rows)
    artifacts = [str(artifact)]
    if _maybe_plot(args):
        from . import plots

        fig = plots.plot_kernel_heatmap(
            _fig_path(artifact), xs, ys, kmat,
            f"{spec.family.value} kernel",
        )
        artifacts.append(fig)
    return {
        "artifacts": artifacts,
        "summary": {
            "rows": int(xs.size * ys.size),
            "max_abs": float(np.max(np.abs(kmat))),
        },
    }


def cmd_gap_prob(args) -> dict:
    kfn = _static_kernel(args)
    lo, hi = _parse_interval(args.interval)
    op = dpp.nystrom(kfn, (lo, hi), args.nodes)
    det = dpp.fredholm_det(op, args.z)
    artifact = _artifact_path(args, "gap_prob.csv")
    dpp.write_fredholm_csv(artifact, [(lo, hi, args.nodes, args.z, det)])
    artifacts = [str(artifact)]
    if _maybe_plot(args):
        from . import plots

        lam = np.linalg.eigvalsh(op.symmetrized_matrix())[::-1]
        top = lam[: min(16, lam.size)]
        fig = plots.plot_trend(
            _fig_path(artifact),
            np.arange(1, top.size + 1),
            {"operator spectrum": np.maximum(top, 1e-18)},
            f"{args.family} window [{lo:g}, {hi:g}]",
            "eigenvalue rank",
            log_y=True,
        )
        artifacts.append(fig)
    return {"artifacts": artifacts, "summary": {"det": det}}


def cmd_mgf_check(args) -> dict:
    seed = _resolve_seed(args)
    times = _parse_floats(args.times)
    windows = _parse_windows(args.windows)
    amps = _parse_floats(args.amps)
    if not (len(times) == len(windows) == len(amps)):
        raise ValidationError("need matching counts of times, windows, amps")
    spec = KernelSpec(family=KernelFamily.HERMITE_N, N=args.N)
    chis = [math.expm1(a) for a in amps]
    pred = dpp.multitime_fredholm(
        spec, times, windows, chis, n_nodes=args.nodes
    )

    artifact = _artifact_path(args, "mgf_check.json")
    ens = _build_ensemble(
        "dyson", args.N, "origin", (0.0,) + tuple(times), args.dt_max,
        args.R, seed, threads=args.threads,
        checkpoint=artifact.with_suffix(".checkpoint"),
        log=lambda m: print(m, file=sys.stderr),
    )

    def bump(a, lo, hi):
        return lambda x: a * ((x >= lo) & (x <= hi)).astype(float)

    fs = [bump(a, lo, hi) for a, (lo, hi) in zip(amps, windows)]
    est, se = dynamics.empirical_mgf(ens, times, fs)
    z = abs(pred.value - est) / se if se > 0 else float("inf")
    payload = {
        "determinant": pred.value,
        "determinant_coarse": pred.coarse_value,
        "determinant_warning": pred.warning,
        "estimate": est,
        "std_error": se,
        "z_score": z,
        "times": times,
        "windows": [list(w) for w in windows],
        "amplitudes": amps,
        "replicas": args.R,
    }
    artifact.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    artifacts = [str(artifact)]
    if _maybe_plot(args):
        from . import plots

        fig = plots.plot_trend(
            _fig_path(artifact),
            np.array([0.0, 1.0]),
            {
                "determinant": np.array([pred.value, pred.value]),
                "simulation +3se": np.array([est + 3 * se] * 2),
                "simulation -3se": np.array([est - 3 * se] * 2),
            },
            "multiplicative statistic: determinant vs simulation",
            "(band)",
        )
        artifacts.append(fig)
    return {"artifacts": artifacts, "summary": {"z_score": z, "det": pred.value}}


def cmd_sample_dpp(args) -> dict:
    seed = _resolve_seed(args)
    kfn = _static_kernel(args)
    lo, hi = _parse_interval(args.domain)
    op = dpp.nystrom(kfn, (lo, hi), args.nodes)
    dec = dpp.decompose(op, kernel=kfn)
    rng = np.random.default_rng(seed)
    samples = [dpp.sample(dec, rng) for _ in range(args.R)]
    artifact = _artifact_path(args, "samples.jsonl")
    meta = {
        "family": args.family,
        "nu": args.nu,
        "domain": [lo, hi],
        "nodes": args.nodes,
        "seed": seed,
        "samples": args.R,
    }
    dpp.write_samples(artifact, samples, meta)
    counts = np.array([s.total_mass for s in samples], dtype=float)
    artifacts = [str(artifact)]
    all_pts = [np.asarray(s.points, dtype=float) for s in samples if len(s.points)]
    if _maybe_plot(args) and all_pts:
        from . import plots

        pts = np.concatenate(all_pts)
        edges = np.linspace(lo, hi, 41)
        hist, _ = np.histogram(pts, bins=edges)
        dens = hist / (args.R * np.diff(edges))
        se = np.sqrt(np.maximum(hist, 1.0)) / (args.R * np.diff(edges))
        xg = np.linspace(lo, hi, 241)
        diag = np.array([float(np.atleast_2d(kfn(v, v))[0, 0]) for v in xg])
        fig = plots.plot_histogram_vs_density(
            _fig_path(artifact), edges, dens, se, xg, diag,
            f"{args.family} samples on [{lo:g}, {hi:g}]",
        )
        artifacts.append(fig)
    return {
        "artifacts": artifacts,
        "summary": {
            "mean_count": float(np.mean(counts)),
            "max_count": int(np.max(counts)),
        },
    }


def cmd_simulate(args) -> dict:
    seed = _resolve_seed(args)
    t_grid = _parse_range(args.t_grid)
    x0 = "origin" if args.x0 == "origin" else np.array(_parse_floats(args.x0))
    nu = args.nu
    drift = None
    if args.model == "besq" and nu is None:
        raise ValidationError("--nu is required for the squared-radial model")
    if args.model == "drifted":
        drift = DriftDensity.semicircle(args.drift_rank or args.N)
    artifact = _artifact_path(args, "ensemble.bin")
    ens = _build_ensemble(
        args.model, args.N, x0, t_grid, args.dt_max, args.R, seed,
        nu=nu, drift=drift, threads=args.threads,
        checkpoint=artifact.with_suffix(".checkpoint"),
        log=lambda m: print(m, file=sys.stderr),
    )
    ens.save(artifact)
    t_last = float(ens.t_grid[-1])
    csv_path = Path(str(artifact) + ".csv")
    ens.to_csv(csv_path, t_last)
    artifacts = [str(artifact), str(artifact) + ".json", str(csv_path)]
    if _maybe_plot(args):
        from . import plots

        slab = ens.positions_at(t_last).ravel()
        edges = np.linspace(float(slab.min()), float(slab.max()) + 1e-9, 41)
        hist, _ = np.histogram(slab, bins=edges)
        dens = hist / (ens.R * np.diff(edges))
        se = np.sqrt(np.maximum(hist, 1.0)) / (ens.R * np.diff(edges))
        xg = np.linspace(edges[0], edges[-1], 241)
        if args.model == "dyson" and args.x0 == "origin":
            ref = kernels.gue_density(ens.N, t_last, xg)
        else:
            ref = np.full(xg.shape, np.nan)
        fig = plots.plot_histogram_vs_density(
            _fig_path(Path(str(artifact))), edges, dens, se, xg, ref,
            f"{args.model} ensemble at t={t_last:g}",
        )
        artifacts.append(fig)
    return {
        "artifacts": artifacts,
        "summary": {
            "replicas": ens.R,
            "rejections": ens.rejections,
            "violations": ens.violations,
        },
    }


def cmd_scaling_check(args) -> dict:
    ranks = [int(v) for v in _parse_floats(args.N)]
    if sorted(set(ranks)) != ranks:
        raise ValidationError("ranks must be strictly increasing")
    family = args.limit
    sups = []
    if family == "bulk":
        grid = np.linspace(-2.0, 2.0, 21)
        ref = kernels.sine_kernel(grid, grid)
        for N in ranks:
            t = kernels.bulk_time(N)
            sups.append(
                float(np.max(np.abs(
                    kernels.finite_hermite_kernel(N, t, grid, t, grid) - ref
                )))
            )
    elif family == "hard_edge":
        nu = 0.0 if args.nu is None else float(args.nu)
        grid = np.linspace(0.0, 4.0, 21)
        ref = kernels.bessel_kernel(nu, grid, grid)
        for N in ranks:
            t = kernels.hard_edge_time(N)
            sups.append(
                float(np.max(np.abs(
                    kernels.finite_laguerre_kernel(N, nu, t, grid, t, grid) - ref
                )))
            )
    elif family == "soft_edge":
        grid = np.linspace(-5.0, 3.0, 161)
        ref = kernels.airy_density(grid)
        for N in ranks:
            sups.append(float(np.max(np.abs(kernels.rho_A(N, grid) - ref))))
    else:
        raise ValidationError(
            f"unknown limit family {family!r}; expected bulk, hard_edge, soft_edge"
        )
    decreasing = all(a > b for a, b in zip(sups, sups[1:]))
    payload = {
        "limit": family,
        "ranks": ranks,
        "sup_errors": sups,
        "strictly_decreasing": decreasing,
    }
    artifact = _artifact_path(args, "scaling_check.json")
    artifact.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    artifacts = [str(artifact)]
    if _maybe_plot(args):
        from . import plots

        fig = plots.plot_trend(
            _fig_path(artifact), np.array(ranks, dtype=float),
            {"sup error": np.array(sups)},
            f"{family} convergence", "rank N", log_y=True,
        )
        artifacts.append(fig)
    return {
        "artifacts": artifacts,
        "summary": {"sup_errors": sups, "strictly_decreasing": decreasing},
    }


def cmd_asymptotics_check(args) -> dict:
    degrees = [int(v) for v in _parse_floats(args.degrees)]
    errs = [acceptance.window_rate_error(N) for N in degrees]
    ratios = [b / a for a, b in zip(errs, errs[1:])]
    artifact = _artifact_path(args, "asymptotics_check.csv")
    with open(artifact, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("degree,window_rms_error\n")
        for N, e in zip(degrees, errs):
            fh.write(f"{N},{_fmt(e)}\n")
    artifacts = [str(artifact)]
    if _maybe_plot(args):
        from . import plots

        fig = plots.plot_trend(
            _fig_path(artifact), np.array(degrees, dtype=float),
            {"window RMS error": np.array(errs)},
            "interior-expansion error decay", "degree", log_y=True,
        )
        artifacts.append(fig)
    return {"artifacts": artifacts, "summary": {"errors": errs, "ratios": ratios}}


def cmd_config_check(args) -> dict:
    pts = _parse_floats(args.points)
    xi = Configuration.from_points(pts)
    kappas = _parse_floats(args.kappa) if args.kappa else [0.6, 0.75]
    ms = [int(v) for v in _parse_floats(args.m)] if args.m else [1, 2]
    drift = DriftDensity.semicircle(args.drift_rank) if args.drift_rank else None
    report = configspace.check_conditions(
        xi, kappas, ms, mode=args.mode, drift=drift
    )
    artifact = _artifact_path(args, "config_check.json")
    artifact.write_text(report.to_json() + "\n")
    artifacts = [str(artifact)]
    if _maybe_plot(args) and report.L_grid:
        from . import plots

        fig = plots.plot_trend(
            _fig_path(artifact), np.array(report.L_grid),
            {"windowed inverse-first moment": np.array(report.M_trend)},
            "tail-moment trend", "window half-width L",
        )
        artifacts.append(fig)
    return {
        "artifacts": artifacts,
        "summary": {"CI": report.CI, "M_value": report.M_value},
    }


def cmd_density_check(args) -> dict:
    seed = _resolve_seed(args)
    edges = _parse_range(args.bins)
    if edges.size < 2:
        raise ValidationError("need at least two bin edges")
    t = float(args.t)
    if args.model == "dyson":
        exact_fn = lambda x: kernels.gue_density(args.N, t, x)
    elif args.model == "besq":
        if args.N != 1:
            raise ValidationError(
                "exact marginal reference implemented for one particle only"
            )
        if args.nu is None:
            raise ValidationError("--nu is required for the squared-radial model")
        nu = float(args.nu)
        exact_fn = lambda x: np.array(
            [specfun.bessel_transition(nu, t, 0.0, v) for v in np.atleast_1d(x)]
        )
    else:
        raise ValidationError(
            "density-check supports the dyson and besq models from the origin"
        )
    artifact = _artifact_path(args, "density_check.csv")
    ens = _build_ensemble(
        args.model, args.N, "origin", (0.0, t), args.dt_max, args.R, seed,
        nu=args.nu, threads=args.threads,
        checkpoint=artifact.with_suffix(".checkpoint"),
        log=lambda m: print(m, file=sys.stderr),
    )
    hist = dynamics.empirical_density(ens, t, edges)
    from .quadrature import gauss_legendre

    exact_bin = np.empty(edges.size - 1)
    for i in range(edges.size - 1):
        nodes, wts = gauss_legendre(edges[i], edges[i + 1], 24)
        exact_bin[i] = float(wts @ np.asarray(exact_fn(nodes), dtype=float))
    widths = np.diff(edges)
    emp_prob = hist.density * widths / args.N
    exact_prob = exact_bin / args.N
    l1 = float(np.sum(np.abs(emp_prob - exact_prob))) + abs(
        max(0.0, 1.0 - float(np.sum(emp_prob)))
        - max(0.0, 1.0 - float(np.sum(exact_prob)))
    )
    with open(artifact, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("bin_lo,bin_hi,empirical_density,std_error,exact_density\n")
        for i in range(edges.size - 1):
            fh.write(
                ",".join(
                    _fmt(v)
                    for v in (
                        edges[i],
                        edges[i + 1],
                        hist.density[i],
                        hist.std_error[i],
                        exact_bin[i] / widths[i],
                    )
                )
                + "\n"
            )
    artifacts = [str(artifact)]
    if _maybe_plot(args):
        from . import plots

        xg = np.linspace(edges[0], edges[-1], 321)
        fig = plots.plot_histogram_vs_density(
            _fig_path(artifact), edges, hist.density, hist.std_error,
            xg, np.asarray(exact_fn(xg), dtype=float),
            f"{args.model} marginal at t={t:g} (L1 = {l1:.4f})",
        )
        artifacts.append(fig)
    return {"artifacts": artifacts, "summary": {"l1": l1}}


def cmd_verify(args) -> dict:
    results = acceptance.run_suite(args.suite, emit=print)
    payload = {
        "suite": args.suite,
        "all_passed": all(r.passed for r in results),
        "results": [
            {
                "number": r.number,
                "name": r.name,
                "passed": r.passed,
                "detail": r.detail,
                "elapsed_s": r.elapsed_s,
            }
            for r in results
        ],
    }
    artifact = _artifact_path(args, "verify_report.json")
    artifact.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    status = EXIT_OK if payload["all_passed"] else EXIT_VERIFY
    return {
        "artifacts": [str(artifact)],
        "summary": {"all_passed": payload["all_passed"]},
        "exit": status,
    }


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="detproc",
        description="Determinantal kernels, samplers, and noncolliding paths.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    parser.add_argument(
        "--config",
        help="JSON file (or a prior run manifest) whose parameters become "
        "defaults for this invocation",
    )
    sub = parser.add_subparsers(dest="command")

    def common(p, stochastic=False):
        p.add_argument("-o", "--output", help="artifact path")
        p.add_argument(
            "--threads", type=int, default=1,
            help="worker threads for independent slices (default 1)",
        )
        p.add_argument(
            "--no-plot", action="store_true",
            help="skip the PNG figure next to the artifact",
        )
        if stochastic:
            p.add_argument(
                "--seed", type=int, default=None,
                help=f"RNG seed (falls back to ${_SEED_ENV})",
            )

    p = sub.add_parser("kernel-table", help="evaluate a kernel on a grid")
    p.add_argument("--family", required=True,
                   choices=["sine", "airy", "bessel", "hermite", "laguerre"])
    p.add_argument("--grid", required=True, help="lo:hi:step or comma list")
    p.add_argument("--grid-y", help="column grid (defaults to --grid)")
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--s", type=float, default=None, help="row time")
    p.add_argument("--t", type=float, default=None, help="column time")
    common(p)
    p.set_defaults(handler=cmd_kernel_table)

    p = sub.add_parser("gap-prob", help="Fredholm determinant on a window")
    p.add_argument("--family", required=True, choices=["sine", "airy", "bessel"])
    p.add_argument("--interval", required=True, help="a,b")
    p.add_argument("--nodes", type=int, default=64)
    p.add_argument("--z", type=float, default=1.0,
                   help="determinant argument det(I - z K); the default 1 "
                        "gives the no-point probability")
    p.add_argument("--nu", type=float, default=None)
    common(p)
    p.set_defaults(handler=cmd_gap_prob)

    p = sub.add_parser(
        "mgf-check",
        help="two-time block determinant against a path simulation",
    )
    p.add_argument("--N", type=int, default=2)
    p.add_argument("--times", default="0.5,1.0")
    p.add_argument("--windows", default="-1.6:0.9,-0.8:1.7")
    p.add_argument("--amps", default="0.35,-0.45")
    p.add_argument("--R", type=int, default=100_000)
    p.add_argument("--dt-max", type=float, default=0.005)
    p.add_argument("--nodes", type=int, default=48)
    common(p, stochastic=True)
    p.set_defaults(handler=cmd_mgf_check)

    p = sub.add_parser("sample-dpp", help="draw determinantal configurations")
    p.add_argument("--family", required=True, choices=["sine", "airy", "bessel"])
    p.add_argument("--domain", required=True, help="a,b")
    p.add_argument("--nodes", type=int, default=64)
    p.add_argument("--R", type=int, default=1000)
    p.add_argument("--nu", type=float, default=None)
    common(p, stochastic=True)
    p.set_defaults(handler=cmd_sample_dpp)

    p = sub.add_parser("simulate", help="noncolliding path ensemble")
    p.add_argument("--model", required=True, choices=["dyson", "besq", "drifted"])
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--x0", default="origin", help='"origin" or comma list')
    p.add_argument("--t-grid", required=True, help="comma list or lo:hi:step, "
                                                   "starting at 0")
    p.add_argument("--dt-max", type=float, required=True)
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--drift-rank", type=int, default=None,
                   help="rank of the built-in edge-profile drift density")
    common(p, stochastic=True)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("scaling-check", help="finite-kernel convergence report")
    p.add_argument("--limit", required=True,
                   choices=["bulk", "hard_edge", "soft_edge"])
    p.add_argument("--N", required=True, help="comma list of increasing ranks")
    p.add_argument("--nu", type=float, default=None)
    common(p)
    p.set_defaults(handler=cmd_scaling_check)

    p = sub.add_parser(
        "asymptotics-check", help="large-degree expansion error decay"
    )
    p.add_argument("--degrees", default="100,200,400")
    common(p)
    p.set_defaults(handler=cmd_asymptotics_check)

    p = sub.add_parser("config-check", help="configuration regularity report")
    p.add_argument("--points", required=True, help="comma list of atoms")
    p.add_argument("--kappa", default=None, help="comma list of exponents")
    p.add_argument("--m", default=None, help="comma list of occupation caps")
    p.add_argument("--mode", default="Y", choices=["Y", "Y_plus", "Y_A"])
    p.add_argument("--drift-rank", type=int, default=None)
    common(p)
    p.set_defaults(handler=cmd_config_check)

    p = sub.add_parser(
        "density-check", help="simulated marginal against the exact density"
    )
    p.add_argument("--model", required=True, choices=["dyson", "besq"])
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--dt-max", type=float, required=True)
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--bins", default="-8:8:1", help="lo:hi:step bin edges")
    common(p, stochastic=True)
    p.set_defaults(handler=cmd_density_check)

    p = sub.add_parser("verify", help="run the numbered verification battery")
    p.add_argument("--suite", default="fast", choices=["fast", "full"])
    common(p)
    p.set_defaults(handler=cmd_verify)

    return parser


def _apply_config_defaults(parser, argv) -> None:
    """Merge a JSON config (or prior manifest) as argument defaults."""
    if argv is None:
        argv = sys.argv[1:]
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
    if path is None:
        return
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config {path!r}: {exc}") from exc
    params = payload.get("parameters", payload)
    if not isinstance(params, dict):
        raise ValidationError("config must be a JSON object")
    clean = {
        str(k).replace("-", "_"): v
        for k, v in params.items()
        if k not in ("command", "handler", "config")
    }
    subparsers = [
        sp
        for action in parser._subparsers._group_actions  # noqa: SLF001
        for sp in action.choices.values()
    ]
    for p in [parser] + subparsers:
        p.set_defaults(**clean)
        # A parameter supplied through the config no longer has to appear
        # on the command line, even if it is normally required.
        for action in p._actions:  # noqa: SLF001
            if action.dest in clean:
                action.required = False


def _error_json(exc: BaseException, code: int) -> None:
    print(
        json.dumps(
            {
                "error": type(exc).__name__,
                "message": str(exc),
                "exit_code": code,
            }
        ),
        file=sys.stderr,
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        _apply_config_defaults(parser, argv)
        args = parser.parse_args(argv)
        if getattr(args, "command", None) is None:
            parser.print_help()
            return EXIT_VALIDATION
        t0 = time.perf_counter()
        out = args.handler(args)
        wall = time.perf_counter() - t0
    except ValidationError as exc:
        _error_json(exc, EXIT_VALIDATION)
        return EXIT_VALIDATION
    except NumericalError as exc:
        _error_json(exc, EXIT_NUMERICAL)
        return EXIT_NUMERICAL
    except OSError as exc:
        _error_json(exc, EXIT_VALIDATION)
        return EXIT_VALIDATION

    artifacts = out.get("artifacts", [])
    exit_code = out.get("exit", EXIT_OK)
    if artifacts:
        manifest = {
            "command": args.command,
            "parameters": {
                k: v
                for k, v in sorted(vars(args).items())
                if k not in ("handler", "command", "config")
                and not callable(v)
            },
            "version": __version__,
            "wall_time_s": wall,
            "artifacts": artifacts,
            "summary": out.get("summary", {}),
        }
        manifest_path = Path(artifacts[0] + ".manifest.json")
        manifest_path.write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n"
        )
        print(f"wrote {', '.join(artifacts)} (+ manifest)")
    return exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
