"""Command-line frontend: optimization sweeps, trade-off tables, protocol
simulation, and the verification suite.

Subcommands:

* ``exact``     -- optimal overhead for exact broadcasting at one dimension
* ``sweep-ab``  -- grid sweep of the overhead surface over error thresholds
* ``min-error`` -- one point of the error-vs-budget trade-off
* ``tradeoff``  -- table of minimum errors over budget and dimension lists
* ``simulate``  -- Monte Carlo run of the explicit protocol vs the baseline
* ``verify``    -- run the acceptance suite, one PASS/FAIL line per criterion

Output files go through :mod:`vbroadcast.records` (fixed CSV header, 9
significant digits, rows sorted by inputs); relative ``--out`` paths resolve
against ``$VBROADCAST_OUT_DIR`` when set.  Exit codes: 0 success, 1 verify
failure, 2 bad arguments, 3 solver failure, 4 output I/O failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import broadcasting as bc
from . import simulator as sim
from .records import SweepRecord, render_csv, render_json, write_records
from .sdp import SolverConfig

OUT_DIR_ENV = "VBROADCAST_OUT_DIR"


@dataclass
class RunConfig:
    subcommand: str
    dims: list[int] = field(default_factory=lambda: [2])
    grid: int = 41
    gammas: list[float] = field(default_factory=lambda: [1.0, 1.8])
    deltas: list[float] | None = None
    tol_gap: float = 1e-9
    tol_feas: float = 1e-9
    max_iter: int = 200
    seed: int = 42
    shots: int = 10 ** 6
    out: str | None = None
    fmt: str = "csv"
    jobs: int = 1
    allow_large_dim: bool = False

    def validate(self) -> None:
        if any(d < 2 for d in self.dims):
            raise ValueError("dimensions must be at least 2")
        if self.grid < 2:
            raise ValueError("grid resolution must be at least 2")
        if min(self.tol_gap, self.tol_feas) <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1 or self.jobs < 1 or self.shots < 1:
            raise ValueError("max-iter, jobs and shots must be positive")

    def solver_config(self) -> SolverConfig:
        return SolverConfig(tol_gap=self.tol_gap, tol_feas=self.tol_feas,
                            max_iter=self.max_iter)


def _parse_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _parse_ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vbroadcast",
        description="virtual broadcasting trade-off computations")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--tol-gap", type=float, default=1e-9)
        p.add_argument("--tol-feas", type=float, default=1e-9)
        p.add_argument("--max-iter", type=int, default=200)
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--out", type=str, default=None,
                       help="output file (relative paths resolve against "
                            f"${OUT_DIR_ENV})")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"),
                       default="csv")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--allow-large-dim", action="store_true")

    p = sub.add_parser("exact", help="exact-broadcasting overhead")
    p.add_argument("--dim", type=int, default=2)
    common(p)

    p = sub.add_parser("sweep-ab", help="overhead surface over error thresholds")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--grid", type=int, default=41)
    p.add_argument("--delta", type=str, default=None,
                   help="comma-separated balanced thresholds; sweeps only the "
                        "diagonal (delta, delta) points instead of the full grid")
    common(p)

    p = sub.add_parser("min-error", help="minimum error at one budget")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--gamma", type=float, default=1.8)
    common(p)

    p = sub.add_parser("tradeoff", help="minimum-error table over budgets x dims")
    p.add_argument("--gammas", type=str, default="1.0,1.8")
    p.add_argument("--dims", type=str, default="2,3,4")
    common(p)

    p = sub.add_parser("simulate", help="Monte Carlo protocol run")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--gamma", type=float, default=2.0)
    p.add_argument("--shots", type=int, default=10 ** 6)
    common(p)

    p = sub.add_parser("verify", help="run the acceptance suite")
    common(p)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(subcommand=args.subcommand)
    if hasattr(args, "dim"):
        cfg.dims = [args.dim]
    if hasattr(args, "dims"):
        cfg.dims = _parse_ints(args.dims)
    if hasattr(args, "grid"):
        cfg.grid = args.grid
    if hasattr(args, "gamma"):
        cfg.gammas = [args.gamma]
    if hasattr(args, "gammas"):
        cfg.gammas = _parse_floats(args.gammas)
    if getattr(args, "delta", None):
        cfg.deltas = _parse_floats(args.delta)
    if hasattr(args, "shots"):
        cfg.shots = args.shots
    cfg.tol_gap = args.tol_gap
    cfg.tol_feas = args.tol_feas
    cfg.max_iter = args.max_iter
    cfg.seed = args.seed
    cfg.out = args.out
    cfg.fmt = args.fmt
    cfg.jobs = args.jobs
    cfg.allow_large_dim = args.allow_large_dim
    cfg.validate()
    return cfg


def _resolve_out(out: str | None) -> str | None:
    if out is None:
        return None
    if os.path.isabs(out):
        return out
    return os.path.join(os.environ.get(OUT_DIR_ENV, "."), out)


def _emit(records: list[SweepRecord], cfg: RunConfig) -> None:
    path = _resolve_out(cfg.out)
    if path is None:
        text = render_csv(records) if cfg.fmt == "csv" else render_json(records)
        sys.stdout.write(text)
    else:
        write_records(records, cfg.fmt, path)
        print(f"wrote {len(records)} records to {path}")


# -- sweep worker (module level so process pools can pickle it) --------------

def _sweep_point(task):
    a, b, d, tol_gap, tol_feas, max_iter = task
    t0 = time.perf_counter()
    res = bc.approx_overhead((a, b), d, config=SolverConfig(
        tol_gap=tol_gap, tol_feas=tol_feas, max_iter=max_iter))
    return SweepRecord(a=a, b=b, d=d, nu=res.nu, s=res.s, status=res.status,
                       gap=res.solution.gap if res.solution else None,
                       seconds=time.perf_counter() - t0)


def _run_exact(cfg: RunConfig) -> int:
    d = cfg.dims[0]
    t0 = time.perf_counter()
    res = bc.exact_overhead(d, config=cfg.solver_config())
    print(f"nu={res.nu:.6f} s={res.s:.6f}")
    if cfg.out:
        rec = SweepRecord(d=d, nu=res.nu, s=res.s, status=res.status,
                          gap=res.solution.gap,
                          seconds=time.perf_counter() - t0)
        _emit([rec], cfg)
    return 0


def _run_sweep_ab(cfg: RunConfig) -> int:
    d = cfg.dims[0]
    if cfg.deltas is not None:
        points = [(v, v) for v in cfg.deltas]
    else:
        axis = np.linspace(0.0, 1.0, cfg.grid)
        points = [(float(a), float(b)) for a in axis for b in axis]
    tasks = [(a, b, d, cfg.tol_gap, cfg.tol_feas, cfg.max_iter) for a, b in points]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            records = list(pool.map(_sweep_point, tasks, chunksize=4))
    else:
        records = [_sweep_point(t) for t in tasks]
    _emit(records, cfg)
    return 0


def _run_min_error(cfg: RunConfig) -> int:
    d = cfg.dims[0]
    gamma = cfg.gammas[0]
    t0 = time.perf_counter()
    point = bc.min_error(gamma, d, config=cfg.solver_config())
    if point.status == "optimal":
        nu = point.decomposition.nu
        print(f"gamma={gamma:.6f} d={d} mu={point.mu:.6f} t={point.t:.6f} "
              f"nu={nu:.6f} status={point.status}")
    else:
        nu = None
        print(f"gamma={gamma:.6f} d={d} status={point.status}")
    if cfg.out:
        rec = SweepRecord(gamma=gamma, d=d, mu=point.mu, t=point.t,
                          nu=nu, s=None if nu is None else nu ** 2,
                          status=point.status,
                          gap=point.solution.gap if point.solution else None,
                          seconds=time.perf_counter() - t0)
        _emit([rec], cfg)
    return 0


def _tradeoff_point(task):
    gamma, d, tol_gap, tol_feas, max_iter = task
    t0 = time.perf_counter()
    point = bc.min_error(gamma, d, config=SolverConfig(
        tol_gap=tol_gap, tol_feas=tol_feas, max_iter=max_iter))
    nu = point.decomposition.nu if point.decomposition else None
    return SweepRecord(gamma=gamma, d=d, mu=point.mu, t=point.t, nu=nu,
                       s=None if nu is None else nu ** 2, status=point.status,
                       gap=point.solution.gap if point.solution else None,
                       seconds=time.perf_counter() - t0)


def _run_tradeoff(cfg: RunConfig) -> int:
    big = [d for d in cfg.dims if d > 4]
    if big and not cfg.allow_large_dim:
        raise ValueError(f"dimensions {big} need --allow-large-dim")
    tasks = [(g, d, cfg.tol_gap, cfg.tol_feas, cfg.max_iter)
             for g in cfg.gammas for d in cfg.dims]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            records = list(pool.map(_tradeoff_point, tasks))
    else:
        records = [_tradeoff_point(t) for t in tasks]
    _emit(records, cfg)
    return 0


def _run_simulate(cfg: RunConfig) -> int:
    d = cfg.dims[0]
    gamma = cfg.gammas[0] if cfg.gammas else 2.0
    dec, delta, _ = bc.discard_prepare_point(gamma, d)
    rho = np.zeros((d, d), dtype=complex)
    rho[0, 0] = 1.0
    # evenly spaced spectrum from +1 to -1; the qubit case is the usual Z
    obs = sim.Observable.from_matrix(np.diag(np.linspace(1.0, -1.0, d)))
    est = sim.run_protocol(dec, rho, obs, marginal=1, shots=cfg.shots,
                           seed=cfg.seed)
    base = sim.naive_baseline(rho, obs, cfg.shots, seed=cfg.seed + 1)
    analytic = sim.protocol_expectation(dec, rho, obs, marginal=1)
    se = est.sample_std / math.sqrt(est.shots)
    print(f"budget gamma={gamma:.4f} d={d} x={dec.x:.6f} y={dec.y:.6f} "
          f"delta={delta:.6f}")
    print(f"protocol: mean={est.mean:.6f} std={est.sample_std:.6f} "
          f"shots={est.shots} n+={est.n_plus} n-={est.n_minus} seed={est.seed}")
    print(f"analytic expectation={analytic:.6f} (|dev| = "
          f"{abs(est.mean - analytic) / se:.2f} standard errors)")
    print(f"naive baseline: mean={base.mean:.6f} std={base.sample_std:.6f}")
    print(f"bias bound vs ideal: |{est.mean:.6f} - "
          f"{float(np.real(np.trace(obs.op @ rho))):.6f}| <= "
          f"{sim.bias_bound(obs, delta):.6f} + noise")
    return 0


def _run_verify(cfg: RunConfig) -> int:
    from .acceptance import run_all

    results = run_all()
    failures = 0
    for r in results:
        tag = "PASS" if r.passed else "FAIL"
        failures += 0 if r.passed else 1
        print(f"{tag} [{r.cid:2d}] {r.name}: {r.details}")
    print(f"{len(results) - failures}/{len(results)} criteria passed")
    return 1 if failures else 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    runners = {
        "exact": _run_exact,
        "sweep-ab": _run_sweep_ab,
        "min-error": _run_min_error,
        "tradeoff": _run_tradeoff,
        "simulate": _run_simulate,
        "verify": _run_verify,
    }
    try:
        return runners[cfg.subcommand](cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"output failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
