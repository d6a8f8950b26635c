"""Experiment driver: single runs, refinement studies, property verification.

Configuration is flat key=value text with one section per concern::

    [grid]
    nx = 64
    ny = 64

    [solver]
    cfl = 0.4
    t_end = 0.25
    linf_bound = 1.2
    snapshot_interval = 0.0

    [flux]
    d_low = 1e-3
    d_high = 10.0

    [study]
    problem = advect-smooth
    resolutions = 32,64,128,256
    out = out
    emit_snapshots = false

Unknown sections or keys are rejected.  Command-line flags override file
values.  Exit codes: 0 success, 1 verification failure, 2 configuration
error.
"""

from __future__ import annotations

import argparse
import configparser
import itertools
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import diagnostics as diag
from .diagnostics import ConvergenceRow
from .entropy import burgers_flux, linear_flux, square_entropy_pair
from .flux import DiffusionBounds, entropy_conservative_flux
from .grid import Boundary, Grid2D, GridFunction
from .problems import ProblemSpec, get_problem, registry
from .reconstruct import eno2_edges
from .solver import EvolutionError, RunResult, SolverConfig, rhs_bundle, run

LEDGER_HEADER = "step,time,dt,total_mass,total_entropy,dissipation_increment,cube_x,cube_y,pair_x,pair_y"
CONVERGENCE_HEADER = "nx,ny,l1_error,observed_order"
SNAPSHOT_HEADER = "i,j,x,y,u"


class ConfigError(Exception):
    """Bad configuration file or option values."""


_SCHEMA: dict[str, dict[str, type]] = {
    "grid": {"nx": int, "ny": int},
    "solver": {"cfl": float, "t_end": float, "linf_bound": float, "snapshot_interval": float},
    "flux": {"d_low": float, "d_high": float},
    "study": {"problem": str, "resolutions": str, "out": str, "emit_snapshots": bool},
}


def load_config(path: str | Path) -> dict[str, dict]:
    """Parse and validate a config file against the documented schema."""
    parser = configparser.ConfigParser()
    read = parser.read(str(path))
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    out: dict[str, dict] = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        schema = _SCHEMA[section]
        out[section] = {}
        for key, raw in parser.items(section):
            if key not in schema:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            kind = schema[key]
            try:
                if kind is bool:
                    lowered = raw.strip().lower()
                    if lowered not in ("true", "false", "1", "0", "yes", "no"):
                        raise ValueError(raw)
                    out[section][key] = lowered in ("true", "1", "yes")
                else:
                    out[section][key] = kind(raw)
            except ValueError as exc:
                raise ConfigError(
                    f"bad value {raw!r} for {key} in [{section}] (expected {kind.__name__})"
                ) from exc
    return out


def parse_resolutions(text: str) -> tuple[tuple[int, int], ...]:
    """Parse '32,64,128' or '32x32,64x48' into a resolution ladder."""
    rungs: list[tuple[int, int]] = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            if "x" in token:
                nx_s, ny_s = token.split("x")
                rungs.append((int(nx_s), int(ny_s)))
            else:
                n = int(token)
                rungs.append((n, n))
        except ValueError as exc:
            raise ConfigError(f"bad resolution token {token!r}") from exc
    if not rungs:
        raise ConfigError("empty resolution ladder")
    return tuple(rungs)


@dataclass(frozen=True)
class StudyConfig:
    """A refinement study: one problem run over a strictly increasing ladder."""

    problem: str
    ladder: tuple[tuple[int, int], ...]
    t_end: float
    cfl: float = 0.4
    bounds: DiffusionBounds = DiffusionBounds()
    out_dir: Path = Path("out")
    emit_snapshots: bool = False
    snapshot_interval: float = 0.0
    linf_bound: float | None = None

    def __post_init__(self) -> None:
        for (cx, cy), (fx, fy) in itertools.pairwise(self.ladder):
            if not (fx > cx and fy > cy):
                raise ConfigError(f"resolution ladder must be strictly increasing, got {self.ladder}")


@dataclass
class StudyResult:
    problem: str
    rows: list[ConvergenceRow]
    results: list[RunResult]


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _write_text(path: Path, lines: list[str]) -> None:
    path.write_text("\n".join(lines) + "\n")


def write_ledger(result: RunResult, path: Path) -> None:
    lines = [LEDGER_HEADER]
    for r in result.ledger.rows:
        lines.append(
            ",".join(
                [str(r.step), _fmt(r.time), _fmt(r.dt), _fmt(r.total_mass),
                 _fmt(r.total_entropy), _fmt(r.dissipation_increment),
                 _fmt(r.cube_x), _fmt(r.cube_y), _fmt(r.pair_x), _fmt(r.pair_y)]
            )
        )
    _write_text(path, lines)


def write_snapshots(result: RunResult, directory: Path) -> list[Path]:
    grid = result.grid
    xs = grid.x_centers
    ys = grid.y_centers
    paths = []
    for snap in result.snapshots:
        lines = [SNAPSHOT_HEADER]
        for i in range(grid.nx):
            xi = _fmt(xs[i])
            row = snap.values[i]
            for j in range(grid.ny):
                lines.append(f"{i},{j},{xi},{_fmt(ys[j])},{_fmt(row[j])}")
        path = directory / f"snap_{snap.step}.csv"
        _write_text(path, lines)
        paths.append(path)
    return paths


def write_convergence(rows: list[ConvergenceRow], path: Path) -> None:
    lines = [CONVERGENCE_HEADER]
    for row in rows:
        order = "" if row.observed_order is None else _fmt(row.observed_order)
        lines.append(f"{row.nx},{row.ny},{_fmt(row.l1_error)},{order}")
    _write_text(path, lines)


def emit_outputs(result: RunResult | StudyResult, directory: str | Path,
                 emit_snapshots: bool = False) -> list[Path]:
    """Write CSV outputs for a run or a study into a directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths: list[Path] = []
    if isinstance(result, StudyResult):
        for res in result.results:
            rung_dir = directory / f"rung_{res.grid.nx}x{res.grid.ny}"
            rung_dir.mkdir(parents=True, exist_ok=True)
            write_ledger(res, rung_dir / "ledger.csv")
            paths.append(rung_dir / "ledger.csv")
            if emit_snapshots:
                paths.extend(write_snapshots(res, rung_dir))
        conv = directory / "convergence.csv"
        write_convergence(result.rows, conv)
        paths.append(conv)
        return paths
    write_ledger(result, directory / "ledger.csv")
    paths.append(directory / "ledger.csv")
    if emit_snapshots:
        paths.extend(write_snapshots(result, directory))
    return paths


def run_study(cfg: StudyConfig) -> StudyResult:
    """One run per rung, errors against the oracle, orders between rungs.

    Outputs are flushed rung by rung, so a failure partway leaves the
    completed rungs' ledgers and a truncated convergence table on disk.
    """
    problem = get_problem(cfg.problem)
    if problem.oracle is None:
        raise ConfigError(f"problem {cfg.problem!r} has no exact-solution oracle")
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows: list[ConvergenceRow] = []
    results: list[RunResult] = []
    try:
        for nx, ny in cfg.ladder:
            solver_cfg = SolverConfig(
                t_end=cfg.t_end,
                cfl=cfg.cfl,
                bounds=cfg.bounds,
                linf_bound=cfg.linf_bound if cfg.linf_bound is not None else problem.linf_bound,
                snapshot_interval=cfg.snapshot_interval,
            )
            try:
                result = run(solver_cfg, problem, nx, ny)
            except EvolutionError as exc:
                rung_dir = out_dir / f"rung_{nx}x{ny}"
                rung_dir.mkdir(parents=True, exist_ok=True)
                write_ledger(exc.partial, rung_dir / "ledger.csv")
                raise
            error = diag.l1_error(result.final, lambda x, y: problem.oracle(x, y, cfg.t_end))
            order = None
            if rows:
                prev = rows[-1]
                ratio = float(np.sqrt((nx * ny) / (prev.nx * prev.ny)))
                order = diag.observed_order(prev.l1_error, error, ratio)
            rows.append(ConvergenceRow(nx=nx, ny=ny, l1_error=error, observed_order=order))
            results.append(result)
            rung_dir = out_dir / f"rung_{nx}x{ny}"
            rung_dir.mkdir(parents=True, exist_ok=True)
            write_ledger(result, rung_dir / "ledger.csv")
            if cfg.emit_snapshots:
                write_snapshots(result, rung_dir)
    finally:
        write_convergence(rows, out_dir / "convergence.csv")
    return StudyResult(problem=cfg.problem, rows=rows, results=results)


# ---------------------------------------------------------------------------
# verification suites


def _batch_sign_stats(rows: np.ndarray) -> tuple[int, float]:
    """Sign-property violations and max jump ratio over a batch of rows,
    each embedded in a zero background."""
    rows = np.asarray(rows, dtype=float)
    batch, length = rows.shape
    padded = np.zeros((length + 4, batch))
    padded[2:-2] = rows.T
    minus, plus = eno2_edges(padded)
    rjump = plus - minus
    jump = padded[2:-1] - padded[1:-2]
    violations = int(np.count_nonzero((np.sign(rjump) != np.sign(jump)) & (rjump != 0.0)))
    nonzero = jump != 0.0
    max_ratio = float(np.max(rjump[nonzero] / jump[nonzero])) if nonzero.any() else 0.0
    return violations, max_ratio


def _batch_cube_stats(rows: np.ndarray) -> tuple[int, float]:
    """Cube-inequality violations and the smallest margin over a batch."""
    rows = np.asarray(rows, dtype=float)
    batch, length = rows.shape
    padded = np.zeros((length + 4, batch))
    padded[2:-2] = rows.T
    minus, plus = eno2_edges(padded)
    rjump = plus - minus
    jump = padded[2:-1] - padded[1:-2]
    lhs = np.sum(np.abs(jump) ** 3, axis=0)
    rhs = 2.0 * np.max(np.abs(rows), axis=1) * np.sum(rjump * jump, axis=0)
    violations = int(np.count_nonzero(lhs > rhs))
    return violations, float(np.min(rhs - lhs))


def _verify_sign_property(rng: np.random.Generator) -> tuple[bool, str]:
    exhaustive = np.array(list(itertools.product((-1.0, 0.0, 1.0), repeat=6)))
    v1, r1 = _batch_sign_stats(exhaustive)
    random_rows = rng.uniform(-1.0, 1.0, size=(100_000, 32))
    v2, r2 = _batch_sign_stats(random_rows)
    ok = v1 == 0 and v2 == 0 and max(r1, r2) <= 2.0
    return ok, (
        f"sign-property: rows={len(exhaustive) + len(random_rows)} "
        f"violations={v1 + v2} max_ratio={max(r1, r2):.6g}"
    )


def _verify_cube_inequality(rng: np.random.Generator) -> tuple[bool, str]:
    rows = rng.uniform(-1.0, 1.0, size=(100_000, 32))
    violations, margin = _batch_cube_stats(rows)
    return violations == 0, (
        f"cube-inequality: rows={len(rows)} violations={violations} min_margin={margin:.6g}"
    )


def _verify_tadmor(rng: np.random.Generator) -> tuple[bool, str]:
    worst = 0.0
    count = 0
    for spec in (burgers_flux(), linear_flux(1.3, -0.7)):
        pair = square_entropy_pair(spec)
        uL = rng.uniform(-2.0, 2.0, size=10_000)
        uR = rng.uniform(-2.0, 2.0, size=10_000)
        for axis in ("x", "y"):
            ec = entropy_conservative_flux(uL, uR, spec, axis)
            psi = pair.psi(axis)
            residual = np.abs((uR - uL) * ec - (psi(uR) - psi(uL)))
            scale = 1e-10 * (1.0 + np.abs(uR - uL))
            worst = max(worst, float(np.max(residual / scale)))
            count += uL.size
    ok = worst <= 1.0
    return ok, f"tadmor-condition: pairs={count} worst_residual_over_tol={worst:.3e}"


def _verify_entropy_rate(rng: np.random.Generator) -> tuple[bool, str]:
    worst_gap = 0.0
    worst_rhs = -np.inf
    bounds = DiffusionBounds(1e-3, 2.0)
    for spec in (burgers_flux(), linear_flux(1.0, 0.5)):
        pair = square_entropy_pair(spec)
        for boundary in (Boundary.PERIODIC, Boundary.OUTFLOW):
            grid = Grid2D.from_domain(12, 12, 0.0, 1.0, 0.0, 1.0, boundary)
            for _ in range(20):
                u = GridFunction(grid, rng.uniform(-1.0, 1.0, size=(12, 12)))
                bundle = rhs_bundle(u, spec, bounds)
                check = diag.entropy_rate_identity(u, bundle.rate, bundle.jumps, bundle.fluxes, pair)
                worst_gap = max(worst_gap, abs(check.gap))
                worst_rhs = max(worst_rhs, check.rhs)
    ok = worst_gap <= 1e-10 and worst_rhs <= 0.0
    return ok, f"entropy-rate-identity: max_gap={worst_gap:.3e} max_rhs={worst_rhs:.3e}"


def run_verification(seed: int) -> bool:
    rng = np.random.default_rng(seed)
    all_ok = True
    for check in (_verify_sign_property, _verify_cube_inequality, _verify_tadmor,
                  _verify_entropy_rate):
        ok, message = check(rng)
        print(f"{'PASS' if ok else 'FAIL'}  {message}")
        all_ok = all_ok and ok
    return all_ok


# ---------------------------------------------------------------------------
# command-line interface


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tecno2d",
        description="Entropy stable finite volume solver for 2D scalar conservation laws",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="evolve one problem and write its ledger")
    study_p = sub.add_parser("study", help="refinement study against the exact oracle")
    verify_p = sub.add_parser("verify", help="run the randomized property suites")
    sub.add_parser("list-problems", help="list registered problems")

    for p in (run_p, study_p):
        p.add_argument("--config", type=Path, default=None, help="config file path")
        p.add_argument("--problem", type=str, default=None)
        p.add_argument("--cfl", type=float, default=None)
        p.add_argument("--tend", type=float, default=None)
        p.add_argument("--out", type=Path, default=None)
        p.add_argument("--snapshots", action="store_true", help="also write snapshot CSV files")
    run_p.add_argument("--nx", type=int, default=None)
    run_p.add_argument("--ny", type=int, default=None)
    study_p.add_argument("--resolutions", type=str, default=None,
                         help="ladder like 32,64,128 or 32x32,64x64")
    verify_p.add_argument("--seed", type=int, default=42)
    return parser


def _setting(args_value, config: dict, section: str, key: str, default):
    if args_value is not None:
        return args_value
    return config.get(section, {}).get(key, default)


def _cmd_run(args) -> int:
    config = load_config(args.config) if args.config else {}
    name = _setting(args.problem, config, "study", "problem", None)
    if name is None:
        raise ConfigError("no problem selected (use --problem or [study] problem)")
    problem = get_problem(name)
    nx = _setting(args.nx, config, "grid", "nx", 64)
    ny = _setting(args.ny, config, "grid", "ny", 64)
    bounds = DiffusionBounds(
        d_low=_setting(None, config, "flux", "d_low", 1e-3),
        d_high=_setting(None, config, "flux", "d_high", 10.0),
    )
    solver_cfg = SolverConfig(
        t_end=_setting(args.tend, config, "solver", "t_end", 0.25),
        cfl=_setting(args.cfl, config, "solver", "cfl", 0.4),
        bounds=bounds,
        linf_bound=_setting(None, config, "solver", "linf_bound", problem.linf_bound),
        snapshot_interval=_setting(None, config, "solver", "snapshot_interval", 0.0),
    )
    out_dir = args.out if args.out is not None else Path("out")
    try:
        result = run(solver_cfg, problem, nx, ny)
    except EvolutionError as exc:
        emit_outputs(exc.partial, out_dir, emit_snapshots=args.snapshots)
        print(f"run failed: {exc}", file=sys.stderr)
        print(f"partial outputs in {out_dir}", file=sys.stderr)
        return 1
    emit_outputs(result, out_dir, emit_snapshots=args.snapshots)
    last = result.ledger.rows[-1]
    print(f"{problem.name}: {last.step} steps to t={last.time:g} on {nx}x{ny}")
    print(f"  total_mass={last.total_mass:.12g} total_entropy={last.total_entropy:.12g}")
    print(f"  cumulative_dissipation={result.ledger.cumulative_dissipation:.12g}")
    if result.bound_breaches:
        print(f"  WARNING: sup-norm bound exceeded {len(result.bound_breaches)} times "
              f"(max {result.sup_abs:.6g})")
    print(f"  outputs in {out_dir}")
    return 0


def _cmd_study(args) -> int:
    config = load_config(args.config) if args.config else {}
    name = _setting(args.problem, config, "study", "problem", None)
    if name is None:
        raise ConfigError("no problem selected (use --problem or [study] problem)")
    resolutions = _setting(args.resolutions, config, "study", "resolutions", "32,64,128,256")
    out_dir = args.out if args.out is not None else Path(
        _setting(None, config, "study", "out", "out"))
    study_cfg = StudyConfig(
        problem=name,
        ladder=parse_resolutions(resolutions),
        t_end=_setting(args.tend, config, "solver", "t_end", 0.25),
        cfl=_setting(args.cfl, config, "solver", "cfl", 0.4),
        bounds=DiffusionBounds(
            d_low=_setting(None, config, "flux", "d_low", 1e-3),
            d_high=_setting(None, config, "flux", "d_high", 10.0),
        ),
        out_dir=Path(out_dir),
        emit_snapshots=bool(args.snapshots or _setting(None, config, "study", "emit_snapshots", False)),
        snapshot_interval=_setting(None, config, "solver", "snapshot_interval", 0.0),
        linf_bound=_setting(None, config, "solver", "linf_bound", None),
    )
    try:
        study = run_study(study_cfg)
    except EvolutionError as exc:
        print(f"study aborted: {exc}", file=sys.stderr)
        print(f"partial outputs in {study_cfg.out_dir}", file=sys.stderr)
        return 1
    print(f"{study.problem} refinement study (t_end={study_cfg.t_end:g})")
    for row in study.rows:
        order = "-" if row.observed_order is None else f"{row.observed_order:.3f}"
        print(f"  {row.nx:4d}x{row.ny:<4d} l1_error={row.l1_error:.6e} order={order}")
    print(f"  outputs in {study_cfg.out_dir}")
    return 0


def _cmd_verify(args) -> int:
    return 0 if run_verification(args.seed) else 1


def _cmd_list_problems() -> int:
    for problem in registry():
        oracle = "oracle" if problem.oracle is not None else "no oracle"
        print(f"{problem.name:32s} flux={problem.flux.name:16s} "
              f"{problem.boundary.value:8s} {oracle}: {problem.description}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "study":
            return _cmd_study(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "list-problems":
            return _cmd_list_problems()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    raise SystemExit(main())
