"""Command-line front end: evolve, gphase, and sweep subcommands.

evolve integrates one model over its window and writes a CSV with the
populations, the base-manifold geometry (unit vector, polar angles,
linearizing phase), and two per-sample diagnostics: the unitarity
residual of the recomposed propagator and its distance from an
independent brute-force reference run.  gphase integrates the loop
one-form over an angle path supplied as CSV.  sweep fans a list of
parameter points out over a thread pool, one CSV per point, and writes
a manifest once every point has finished.

Configuration comes from a JSON file; --pipeline, --tol, and --samples
override the corresponding config fields.  Exit codes are 0 on success,
2 for configuration problems, and 3 for numeric failures, and nothing
else.  Output is deterministic for a fixed config: fixed sample grids,
fixed summation order, shortest round-trip float formatting, UTF-8 with
LF line endings.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_trapezoid

from . import su3
from .algebra import CoefficientVector, assemble_su3_hamiltonian
from .apps import (
    KANCHEVA_WINDOW,
    STIRAP_WINDOW,
    TRAPPING_WINDOW,
    KanchevaParams,
    StirapParams,
    TrappingParams,
    block_schedule,
    coefficient_schedule,
    kancheva_hamiltonian,
    stirap_hamiltonian,
    trapping_hamiltonian,
)
from .engine import evolve, oracle_evolve
from .errors import ConfigInvalid, CosetflowError, IntegrationFailure, PathInvalid
from .gphase import AnglePath, su3_geometric_phase, wrap_to_pi
from .su4embed import DMParameters, dm_coefficients, dm_embedding_defect, evolve_pair

__all__ = ["RunConfig", "cmd_evolve", "cmd_gphase", "cmd_sweep", "main"]

CSV_HEADER = (
    "t,P1,P2,P3,m1r,m2r,m3r,m1i,m2i,m3i,"
    "theta1,theta2,eps1,eps2,phi,unitarity_residual,oracle_deviation"
)

_MODELS = ("stirap", "trapping", "kancheva", "custom-coefficients", "dm")
_PIPELINES = ("su3", "su4", "oracle")
_DEFAULT_WINDOWS = {
    "stirap": STIRAP_WINDOW,
    "trapping": TRAPPING_WINDOW,
    "kancheva": KANCHEVA_WINDOW,
}

#: Reference integrations run this much tighter than the main one.
_REFERENCE_FACTOR = 1e-2
_REFERENCE_TOL_FLOOR = 1e-13

#: |U_33| below which the z chart (and the angle columns) degenerate.
_CHART_FLOOR = 1e-9


@dataclass(frozen=True)
class RunConfig:
    """Validated description of one evolve run."""

    model: str
    parameters: dict
    t0: float
    t1: float
    samples: int = 1001
    tol: float = 1e-9
    pipeline: str = "su3"
    initial: int = 0

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigInvalid("config must be a JSON object")
        allowed = {
            "model",
            "parameters",
            "t0",
            "t1",
            "samples",
            "tol",
            "pipeline",
            "initial",
        }
        unknown = set(raw) - allowed
        if unknown:
            raise ConfigInvalid(f"unknown config keys: {sorted(unknown)}")
        model = raw.get("model")
        if model not in _MODELS:
            raise ConfigInvalid(f"model must be one of {_MODELS}, got {model!r}")
        parameters = raw.get("parameters", {})
        if not isinstance(parameters, dict):
            raise ConfigInvalid("parameters must be a JSON object")
        window = _DEFAULT_WINDOWS.get(model)
        if "t0" in raw or "t1" in raw:
            if not ("t0" in raw and "t1" in raw):
                raise ConfigInvalid("t0 and t1 must be given together")
            window = (raw["t0"], raw["t1"])
        elif window is None:
            raise ConfigInvalid(f"model {model!r} needs an explicit t0 and t1")
        try:
            t0, t1 = float(window[0]), float(window[1])
        except (TypeError, ValueError) as exc:
            raise ConfigInvalid(f"bad time window: {exc}") from None
        samples = raw.get("samples", 1001)
        if not isinstance(samples, int) or isinstance(samples, bool) or samples < 2:
            raise ConfigInvalid(f"samples must be an integer >= 2, got {samples!r}")
        try:
            tol = float(raw.get("tol", 1e-9))
        except (TypeError, ValueError):
            raise ConfigInvalid(f"tol must be a number, got {raw.get('tol')!r}") from None
        if not 1e-12 <= tol <= 1e-3:
            raise ConfigInvalid(f"tol must lie in [1e-12, 1e-3], got {tol}")
        pipeline = raw.get("pipeline", "su3")
        if pipeline not in _PIPELINES:
            raise ConfigInvalid(
                f"pipeline must be one of {_PIPELINES}, got {pipeline!r}"
            )
        initial = raw.get("initial", 0)
        if initial not in (0, 1, 2):
            raise ConfigInvalid(f"initial must be 0, 1, or 2, got {initial!r}")
        if not t1 > t0:
            raise ConfigInvalid(f"need t1 > t0, got [{t0}, {t1}]")
        config = cls(
            model=model,
            parameters=parameters,
            t0=t0,
            t1=t1,
            samples=samples,
            tol=tol,
            pipeline=pipeline,
            initial=initial,
        )
        config.matrix_schedule()  # validate the model parameters eagerly
        return config

    def replaced(self, **kw) -> "RunConfig":
        d = asdict(self)
        d.update(kw)
        return RunConfig(**d)

    def matrix_schedule(self, warn: bool = False) -> Callable[[float], np.ndarray]:
        """t -> full 3x3 Hamiltonian for this config.

        With warn=True, notes about physically dropped terms go to
        stderr (validation passes stay quiet so each note prints once).
        """
        p = dict(self.parameters)
        try:
            if self.model == "stirap":
                params = StirapParams(**p)
                return lambda t: stirap_hamiltonian(t, params)
            if self.model == "trapping":
                params = TrappingParams(**p)
                return lambda t: trapping_hamiltonian(t, params)
            if self.model == "kancheva":
                params = KanchevaParams(**p)
                return lambda t: kancheva_hamiltonian(t, params)
            if self.model == "dm":
                dm = DMParameters(
                    j=p.pop("j"),
                    beta=np.asarray(p.pop("beta", [0.0, 0.0, 0.0]), dtype=float),
                    gamma=np.asarray(p.pop("gamma", np.zeros((3, 3))), dtype=float),
                )
                if p:
                    raise ConfigInvalid(f"unknown dm parameters: {sorted(p)}")
                h = assemble_su3_hamiltonian(dm_coefficients(dm))
                defect = dm_embedding_defect(dm)
                if warn and defect > 0.0:
                    print(
                        f"note: antisymmetric exchange (norm {defect:.6g}) has no "
                        "image in the embedding and is not evolved",
                        file=sys.stderr,
                    )
                return lambda t: h
            return self._custom_schedule(p)
        except ConfigInvalid:
            raise
        except (TypeError, ValueError, KeyError, CosetflowError) as exc:
            raise ConfigInvalid(f"bad parameters for model {self.model!r}: {exc}") from None

    def _custom_schedule(self, p: dict) -> Callable[[float], np.ndarray]:
        trace_part = float(p.pop("trace_part", 0.0))
        if "a" in p:
            a = np.asarray(p.pop("a"), dtype=float)
            if p:
                raise ConfigInvalid(f"unknown custom parameters: {sorted(p)}")
            c = CoefficientVector(a, trace_part)
            h = assemble_su3_hamiltonian(c)
            return lambda t: h
        if "a_series" in p:
            series = p.pop("a_series")
            if p:
                raise ConfigInvalid(f"unknown custom parameters: {sorted(p)}")
            times = np.asarray(series["times"], dtype=float)
            values = np.asarray(series["values"], dtype=float)
            if times.ndim != 1 or values.shape != (times.size, 8) or times.size < 2:
                raise ConfigInvalid(
                    "a_series needs times (k,) and values (k, 8) with k >= 2"
                )
            if np.any(np.diff(times) <= 0.0):
                raise ConfigInvalid("a_series times must be strictly increasing")

            def h_of_t(t: float) -> np.ndarray:
                a = np.array([np.interp(t, times, values[:, i]) for i in range(8)])
                return assemble_su3_hamiltonian(CoefficientVector(a, trace_part))

            return h_of_t
        raise ConfigInvalid("custom-coefficients needs either 'a' or 'a_series'")


# ---------------------------------------------------------------------------
# Column assembly


def _reference_tol(tol: float) -> float:
    return max(tol * _REFERENCE_FACTOR, _REFERENCE_TOL_FLOOR)


def _deviation(u: np.ndarray, u_ref: np.ndarray) -> np.ndarray:
    return np.linalg.norm(u - u_ref, axis=(1, 2))


def _geometry_from_u(
    times: np.ndarray, u: np.ndarray, matrix_fn: Callable[[float], np.ndarray]
) -> dict[str, np.ndarray]:
    """Base-manifold columns extracted from raw propagator samples.

    The third column of U is proportional to (z, 1), so z comes from a
    ratio and the linearizing phase from quadrature of its printed rate.
    Samples where |U_33| falls below the chart floor get NaN geometry
    (the propagator columns remain valid there).
    """
    k = times.size
    c3 = u[:, :, 2]
    ok = np.abs(c3[:, 2]) > _CHART_FLOOR
    z = np.full((k, 2), np.nan, dtype=complex)
    z[ok] = c3[ok, :2] / c3[ok, 2:3]
    phidot = np.zeros(k)
    for i in range(k):
        if ok[i]:
            v = np.asarray(matrix_fn(times[i]))[:2, 2]
            phidot[i] = float(np.vdot(v, z[i]).real)
        else:
            phidot[i] = np.nan
    phi = cumulative_trapezoid(phidot, times, initial=0.0)
    m = np.full((k, 3), np.nan, dtype=complex)
    theta1 = np.full(k, np.nan)
    theta2 = np.full(k, np.nan)
    eps1 = np.full(k, np.nan)
    eps2 = np.full(k, np.nan)
    for i in range(k):
        if not ok[i]:
            continue
        m[i] = su3.z_to_m(z[i], phi[i])
        angles = su3.polar_from_z(z[i])
        theta1[i], theta2[i] = angles.theta1, angles.theta2
        eps1[i], eps2[i] = angles.eps1, angles.eps2
    return {
        "m": m,
        "theta1": theta1,
        "theta2": theta2,
        "eps1": eps1,
        "eps2": eps2,
        "phi": phi,
    }


def _unitarity(u: np.ndarray) -> np.ndarray:
    ut = np.swapaxes(u.conj(), 1, 2)
    return np.linalg.norm(ut @ u - np.eye(u.shape[-1]), axis=(1, 2))


def _run_columns(config: RunConfig) -> dict[str, np.ndarray]:
    """Integrate per the configured pipeline and assemble all CSV columns."""
    matrix_fn = config.matrix_schedule(warn=True)
    ref_tol = _reference_tol(config.tol)
    _, u_ref = oracle_evolve(
        matrix_fn, config.t0, config.t1, tol=ref_tol, samples=config.samples
    )

    if config.pipeline == "su3":
        traj = evolve(
            block_schedule(matrix_fn),
            config.t0,
            config.t1,
            tol=config.tol,
            samples=config.samples,
            pipeline="m",
        )
        times, u = traj.times, traj.u
        base = su3.base_trajectory(traj)
        geometry = {
            "m": traj.m,
            "theta1": base["theta1"],
            "theta2": base["theta2"],
            "eps1": base["eps1_wrapped"],
            "eps2": base["eps2_wrapped"],
            "phi": traj.phi,
        }
        unit_res = traj.unitarity_residuals()
    elif config.pipeline == "su4":
        dense = evolve_pair(
            coefficient_schedule(matrix_fn),
            config.t0,
            config.t1,
            tol=config.tol,
            samples=config.samples,
        )
        times, u = dense.times, dense.three_level()
        geometry = _geometry_from_u(times, u, matrix_fn)
        unit_res = dense.unitarity_residuals()
    else:
        times, u = oracle_evolve(
            matrix_fn, config.t0, config.t1, tol=config.tol, samples=config.samples
        )
        geometry = _geometry_from_u(times, u, matrix_fn)
        unit_res = _unitarity(u)

    pops = np.abs(u[:, :, config.initial]) ** 2
    m = np.asarray(geometry["m"])
    return {
        "t": times,
        "P1": pops[:, 0],
        "P2": pops[:, 1],
        "P3": pops[:, 2],
        "m1r": m[:, 0].real,
        "m2r": m[:, 1].real,
        "m3r": m[:, 2].real,
        "m1i": m[:, 0].imag,
        "m2i": m[:, 1].imag,
        "m3i": m[:, 2].imag,
        "theta1": geometry["theta1"],
        "theta2": geometry["theta2"],
        "eps1": geometry["eps1"],
        "eps2": geometry["eps2"],
        "phi": geometry["phi"],
        "unitarity_residual": unit_res,
        "oracle_deviation": _deviation(u, u_ref),
    }


def _format_float(x: float) -> str:
    return repr(float(x))


def _write_csv(path: Path, columns: dict[str, np.ndarray]) -> None:
    names = CSV_HEADER.split(",")
    k = columns["t"].size
    lines = [CSV_HEADER]
    for i in range(k):
        lines.append(",".join(_format_float(columns[name][i]) for name in names))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


# ---------------------------------------------------------------------------
# Subcommands


def _load_json(path: Path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigInvalid(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"{path} is not valid JSON: {exc}") from None


def cmd_evolve(config: RunConfig, out_path: Path) -> int:
    """Run one configured integration and write the CSV."""
    columns = _run_columns(config)
    _write_csv(out_path, columns)
    return 0


def _read_angle_path(path: Path) -> AnglePath:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise PathInvalid(f"cannot read {path}: {exc}") from None
    rows = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != 5:
            raise PathInvalid(
                f"{path}:{line_no}: need 5 columns (t, theta1, theta2, eps1, eps2)"
            )
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            if line_no == 1:
                continue  # header row
            raise PathInvalid(f"{path}:{line_no}: non-numeric row") from None
    if len(rows) < 2:
        raise PathInvalid(f"{path}: need at least two path samples")
    data = np.asarray(rows, dtype=float)
    closed = (
        abs(data[0, 1] - data[-1, 1]) <= 1e-9
        and abs(data[0, 2] - data[-1, 2]) <= 1e-9
        and abs(wrap_to_pi(data[0, 3] - data[-1, 3])) <= 1e-9
        and abs(wrap_to_pi(data[0, 4] - data[-1, 4])) <= 1e-9
    )
    try:
        return AnglePath(
            times=data[:, 0],
            theta1=data[:, 1],
            theta2=data[:, 2],
            eps1=data[:, 3],
            eps2=data[:, 4],
            closed=closed,
        )
    except (ValueError, CosetflowError) as exc:
        raise PathInvalid(f"{path}: {exc}") from None


def cmd_gphase(path_file: Path, out_path: Path) -> int:
    """Integrate the loop one-form over a CSV angle path, emit JSON."""
    path = _read_angle_path(path_file)
    gamma = su3_geometric_phase(path)
    payload = {
        "gamma_g": gamma,
        "gamma_g_wrapped": wrap_to_pi(gamma),
        "path_closed": path.closed,
    }
    out_path.write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
        newline="\n",
    )
    return 0


def cmd_sweep(sweep_config: dict, out_dir: Path) -> int:
    """Run every grid point concurrently, then write the manifest."""
    if not isinstance(sweep_config, dict):
        raise ConfigInvalid("sweep config must be a JSON object")
    unknown = set(sweep_config) - {"points", "base"}
    if unknown:
        raise ConfigInvalid(f"unknown sweep keys: {sorted(unknown)}")
    if "base" not in sweep_config or "points" not in sweep_config:
        raise ConfigInvalid("sweep config needs 'base' and 'points'")
    base = sweep_config["base"]
    points = sweep_config["points"]
    if not isinstance(base, dict):
        raise ConfigInvalid("'base' must be a JSON object")
    if not isinstance(points, list) or any(not isinstance(p, dict) for p in points):
        raise ConfigInvalid("'points' must be a list of parameter objects")

    configs = []
    for point in points:
        merged = dict(base)
        merged["parameters"] = {**base.get("parameters", {}), **point}
        configs.append(RunConfig.from_dict(merged))

    out_dir.mkdir(parents=True, exist_ok=True)
    files = [out_dir / f"run_{i:03d}.csv" for i in range(len(configs))]

    def run_one(i: int) -> None:
        cmd_evolve(configs[i], files[i])

    if configs:
        workers = min(len(configs), 8)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_one, i) for i in range(len(configs))]
            for fut in futures:
                fut.result()

    manifest = {
        "runs": [
            {
                "index": i,
                "file": files[i].name,
                "model": configs[i].model,
                "parameters": configs[i].parameters,
                "t0": configs[i].t0,
                "t1": configs[i].t1,
                "samples": configs[i].samples,
                "tol": configs[i].tol,
                "pipeline": configs[i].pipeline,
            }
            for i in range(len(configs))
        ]
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
        newline="\n",
    )
    return 0


# ---------------------------------------------------------------------------
# Argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cosetflow",
        description="Factorized integration of driven three-level systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_evolve = sub.add_parser("evolve", help="integrate one model, write CSV")
    p_evolve.add_argument("--config", required=True, type=Path, help="run config JSON")
    p_evolve.add_argument("--out", required=True, type=Path, help="output CSV path")
    p_evolve.add_argument("--pipeline", choices=_PIPELINES, help="override pipeline")
    p_evolve.add_argument("--tol", type=float, help="override tolerance")
    p_evolve.add_argument("--samples", type=int, help="override sample count")

    p_gphase = sub.add_parser("gphase", help="integrate the loop one-form over a path")
    p_gphase.add_argument(
        "--config", required=True, type=Path,
        help="CSV path file (t, theta1, theta2, eps1, eps2)",
    )
    p_gphase.add_argument("--out", required=True, type=Path, help="output JSON path")

    p_sweep = sub.add_parser("sweep", help="run a parameter grid concurrently")
    p_sweep.add_argument("--config", required=True, type=Path, help="sweep config JSON")
    p_sweep.add_argument("--out", required=True, type=Path, help="output directory")
    p_sweep.add_argument("--pipeline", choices=_PIPELINES, help="override pipeline")
    p_sweep.add_argument("--tol", type=float, help="override tolerance")
    p_sweep.add_argument("--samples", type=int, help="override sample count")
    return parser


def _apply_overrides(raw: dict, args: argparse.Namespace) -> dict:
    if not isinstance(raw, dict):
        raise ConfigInvalid("config must be a JSON object")
    raw = dict(raw)
    if args.pipeline is not None:
        raw["pipeline"] = args.pipeline
    if args.tol is not None:
        raw["tol"] = args.tol
    if args.samples is not None:
        raw["samples"] = args.samples
    return raw


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "evolve":
            raw = _apply_overrides(_load_json(args.config), args)
            return cmd_evolve(RunConfig.from_dict(raw), args.out)
        if args.command == "gphase":
            return cmd_gphase(args.config, args.out)
        raw = _load_json(args.config)
        if isinstance(raw, dict) and isinstance(raw.get("base"), dict):
            raw["base"] = _apply_overrides(raw["base"], args)
        return cmd_sweep(raw, args.out)
    except ConfigInvalid as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IntegrationFailure as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return 3
    except CosetflowError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
