"""Command-line front end with seeded, bit-stable file output.

Subcommands:
  params    kinetic-theory estimates as JSON on stdout
  tree      collision-tree leaves as CSV plus a JSON summary
  gas       N-particle run: trajectory CSV, optional spectrum CSV, JSON summary
  spectrum  re-fit growth exponents from a saved spectrum CSV
  verify    run the invariant self-check suite

Every output file starts with a one-line JSON manifest comment recording the
command, parameters, seed, collision matrix, generator, and tool version.
Floats are printed with 17 significant digits so re-runs with the same
manifest reproduce byte-identical CSV bodies.  Exit codes: 0 success,
1 usage error, 2 runtime refusal (memory budget), 3 verification failure.

The environment variable ARNOLDGAS_OUTDIR, when set, is the base directory
for relative output paths.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, gas, kinetics, maps, spectral, tree, verify

OUTDIR_ENV = "ARNOLDGAS_OUTDIR"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_REFUSED = 2
EXIT_VERIFY_FAILED = 3

TREE_CSV_COLUMNS = ["stage", "n1", "n2", "dx", "dp", "norm"]
GAS_CSV_COLUMNS = ["t", "affected", "norm", "max_disp", "median_disp", "twin_dist"]
SPECTRUM_CSV_COLUMNS = ["t", "m1", "m2", "re_ntilde", "im_ntilde", "delta_twin", "delta_linear"]


class _Parser(argparse.ArgumentParser):
    """argparse with exit code 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _resolve_out(path_str: str) -> Path:
    path = Path(path_str)
    base = os.environ.get(OUTDIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _manifest(command: str, params: dict, seed=None, matrix=None) -> dict:
    manifest = {
        "command": command,
        "version": __version__,
        "params": params,
        "generator": gas.RNG_NAME,
    }
    if seed is not None:
        manifest["seed"] = seed
    if matrix is not None:
        manifest["model"] = matrix
    return manifest


def _write_csv(path: Path, manifest: dict, columns: list[str], rows) -> str:
    """Write manifest header + CSV; return the sha256 of the CSV body."""
    body_lines = [",".join(columns)]
    body_lines += [",".join(_fmt(v) for v in row) for row in rows]
    body = "\n".join(body_lines) + "\n"
    header = "# " + json.dumps(manifest, sort_keys=True) + "\n"
    path.write_text(header + body)
    return hashlib.sha256(body.encode()).hexdigest()


def _write_summary(path: Path, manifest: dict, summary: dict,
                   digests: dict[str, str]) -> None:
    payload = {"manifest": manifest, "summary": summary, "output_digests": digests}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _parse_matrix(text: str) -> list[list[int]]:
    parts = [int(v) for v in text.split(",")]
    if len(parts) != 4:
        raise ValueError("matrix must be four comma-separated integers a,b,c,d")
    return [[parts[0], parts[1]], [parts[2], parts[3]]]


def _summary_path(out: Path) -> Path:
    return out.with_suffix(".summary.json")


# ---------------------------------------------------------------- params


def cmd_params(args) -> int:
    params = kinetics.KineticParams(
        temperature=args.temperature,
        pressure=args.pressure,
        length=args.length,
        diameter=args.diameter,
        mass=args.mass,
    )
    derived = kinetics.derive(params)
    payload = {
        "inputs": {
            "temperature_K": params.temperature,
            "pressure_Pa": params.pressure,
            "length_m": params.length,
            "diameter_m": params.diameter,
            "mass_kg": params.mass,
        },
        "derived": {
            "n_particles": derived.n_particles,
            "mean_free_path_m": derived.mean_free_path,
            "mean_speed_m_per_s": derived.mean_speed,
            "mean_free_time_s": derived.mean_free_time,
            "collision_rate_per_s": derived.collision_rate,
        },
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


# ------------------------------------------------------------------ tree


def cmd_tree(args) -> int:
    matrix = _parse_matrix(args.matrix)
    model = maps.spectral_decompose(matrix)
    out = _resolve_out(args.out)
    params = {
        "stages": args.stages,
        "epsilon": args.epsilon,
        "aggregate_only": args.aggregate_only,
    }
    manifest = _manifest("tree", params, seed=args.seed, matrix=matrix)

    stages = args.stages
    geo_closed, arith_closed = tree.mean_dilations_closed(model, stages)
    gasdil_closed = tree.gas_dilation_closed(model, stages)
    bound = 2.0 ** (stages / 2.0)

    digests: dict[str, str] = {}
    summary = {
        "stages": stages,
        "n_leaves": 2**stages,
        "geometric_mean_dilation_closed": geo_closed,
        "arithmetic_mean_dilation_closed": arith_closed,
        "gas_dilation_closed": gasdil_closed,
        "gas_dilation_bound": bound,
        "bound_satisfied": gasdil_closed >= bound,
    }

    if not args.aggregate_only:
        run = tree.run_tree(model, stages, args.epsilon)
        geo, arith = tree.mean_dilations(run, model)
        summary["geometric_mean_dilation"] = geo
        summary["arithmetic_mean_dilation"] = arith
        summary["gas_dilation"] = tree.gas_dilation(run)
        digests[out.name] = _write_csv(out, manifest, TREE_CSV_COLUMNS, tree.leaf_records(run))
        print(f"wrote {out}")

    summary_path = _summary_path(out)
    _write_summary(summary_path, manifest, summary, digests)
    print(f"wrote {summary_path}")
    return EXIT_OK


# ------------------------------------------------------------------- gas


def _mode_report(traj, mode, model, window) -> dict:
    series = spectral.delta_series(traj, mode)
    deltas = series.deltas_twin if series.deltas_twin is not None else series.deltas_linear
    report: dict = {"m1": mode.m1, "m2": mode.m2}
    try:
        fit = spectral.fit_growth(deltas, window)
        report.update(slope=fit.slope, intercept=fit.intercept, r2=fit.r2)
    except ValueError as exc:
        report["fit_error"] = str(exc)
    est = spectral.exponent_estimate(traj, mode, model, window[1])
    report.update(
        lambda_=est.lam, term1=est.term1, term2=est.term2, degenerate=est.degenerate
    )
    return report


def cmd_gas(args) -> int:
    matrix = _parse_matrix(args.matrix)
    model = maps.spectral_decompose(matrix)
    if args.particles % 2:
        print(f"warning: odd particle count {args.particles}; one particle "
              "idles each step", file=sys.stderr)

    config = gas.RunConfig(
        n_particles=args.particles,
        steps=args.steps,
        epsilon=args.epsilon,
        seed=args.seed,
        pairing="tree" if args.pairing == "tree" else "random",
        twin=args.twin == "on",
    )
    params = {
        "particles": args.particles,
        "steps": args.steps,
        "epsilon": args.epsilon,
        "pairing": args.pairing,
        "modes": args.modes,
        "twin": args.twin,
    }
    manifest = _manifest("gas", params, seed=args.seed, matrix=matrix)
    out = _resolve_out(args.out)

    traj = gas.run_paired(config, model)

    rows = [
        (t, traj.affected_count[t], traj.norm[t], traj.max_disp[t],
         traj.median_disp[t], traj.twin_dist[t])
        for t in range(args.steps + 1)
    ]
    digests = {out.name: _write_csv(out, manifest, GAS_CSV_COLUMNS, rows)}
    print(f"wrote {out}")

    t_s = gas.significance_time(traj)
    t_sat = traj.saturation_step
    summary: dict = {
        "significance_time": None if math.isinf(t_s) else t_s,
        "saturation_step": None if math.isinf(t_sat) else t_sat,
    }

    if args.modes > 0:
        window = spectral.default_fit_window(traj)
        summary["fit_window"] = list(window)
        modes = spectral.enumerate_modes(args.modes)
        workers = args.threads or os.cpu_count() or 1
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(
                lambda m: _mode_report(traj, m, model, window), modes))
        summary["modes"] = reports

        spectrum_rows = []
        for mode in modes:
            series = spectral.delta_series(traj, mode)
            for t in range(args.steps + 1):
                twin_mag = (abs(series.deltas_twin[t])
                            if series.deltas_twin is not None else math.nan)
                spectrum_rows.append((
                    t, mode.m1, mode.m2,
                    series.values[t].real, series.values[t].imag,
                    twin_mag, abs(series.deltas_linear[t]),
                ))
        spectrum_path = out.with_suffix(".spectrum.csv")
        digests[spectrum_path.name] = _write_csv(
            spectrum_path, manifest, SPECTRUM_CSV_COLUMNS, spectrum_rows)
        print(f"wrote {spectrum_path}")

    summary_path = _summary_path(out)
    _write_summary(summary_path, manifest, summary, digests)
    print(f"wrote {summary_path}")
    return EXIT_OK


# -------------------------------------------------------------- spectrum


def _read_spectrum_csv(path: Path) -> tuple[dict, dict[tuple[int, int], np.ndarray]]:
    lines = path.read_text().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ValueError(f"{path} has no manifest header line")
    manifest = json.loads(lines[0][1:])
    columns = lines[1].split(",")
    idx = {name: i for i, name in enumerate(columns)}
    for required in ("t", "m1", "m2", "delta_twin", "delta_linear"):
        if required not in idx:
            raise ValueError(f"{path} is missing column {required!r}")
    per_mode: dict[tuple[int, int], dict[int, tuple[float, float]]] = {}
    for line in lines[2:]:
        if not line:
            continue
        cells = line.split(",")
        key = (int(cells[idx["m1"]]), int(cells[idx["m2"]]))
        t = int(cells[idx["t"]])
        per_mode.setdefault(key, {})[t] = (
            float(cells[idx["delta_twin"]]), float(cells[idx["delta_linear"]]))
    series = {}
    for key, by_t in per_mode.items():
        n_steps = max(by_t) + 1
        arr = np.full((n_steps, 2), math.nan)
        for t, pair in by_t.items():
            arr[t] = pair
        series[key] = arr
    return manifest, series


def cmd_spectrum(args) -> int:
    path = Path(args.infile)
    manifest, series = _read_spectrum_csv(path)
    use_twin = args.use == "twin"
    reports = []
    for (m1, m2), arr in sorted(series.items()):
        deltas = arr[:, 0] if use_twin else arr[:, 1]
        if args.window:
            window = (args.window[0], args.window[1])
        else:
            window = (2, len(deltas) - 1)
        report: dict = {"m1": m1, "m2": m2}
        try:
            fit = spectral.fit_growth(np.nan_to_num(deltas, nan=0.0), window)
            report.update(slope=fit.slope, intercept=fit.intercept, r2=fit.r2)
        except ValueError as exc:
            report["fit_error"] = str(exc)
        reports.append(report)
    payload = {
        "source": str(path),
        "source_manifest": manifest,
        "use": args.use,
        "modes": reports,
    }
    if args.out:
        out = _resolve_out(args.out)
        out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"wrote {out}")
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------- verify


def cmd_verify(args) -> int:
    corrupt = os.environ.get(verify.CORRUPT_ENV) or None
    results = verify.run_checks(quick=args.quick, corrupt=corrupt)
    for result in results:
        print(result.line())
    if verify.all_passed(results):
        print(f"all {len(results)} checks passed")
        return EXIT_OK
    failed = [r.name for r in results if not r.passed]
    print(f"FAILED: {', '.join(failed)}")
    return EXIT_VERIFY_FAILED


# ------------------------------------------------------------------ main


def build_parser() -> _Parser:
    parser = _Parser(prog="arnoldgas",
                     description="Deterministic cat-map gas simulator and analysis toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="kinetic-theory estimates (JSON to stdout)")
    p.add_argument("--temperature", type=float, default=kinetics.REFERENCE_TEMPERATURE)
    p.add_argument("--pressure", type=float, default=kinetics.REFERENCE_PRESSURE)
    p.add_argument("--length", type=float, default=kinetics.REFERENCE_LENGTH)
    p.add_argument("--diameter", type=float, default=kinetics.DEFAULT_DIAMETER)
    p.add_argument("--mass", type=float, default=kinetics.DEFAULT_MASS)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("tree", help="collision-tree leaves (CSV + JSON summary)")
    p.add_argument("--stages", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--matrix", default="1,1,1,2", help="collision matrix a,b,c,d")
    p.add_argument("--aggregate-only", action="store_true",
                   help="skip explicit leaves; closed-form aggregates only")
    p.add_argument("--out", default="tree.csv")
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("gas", help="N-particle run (CSV trajectory + JSON summary)")
    p.add_argument("--particles", type=int, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pairing", choices=["random", "tree"], default="random")
    p.add_argument("--modes", type=int, default=4,
                   help="max |m| of Fourier modes to analyze (0 disables)")
    p.add_argument("--twin", choices=["on", "off"], default="off")
    p.add_argument("--matrix", default="1,1,1,2")
    p.add_argument("--threads", type=int, default=0,
                   help="worker threads for mode analysis (0 = all cores)")
    p.add_argument("--out", default="gas.csv")
    p.set_defaults(func=cmd_gas)

    p = sub.add_parser("spectrum", help="re-fit growth from a saved spectrum CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--use", choices=["linear", "twin"], default="linear")
    p.add_argument("--window", type=int, nargs=2, metavar=("T_A", "T_B"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("verify", help="run the invariant self-check suite")
    p.add_argument("--quick", action="store_true", help="fast subset (< 10 s)")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (tree.MemoryBudgetError, MemoryError) as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
