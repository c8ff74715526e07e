"""Command-line interface: run, noise, check-operator, denoise-experiment.

Batch only, no environment variables -- every run is fully determined by
its flags, and each command writes a JSON manifest with the resolved
configuration so results can be reproduced exactly.

Exit codes: 0 success, 1 configuration error, 2 I/O or parse error,
3 numeric blowup or solver failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .analysis import add_gaussian_noise, continuity_check, denoise_experiment, verify_operator_properties
from .diffusivity import KINDS, DiffusivityModel
from .errors import ConfigError, NumericBlowupError, ParseError, SolverError
from .grid import ScalarField
from .io import read_csv_signal, read_pgm, write_csv_signal, write_pgm
from .operator import assemble
from .schemes import SCHEMES, SchemeConfig, run
from .analysis import field_stats


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse would sys.exit(2); bad flags are configuration errors (exit 1) here
        raise ConfigError(message)


def _load_field(path: Path) -> tuple[ScalarField, str]:
    ext = path.suffix.lower()
    if ext == ".pgm":
        return read_pgm(path.read_bytes()), ".pgm"
    if ext == ".csv":
        return read_csv_signal(path.read_text()), ".csv"
    raise ConfigError(f"cannot infer format of {path}: expected .pgm (2D) or .csv (1D signal)")


def _save_field(path: Path, field: ScalarField):
    ext = path.suffix.lower()
    if ext == ".pgm":
        path.write_bytes(write_pgm(field))
    elif ext == ".csv":
        path.write_text(write_csv_signal(field))
    else:
        raise ConfigError(f"cannot infer format of {path}: expected .pgm or .csv")


def _model(args) -> DiffusivityModel:
    return DiffusivityModel(args.diffusivity, args.lam)


def _config(args) -> SchemeConfig:
    return SchemeConfig(
        scheme=args.scheme,
        tau=args.tau,
        sigma=args.sigma,
        solver_tol=args.solver_tol,
        solver_maxit=args.solver_maxit,
        enforce_stability_bound=not args.allow_unstable,
    )


def _write_manifest(path: Path, command: str, config: dict, inputs: dict, outputs: list[str], seed=None):
    manifest = {
        "artifact": "pmdiff",
        "version": __version__,
        "command": command,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "seed": seed,
        "config": config,
        "inputs": inputs,
        "outputs": outputs,
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _model_config_dict(args, field: ScalarField | None = None) -> dict:
    d = {
        "scheme": args.scheme,
        "tau": args.tau,
        "lambda": args.lam,
        "diffusivity": args.diffusivity,
        "sigma": args.sigma,
        "solver_tol": args.solver_tol,
        "solver_maxit": args.solver_maxit,
        "enforce_stability_bound": not args.allow_unstable,
    }
    if field is not None and d["solver_maxit"] is None:
        d["solver_maxit"] = 10 * field.height * field.width
    return d


def _parse_snapshots(text: str) -> list[int]:
    if not text:
        return []
    try:
        snaps = sorted({int(tok) for tok in text.split(",") if tok.strip() != ""})
    except ValueError:
        raise ConfigError(f"--snapshots must be comma-separated integers, got {text!r}") from None
    if any(s < 0 for s in snaps):
        raise ConfigError("snapshot iterations must be >= 0")
    return snaps


def cmd_run(args) -> int:
    field, ext = _load_field(Path(args.input))
    model = _model(args)
    config = _config(args)
    snapshots = _parse_snapshots(args.snapshots)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    width = max(1, len(str(args.iters)))
    written: list[str] = []

    def snap_path(it: int) -> Path:
        return out_dir / f"out_{it:0{width}d}{ext}"

    wanted = set(snapshots)

    if 0 in wanted:
        _save_field(snap_path(0), field)
        written.append(str(snap_path(0)))

    def observer(it, u):
        if it in wanted:
            _save_field(snap_path(it), u)
            written.append(str(snap_path(it)))

    final, log = run(field, model, config, args.iters, observer=observer)

    log_path = Path(args.log) if args.log else out_dir / "metrics.csv"
    log_path.parent.mkdir(parents=True, exist_ok=True)
    log_path.write_text(log.to_csv())
    written.append(str(log_path))

    manifest_path = Path(args.manifest) if args.manifest else out_dir / "manifest.json"
    config_dict = _model_config_dict(args, field)
    config_dict.update({"iters": args.iters, "snapshots": snapshots, "dx": field.dx, "dy": field.dy})
    _write_manifest(manifest_path, "run", config_dict, {"input": args.input}, written)

    print(f"{args.scheme}: {args.iters} iterations on {field.height}x{field.width} field; "
          f"{len(written) - 1} snapshot(s), metrics in {log_path}")
    return 0


def cmd_noise(args) -> int:
    field, _ = _load_field(Path(args.input))
    noisy = add_gaussian_noise(field, args.snr, args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    _save_field(out, noisy)
    manifest_path = Path(args.manifest) if args.manifest else out.with_name(out.name + ".manifest.json")
    _write_manifest(
        manifest_path,
        "noise",
        {"snr": args.snr},
        {"input": args.input},
        [str(out)],
        seed=args.seed,
    )
    print(f"wrote {out} (snr={args.snr:g}, seed={args.seed})")
    return 0


def cmd_check_operator(args) -> int:
    field, _ = _load_field(Path(args.input))
    model = _model(args)
    p1 = continuity_check(field, model)
    rest = verify_operator_properties(assemble(field, model))
    for line in p1.lines() + rest.lines():
        print(line)
    if args.kv:
        for line in p1.key_values() + rest.key_values():
            print(line)
    return 0


def cmd_denoise_experiment(args) -> int:
    clean, ext = _load_field(Path(args.clean))
    generated = False
    if args.noisy:
        noisy, _ = _load_field(Path(args.noisy))
    else:
        if args.snr is None:
            raise ConfigError("provide --noisy PATH or --snr to generate noise")
        noisy = add_gaussian_noise(clean, args.snr, args.seed)
        generated = True

    schemes_list = [s.strip() for s in args.schemes.split(",") if s.strip()]
    if not schemes_list:
        raise ConfigError("--schemes must name at least one scheme")
    model = _model(args)
    configs = []
    for s in schemes_list:
        configs.append(SchemeConfig(scheme=s, tau=args.tau, sigma=args.sigma,
                                    solver_tol=args.solver_tol, solver_maxit=args.solver_maxit,
                                    enforce_stability_bound=not args.allow_unstable))

    outcomes = denoise_experiment(clean, noisy, model, configs, max_iters=args.max_iters)

    written: list[str] = []
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        if generated:
            noisy_path = out_dir / f"noisy{ext}"
            _save_field(noisy_path, noisy)
            written.append(str(noisy_path))
        for r in outcomes:
            curve_path = out_dir / f"curve_{r.scheme}.csv"
            lines = ["iter,l1,relative"]
            lines += [f"{n},{e:.15g},{rel:.15g}" for n, (e, rel) in enumerate(zip(r.errors, r.relative_errors))]
            curve_path.write_text("\n".join(lines) + "\n")
            written.append(str(curve_path))
        config_dict = {
            "schemes": schemes_list, "tau": args.tau, "lambda": args.lam,
            "diffusivity": args.diffusivity, "sigma": args.sigma, "snr": args.snr,
            "max_iters": args.max_iters,
        }
        _write_manifest(out_dir / "manifest.json", "denoise-experiment", config_dict,
                        {"clean": args.clean, "noisy": args.noisy}, written,
                        seed=args.seed if generated else None)

    for r in outcomes:
        rel = r.relative_errors[r.stop_iteration] if r.errors[0] > 0 else 0.0
        suffix = " (no minimum before max-iters)" if r.hit_max_iters else ""
        print(f"{r.scheme}: stop_iter={r.stop_iteration} min_error={r.min_error:.9g} "
              f"rel_min_error={rel:.9g}{suffix}")
    return 0


def _add_model_flags(p: argparse.ArgumentParser):
    p.add_argument("--diffusivity", choices=KINDS, default="rational",
                   help="diffusivity model (default: rational)")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0, metavar="L",
                   help="contrast parameter in intensity-gradient units of the loaded data (default: 1)")


def _add_scheme_flags(p: argparse.ArgumentParser):
    p.add_argument("--tau", type=float, default=0.2, help="timestep (default: 0.2)")
    p.add_argument("--sigma", type=float, default=1.0,
                   help="regularization width in pixels, regularized scheme only (default: 1)")
    p.add_argument("--solver-tol", type=float, default=1e-10,
                   help="semi-implicit relative-residual tolerance (default: 1e-10)")
    p.add_argument("--solver-maxit", type=int, default=None,
                   help="semi-implicit max solver iterations (default: 10*M*N)")
    p.add_argument("--allow-unstable", action="store_true",
                   help="disable the explicit stability-bound check")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pmdiff", description="Nonlinear diffusion filtering of PGM images and CSV signals")
    parser.add_argument("--version", action="version", version=f"pmdiff {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="evolve an image/signal under a scheme", parents=[], description=cmd_run.__doc__)
    p.add_argument("input", help="input field: .pgm image or .csv signal")
    p.add_argument("--scheme", choices=SCHEMES, default="explicit")
    _add_model_flags(p)
    _add_scheme_flags(p)
    p.add_argument("--iters", type=int, default=100, help="number of steps (default: 100)")
    p.add_argument("--snapshots", default="", metavar="I1,I2,...",
                   help="iterations to snapshot, e.g. 10,100,1000 (0 = initial field)")
    p.add_argument("--out-dir", default=".", help="output directory (default: .)")
    p.add_argument("--log", default=None, help="metrics CSV path (default: OUT_DIR/metrics.csv)")
    p.add_argument("--manifest", default=None, help="manifest path (default: OUT_DIR/manifest.json)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("noise", help="add zero-mean Gaussian noise at a given SNR")
    p.add_argument("input")
    p.add_argument("--out", required=True, help="output path (.pgm clamps at export, .csv keeps full precision)")
    p.add_argument("--snr", type=float, required=True, help="mean signal / noise std")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--manifest", default=None, help="manifest path (default: OUT.manifest.json)")
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("check-operator", help="assemble the diffusion operator and verify P1-P5")
    p.add_argument("input")
    _add_model_flags(p)
    p.add_argument("--kv", action="store_true", help="also print machine-readable key=value lines")
    p.set_defaults(func=cmd_check_operator)

    p = sub.add_parser("denoise-experiment",
                       help="run schemes on a noisy field until the first error minimum")
    p.add_argument("--clean", required=True, help="clean reference field")
    p.add_argument("--noisy", default=None, help="noisy input; omit to generate with --snr/--seed")
    p.add_argument("--snr", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--schemes", default="regularized,explicit,pm-original",
                   help="comma-separated scheme list (default: regularized,explicit,pm-original)")
    _add_model_flags(p)
    _add_scheme_flags(p)
    p.add_argument("--max-iters", type=int, default=10000)
    p.add_argument("--out-dir", default=None, help="write error curves, generated noise, and manifest here")
    p.set_defaults(func=cmd_denoise_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as e:
        return _fail(1, e)
    except ParseError as e:
        return _fail(2, e)
    except OSError as e:
        return _fail(2, e)
    except (NumericBlowupError, SolverError) as e:
        return _fail(3, e)


def _fail(code: int, err: Exception) -> int:
    print(f"error: {err}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
