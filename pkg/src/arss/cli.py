"""Command-line interface.

Subcommands: select (run a solver and rank exemplars or features),
bench (scaling sweep with a fitted log-log exponent), eval (accuracy vs
selection size under the corruption protocol), noise (corrupt a
dataset file), convert (csv <-> bin).

Every run embeds a manifest (full config echo, seeds, input digests,
version, host, timestamps) in its output; rerunning the same command
reproduces everything outside the declared volatile fields.  Exit
codes: 0 ok, 2 usage error, 3 data error, 4 solver failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
import tempfile
from datetime import datetime, timezone

from . import __version__
from .alm import SolverConfig
from .dataio import (FORMATS, NOISE_KINDS, NoiseSpec, inject_noise,
                     read_matrix, write_matrix)
from .evalbench import BENCH_METHODS, accuracy_vs_k, bench_scaling, host_info
from .exceptions import ConfigError, DataError, SolverError
from .irls import RrssConfig
from .selection import METHODS, select_exemplars, select_features

# Fields legitimately differing between reruns of one command; the
# determinism contract covers everything else.
VOLATILE_FIELDS = ("manifest.host", "manifest.started_at", "manifest.finished_at", "timing")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_SOLVER = 4


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat()


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _manifest(command: str, args: argparse.Namespace, inputs: list[str],
              started_at: str) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    return {
        "command": command,
        "config": config,
        "seed": getattr(args, "seed", None),
        "inputs": [{"path": str(p), "sha256": _sha256(p)} for p in inputs],
        "artifact_version": __version__,
        "host": host_info(),
        "started_at": started_at,
        "finished_at": _utcnow(),
    }


def _write_json_atomic(path, payload: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _infer_format(path, explicit: str | None) -> str:
    if explicit:
        return explicit
    return "bin" if str(path).endswith(".bin") else "csv"


def _timing_ms(timing: dict) -> dict:
    return {f"{k}_ms": round(1000.0 * v, 6) for k, v in timing.items()}


def _solver_config_from_args(args) -> SolverConfig | RrssConfig | None:
    if args.method == "random":
        return None
    if args.gamma is None:
        raise ConfigError("--gamma is required for solver methods (no default exists)")
    if args.method == "arss":
        return SolverConfig(gamma=args.gamma, p=args.p, mu0=args.mu0, rho=args.rho,
                            epsilon=args.eps, max_iters=args.max_iters,
                            feas_tol=args.feas_tol, step_tol=args.step_tol,
                            mu_max=args.mu_max, deterministic=args.deterministic)
    return RrssConfig(gamma=args.gamma, epsilon=args.eps,
                      max_outer_iters=args.max_outer_iters, obj_tol=args.obj_tol,
                      path=args.method.removeprefix("rrss-"),
                      deterministic=args.deterministic)


def _cmd_select(args) -> int:
    started = _utcnow()
    dataset = read_matrix(args.input, _infer_format(args.input, args.format))
    config = _solver_config_from_args(args)
    run = select_features if args.mode == "features" else select_exemplars
    report = run(dataset.X, args.k, method=args.method, config=config, seed=args.seed)
    payload = {
        "manifest": _manifest("select", args, [args.input], started),
        "selection": {"indices": report.selected, "scores": report.scores,
                      "order": report.order, "mode": report.mode, "k": report.k,
                      "converged": report.converged, "iterations": report.iterations},
        "trace": report.trace,
        "timing": _timing_ms(report.timing),
    }
    _write_json_atomic(args.out, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _cmd_bench(args) -> int:
    started = _utcnow()
    sizes = [int(s) for s in args.sizes.split(",") if s]
    records, exponent = bench_scaling(
        args.method, sizes, args.feature_dim, gamma=args.gamma, p=args.p,
        repeats=args.repeats, seed=args.seed, iters=args.iters,
        time_cap=args.time_cap)
    lines = [json.dumps({"type": "manifest",
                         **_manifest("bench", args, [], started)}, sort_keys=True)]
    for rec in records:
        lines.append(json.dumps({"type": "record", **dataclasses.asdict(rec)},
                                sort_keys=True))
    lines.append(json.dumps({"type": "summary", "method": args.method,
                             "exponent": exponent}, sort_keys=True))
    _write_json_atomic(args.out, "\n".join(lines) + "\n")
    if args.csv:
        header = "method,n_samples,n_features,repeat,iterations,seed,censored,total_s"
        rows = [header] + [
            f"{r.method},{r.n_samples},{r.n_features},{r.repeat},{r.iterations},"
            f"{r.seed},{int(r.censored)},{r.wall_time['total']:.9f}" for r in records]
        _write_json_atomic(args.csv, "\n".join(rows) + "\n")
    print(f"fitted exponent: {exponent:.3f}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    started = _utcnow()
    dataset = read_matrix(args.input, _infer_format(args.input, args.format))
    config = _solver_config_from_args(args)
    noise = NoiseSpec(fraction=args.noise_fraction,
                      kinds=tuple(args.noise_kinds.split(",")),
                      gaussian_sigma_rel=args.gaussian_sigma_rel,
                      laplace_scale_rel=args.laplace_scale_rel,
                      sp_fraction=args.sp_fraction)
    curve = accuracy_vs_k(
        dataset, args.method, [int(k) for k in args.k_list.split(",") if k],
        config=config, seeds=[int(s) for s in args.seeds.split(",") if s],
        knn_k=args.knn_k, noise=noise, candidate_count=args.candidate_count)
    payload = {"manifest": _manifest("eval", args, [args.input], started),
               "curve": dataclasses.asdict(curve)}
    _write_json_atomic(args.out, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _cmd_noise(args) -> int:
    in_format = _infer_format(args.input, args.format)
    dataset = read_matrix(args.input, in_format)
    spec = NoiseSpec(fraction=args.fraction, kinds=tuple(args.kinds.split(",")),
                     gaussian_sigma_rel=args.gaussian_sigma_rel,
                     laplace_scale_rel=args.laplace_scale_rel,
                     sp_fraction=args.sp_fraction, seed=args.seed)
    stratified = {"auto": None, "yes": True, "no": False}[args.stratified]
    noisy = inject_noise(dataset, spec, stratified=stratified)
    write_matrix(noisy, args.out, _infer_format(args.out, args.out_format))
    if args.mask_out:
        _write_json_atomic(args.mask_out,
                           json.dumps(noisy.provenance["corruption"], sort_keys=True) + "\n")
    corrupted = noisy.provenance["corruption"]["columns"]
    print(f"corrupted {len(corrupted)} of {dataset.n_samples} samples")
    return EXIT_OK


def _cmd_convert(args) -> int:
    dataset = read_matrix(args.input, _infer_format(args.input, args.in_format))
    write_matrix(dataset, args.output, _infer_format(args.output, args.out_format))
    return EXIT_OK


def _add_solver_flags(sp):
    sp.add_argument("--gamma", type=float, default=None,
                    help="regularization weight (required for solver methods)")
    sp.add_argument("--p", type=float, default=0.5, help="loss exponent in [0.1, 1]")
    sp.add_argument("--mu0", type=float, default=0.1)
    sp.add_argument("--rho", type=float, default=1.2)
    sp.add_argument("--eps", type=float, default=1e-10)
    sp.add_argument("--max-iters", type=int, default=100)
    sp.add_argument("--feas-tol", type=float, default=1e-6)
    sp.add_argument("--step-tol", type=float, default=1e-6)
    sp.add_argument("--mu-max", type=float, default=1e10)
    sp.add_argument("--obj-tol", type=float, default=1e-8)
    sp.add_argument("--max-outer-iters", type=int, default=50)
    sp.add_argument("--deterministic", action="store_true",
                    help="pin kernels to one thread for bit-reproducible output")


def _add_noise_magnitude_flags(sp):
    sp.add_argument("--gaussian-sigma-rel", type=float, default=0.1)
    sp.add_argument("--laplace-scale-rel", type=float, default=0.1)
    sp.add_argument("--sp-fraction", type=float, default=0.1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arss", description="Robust subset selection by self-representation")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("select", help="select exemplar samples or features")
    sp.add_argument("--input", required=True)
    sp.add_argument("--format", choices=FORMATS, default=None,
                    help="input format (default: by file extension)")
    sp.add_argument("--method", choices=METHODS, required=True)
    sp.add_argument("--mode", choices=("samples", "features"), default="samples")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    _add_solver_flags(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_select)

    sp = sub.add_parser("bench", help="wall-time scaling sweep over sample counts")
    sp.add_argument("--method", choices=BENCH_METHODS, required=True)
    sp.add_argument("--sizes", required=True, help="comma-separated ascending N values")
    sp.add_argument("--feature-dim", type=int, required=True)
    sp.add_argument("--gamma", type=float, default=1.0)
    sp.add_argument("--p", type=float, default=0.5)
    sp.add_argument("--repeats", type=int, default=3)
    sp.add_argument("--iters", type=int, default=5, help="fixed outer-iteration budget")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--time-cap", type=float, default=None,
                    help="seconds; slower cells are flagged censored")
    sp.add_argument("--exclusive-timing", action="store_true",
                    help="pin kernels to one thread; timings are only comparable under this flag")
    sp.add_argument("--csv", default=None, help="optional CSV mirror of the records")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_bench)

    sp = sub.add_parser("eval", help="downstream kNN accuracy vs selection size")
    sp.add_argument("--input", required=True)
    sp.add_argument("--format", choices=FORMATS, default=None)
    sp.add_argument("--method", choices=METHODS, required=True)
    sp.add_argument("--k-list", required=True, help="comma-separated selection sizes")
    sp.add_argument("--seeds", default="0,1,2,3,4", help="comma-separated seeds")
    sp.add_argument("--noise-fraction", type=float, default=0.1)
    sp.add_argument("--noise-kinds", default=",".join(NOISE_KINDS))
    _add_noise_magnitude_flags(sp)
    sp.add_argument("--knn-k", type=int, default=3)
    sp.add_argument("--candidate-count", type=int, default=None,
                    help="candidate pool size (default: 60%% of N)")
    _add_solver_flags(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_eval)

    sp = sub.add_parser("noise", help="apply the corruption protocol to a dataset file")
    sp.add_argument("--input", required=True)
    sp.add_argument("--format", choices=FORMATS, default=None)
    sp.add_argument("--fraction", type=float, default=0.1)
    sp.add_argument("--kinds", default=",".join(NOISE_KINDS))
    _add_noise_magnitude_flags(sp)
    sp.add_argument("--stratified", choices=("auto", "yes", "no"), default="auto")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.add_argument("--out-format", choices=FORMATS, default=None)
    sp.add_argument("--mask-out", default=None, help="write the corruption mask as JSON")
    sp.set_defaults(func=_cmd_noise)

    sp = sub.add_parser("convert", help="convert between csv and bin")
    sp.add_argument("--input", required=True)
    sp.add_argument("--in-format", choices=FORMATS, default=None)
    sp.add_argument("--output", required=True)
    sp.add_argument("--out-format", choices=FORMATS, default=None)
    sp.set_defaults(func=_cmd_convert)

    return parser


def parse_and_run(argv=None) -> int:
    """Dispatch argv to a subcommand, mapping errors to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "exclusive_timing", False) or getattr(args, "deterministic", False):
            try:
                from threadpoolctl import threadpool_limits
            except ImportError:
                return args.func(args)
            with threadpool_limits(limits=1):
                return args.func(args)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"error: data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SolverError as exc:
        print(f"error: solver: {exc}", file=sys.stderr)
        return EXIT_SOLVER


def main():
    sys.exit(parse_and_run(sys.argv[1:]))


if __name__ == "__main__":
    main()
