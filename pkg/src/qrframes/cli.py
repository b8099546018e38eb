"""``qrf`` command line.

All angles on the command line are in DEGREES; everything internal is in
radians. Each command writes its outputs plus ``manifest.json`` into
``--out`` (default ``./runs/<config-hash>/``).

Exit codes: 0 success, 1 verification failure, 2 I/O or argument error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from dataclasses import dataclass, asdict
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, checks, measures, optimize, twirl
from .errors import QrfError

EXIT_OK, EXIT_VERIFY, EXIT_IO = 0, 1, 2
MAX_GRID_ROWS = 250_000


class CliError(Exception):
    """Bad arguments or unwritable output; maps to exit code 2."""


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def fmt(x) -> str:
    if isinstance(x, str):
        return x
    return f"{float(x):.12g}"


def _clean(obj):
    """JSON-ready copy: numpy scalars to floats, tuples to lists."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def config_hash(command: str, config: dict) -> str:
    blob = json.dumps(_clean({"command": command, "config": config}), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


@dataclass
class RunManifest:
    command: str
    config: dict
    seed: int
    artifact_version: str
    config_hash: str
    started: str
    finished: str = ""


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class Run:
    """Output directory plus manifest bookkeeping for one command."""

    def __init__(self, command: str, config: dict, seed: int, out: str | None):
        h = config_hash(command, config)
        self.dir = Path(out) if out else Path("runs") / h[:16]
        self.manifest = RunManifest(command, _clean(config), seed, __version__, h, _now())
        try:
            self.dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise CliError(f"cannot create output directory {self.dir}: {exc}") from exc

    def write_text(self, name: str, text: str) -> Path:
        path = self.dir / name
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise CliError(f"cannot write {path}: {exc}") from exc
        return path

    def write_json(self, name: str, obj) -> Path:
        return self.write_text(name, dumps(obj))

    def write_csv(self, name: str, header, rows) -> Path:
        path = self.dir / name
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(header)
                for row in rows:
                    w.writerow([fmt(v) for v in row])
        except OSError as exc:
            raise CliError(f"cannot write {path}: {exc}") from exc
        return path

    def finish(self) -> None:
        self.manifest.finished = _now()
        self.write_json("manifest.json", asdict(self.manifest))


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return args.threads
    env = os.environ.get("QRF_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise CliError(f"QRF_THREADS must be an integer, got {env!r}") from exc
        if n < 1:
            raise CliError("QRF_THREADS must be >= 1")
        return n
    return 1


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_bloch(args) -> int:
    params = twirl.QrfParams(alpha=np.radians(args.alpha), beta=np.radians(args.beta),
                             delta=np.radians(args.delta), L=0.5)
    config = {"alpha_deg": args.alpha, "beta_deg": args.beta, "delta_deg": args.delta, "grid": args.grid}
    run = Run("bloch", config, 0, args.out)
    amap = measures.affine_map(params)
    run.write_json("affine.json", {
        "A": amap.A.ravel().tolist(),
        "b": amap.b.tolist(),
        "det_a": amap.det_a,
        "radius": amap.radius,
        "scale": amap.scale,
    })
    thetas = np.linspace(0, 90, args.grid)
    phis = np.linspace(0, 360, args.grid, endpoint=False) if args.grid > 1 else np.zeros(1)
    rows = []
    for t in thetas:
        for p in phis:
            r = measures.bloch_image(params, np.radians(t), np.radians(p))
            rows.append((t, p, *r))
    run.write_csv("image.csv", ["theta_deg", "phi_deg", "Rx", "Ry", "Rz"], rows)
    run.finish()
    print(f"det_a = {fmt(amap.det_a)}  radius = {fmt(amap.radius)}")
    print(f"wrote {run.dir}")
    return EXIT_OK


def cmd_neg(args) -> int:
    p = twirl.QrfParams(alpha=np.radians(args.alpha), beta=np.radians(args.beta),
                        delta=np.radians(args.delta), L=args.L)
    phi = twirl.partially_entangled(np.radians(args.gamma))
    config = {"alpha_deg": args.alpha, "beta_deg": args.beta, "delta_deg": args.delta,
              "gamma_deg": args.gamma, "both": args.both, "kraus": args.kraus, "L": args.L}
    run = Run("neg", config, 0, args.out)
    out = twirl.twirl_both(p, p, phi, args.kraus) if args.both else twirl.twirl_alice(p, phi, args.kraus)
    rows = []
    for e in out.entries:
        n = measures.negativity(e.sigma, e.dims, 1) if min(e.dims) > 1 else 0.0
        rows.append({"sector": e.name, "p": e.p, "negativity": n, "weighted": e.p * n})
    total = measures.block_negativity(out)
    report = {
        "sectors": rows,
        "total_negativity": total,
        "singlet_fraction": measures.singlet_fraction(total),
        "total_probability": out.total_probability,
    }
    run.write_json("neg.json", report)
    run.finish()
    print(f"{'sector':<12}{'p':>20}{'N(sigma)':>20}")
    for r in rows:
        print(f"{r['sector']:<12}{fmt(r['p']):>20}{fmt(r['negativity']):>20}")
    print(f"total negativity      {fmt(total)}")
    print(f"fraction of singlet   {fmt(measures.singlet_fraction(total))}")
    return EXIT_OK


def _parse_grid(specs) -> dict:
    grid = {}
    for spec in specs or ():
        try:
            name, lo, hi, steps = spec.split(":")
            grid[name] = (np.radians(float(lo)), np.radians(float(hi)), int(steps))
        except ValueError as exc:
            raise CliError(f"--grid expects name:min_deg:max_deg:steps, got {spec!r}") from exc
        if name not in optimize.PARAM_NAMES:
            raise CliError(f"--grid parameter must be one of {optimize.PARAM_NAMES}")
    return grid


def _opt_config(args) -> optimize.SweepConfig:
    if args.objective == "volume":
        objective = "volume"
        names = ("beta",) if args.product_only else ("alpha", "beta")
    elif args.both:
        objective = "negativity_ab"
        names = ("alpha", "beta", "delta") if args.entangled else ("beta",)
    else:
        objective = "negativity_a"
        names = ("beta",) if args.product_only else ("alpha", "beta", "delta")
    if args.free_gamma:
        if objective == "volume":
            raise CliError("--free-gamma applies to negativity sweeps only")
        names = names + ("gamma",)
    grid = {n: optimize.DEFAULT_RANGES[n] for n in names}
    grid.update(_parse_grid(args.grid))
    gamma = None if args.gamma is None else float(np.radians(args.gamma))
    return optimize.SweepConfig(
        objective=objective, grid=grid, gamma=gamma, refine=not args.no_refine,
        refine_tolerance=args.tol, L=args.L, seed=args.seed, kraus=args.kraus,
        threads=_threads(args),
    )


def cmd_opt(args) -> int:
    cfg = _opt_config(args)
    run = Run("opt", cfg.as_record(), cfg.seed, args.out)
    rep = optimize.optimize(cfg)
    bp = rep.best_params
    result = {
        "objective": cfg.objective,
        "best_value": rep.best_value,
        "best_params_rad": bp,
        "best_params_deg": {k: np.degrees(v) for k, v in bp.items()},
        "grid_best_value": rep.grid_best_value,
        "grid_best_params_rad": rep.grid_best_params,
        "evaluations": rep.evaluations,
    }
    if cfg.objective == "volume":
        result["radius"] = rep.best_value ** (1 / 3)
        units = "|det A|"
    else:
        result["negativity"] = rep.best_value * measures.MAX_QUBIT_NEGATIVITY
        units = "fraction of singlet negativity"
        if cfg.L == 0.5:
            psi = twirl.canonical_qrf_state(rep.qrf_params(0.5))
            result["frame_entropy"] = measures.entropy_of_entanglement(psi, (2, 2))
            if cfg.kraus == "printed":
                result["projection_value_at_optimum"] = float(
                    optimize.evaluate(optimize.replace(cfg, kraus="projection"), bp))
    run.write_json("optimum.json", result)
    prof = rep.profiles()
    rows = [(name, np.degrees(x), v) for name, vals in prof.items() for x, v in zip(rep.axes[name], vals)]
    run.write_csv("trace.csv", ["parameter", "value_deg", "best_objective"], rows)
    if rep.values.size <= MAX_GRID_ROWS:
        names = list(rep.axes)
        run.write_csv("grid.csv", [f"{n}_deg" for n in names] + ["objective"],
                      ([*(np.degrees(p[n]) for n in names), v] for p, v in rep.grid_trace()))
    run.finish()
    print(f"best {units}: {fmt(rep.best_value)}")
    for k in optimize.PARAM_NAMES:
        tag = "" if k in cfg.grid else " (fixed)"
        print(f"  {k:<6} = {fmt(np.degrees(bp[k]))} deg{tag}")
    if "negativity" in result:
        print(f"  raw negativity = {fmt(result['negativity'])}")
    if "radius" in result:
        print(f"  radius = {fmt(result['radius'])}")
    print(f"wrote {run.dir}")
    return EXIT_OK


def cmd_classical(args) -> int:
    Ls = [k / 2 for k in range(1, int(round(2 * args.lmax)) + 1)]
    base = optimize.SweepConfig(objective="negativity_a", grid={"beta": (0.0, np.pi, args.steps)},
                                refine_tolerance=args.tol, threads=_threads(args))
    config = {"lmax": args.lmax, "steps": args.steps, "tol": args.tol}
    run = Run("classical", config, 0, args.out)
    pts = optimize.classical_limit_study(Ls, base)
    rows = [(p.L, np.degrees(p.beta_opt), p.n_max, p.fraction) for p in pts]
    run.write_csv("classical.csv", ["L", "beta_opt_deg", "n_max", "fraction"], rows)
    run.finish()
    print(f"{'L':>5}{'beta_opt':>12}{'n_max':>12}{'fraction':>12}")
    for L, b, n, f in rows:
        print(f"{L:>5}{b:>12.3f}{n:>12.5f}{f:>12.5f}")
    print(f"wrote {run.dir}")
    return EXIT_OK


def cmd_pythagoras(args) -> int:
    run = Run("pythagoras", {"L": args.L}, 0, args.out)
    rows = optimize.pythagoras_distribution(args.L)
    run.write_csv("pythagoras.csv", ["J", "J_over_L", "p"], rows)
    run.finish()
    J, ratio, p = max(rows, key=lambda r: r[2])
    print(f"peak J = {fmt(J)}  J/L = {fmt(ratio)}  p = {fmt(p)}  (sqrt 2 = {fmt(np.sqrt(2))})")
    print(f"wrote {run.dir}")
    return EXIT_OK


def cmd_verify(args) -> int:
    run = Run("verify", {"level": args.level, "seed": args.seed}, args.seed, args.out)
    results = checks.run_checks(args.level, args.seed)
    lines = [r.line() for r in results]
    failed = [r for r in results if not r.passed]
    lines.append(f"{len(results) - len(failed)}/{len(results)} invariants hold")
    text = "\n".join(lines) + "\n"
    run.write_text("report.txt", text)
    run.finish()
    sys.stdout.write(text)
    if failed:
        print("FAILURES:", file=sys.stderr)
        for r in failed:
            print(f"  module={r.module} invariant={r.invariant} residual={r.residual:.3e}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qrf", description="Spin reference frame experiments (angles in degrees).")
    ap.add_argument("--version", action="version", version=f"qrf {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--out", help="output directory (default ./runs/<config-hash>/)")
        p.add_argument("--threads", type=int, help="worker cap (fallback: QRF_THREADS)")

    def frame(p):
        p.add_argument("--alpha", type=float, default=0.0, help="Schmidt angle, degrees")
        p.add_argument("--beta", type=float, default=90.0, help="inclination, degrees")
        p.add_argument("--delta", type=float, default=0.0, help="relative phase, degrees")

    p = sub.add_parser("bloch", help="affine map and Bloch image of a spin-1/2 frame")
    frame(p)
    p.add_argument("--grid", type=int, default=50, help="points per (theta, phi) axis")
    common(p)
    p.set_defaults(func=cmd_bloch)

    p = sub.add_parser("neg", help="sector-resolved negativity after twirling")
    frame(p)
    p.add_argument("--gamma", type=float, default=45.0, help="input state angle, degrees (45 = singlet)")
    p.add_argument("--both", action="store_true", help="identical frames on both sides")
    p.add_argument("--kraus", choices=twirl.KRAUS_FORMS, default="projection")
    p.add_argument("--L", type=float, default=0.5, help="frame spin")
    common(p)
    p.set_defaults(func=cmd_neg)

    p = sub.add_parser("opt", help="grid + golden-section optimization")
    p.add_argument("objective", choices=("volume", "neg"))
    p.add_argument("--product-only", action="store_true", help="sweep beta only (alpha = 0)")
    p.add_argument("--both", action="store_true", help="twirl both sides with identical frames")
    p.add_argument("--entangled", action="store_true", help="with --both, also sweep alpha and delta")
    p.add_argument("--free-gamma", action="store_true", help="also sweep the input state angle")
    p.add_argument("--gamma", type=float, help="fixed input state angle, degrees (default 45)")
    p.add_argument("--kraus", choices=twirl.KRAUS_FORMS, default="projection")
    p.add_argument("--grid", action="append", metavar="NAME:MIN:MAX:STEPS",
                   help="set or add a swept range (degrees); repeatable")
    p.add_argument("--no-refine", action="store_true")
    p.add_argument("--tol", type=float, default=1e-4, help="refinement tolerance, radians")
    p.add_argument("--L", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_opt)

    p = sub.add_parser("classical", help="optimal inclination versus frame spin")
    p.add_argument("--lmax", type=float, default=8.0)
    p.add_argument("--steps", type=int, default=181, help="beta grid points")
    p.add_argument("--tol", type=float, default=1e-4, help="refinement tolerance, radians")
    common(p)
    p.set_defaults(func=cmd_classical)

    p = sub.add_parser("pythagoras", help="total-J distribution of orthogonal coherent states")
    p.add_argument("--L", type=float, required=True)
    common(p)
    p.set_defaults(func=cmd_pythagoras)

    p = sub.add_parser("verify", help="run the invariant suites")
    p.add_argument("--level", choices=checks.LEVELS, default="fast")
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except (CliError, QrfError) as exc:
        print(f"qrf: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
