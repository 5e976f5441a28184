"""Command-line frontend: subcommands wiring configs to the modules.

Configuration comes from an optional JSON file (--config) with
command-line flags taking precedence.  Outputs are deterministic for a
fixed config and seed and are written atomically (temp file + rename);
wall-clock timestamps go only to a sidecar run.log.

Exit codes: 0 all checks pass, 1 a mathematical assertion failed (a
JSON failure report names the invariant), 2 configuration or IO error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time

import numpy as np

from . import moser, probe, viscosity
from .errors import CmaLabError, ConfigError, NonConverged
from .families import SolutionFamily, eval_analytic_hessian, eval_rhs, verify_identity
from .grid import (GridDomain, GridField, complex_hessian_fd, field_to_csv,
                   sample)
from .solver import DirichletProblem, NewtonConfig, newton_solve

__all__ = ["main"]


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: str, obj) -> None:
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _write_csv(path: str, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    _atomic_write(path, buf.getvalue())


def _log(out_dir: str, message: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "run.log"), "a") as f:
        f.write(f"{time.strftime('%Y-%m-%dT%H:%M:%S')} {message}\n")


def _fail(out_dir: str, invariant: str, detail) -> int:
    _write_json(os.path.join(out_dir, "failure.json"),
                {"invariant": invariant, "detail": detail})
    return 1


class _Settings:
    """Flag-over-config-over-default resolution."""

    def __init__(self, args, config: dict):
        self.args = vars(args)
        self.config = config

    def get(self, key: str, default=None):
        v = self.args.get(key)
        if v is not None:
            return v
        return self.config.get(key, default)


def _family_from(settings: _Settings) -> SolutionFamily:
    kind = settings.get("family", "pogorelov2")
    dim = int(settings.get("dim", 2))
    eps = float(settings.get("eps", 0.0))
    return SolutionFamily(kind, dim, eps)


def _random_points(fam: SolutionFamily, count: int, min_w: float, rng) -> np.ndarray:
    pts = rng.uniform(-1.0, 1.0, size=(count, 2 * fam.dim))
    wmod = np.hypot(pts[:, -2], pts[:, -1])
    bad = wmod <= min_w
    while np.any(bad):
        pts[bad, -2:] = rng.uniform(-1.0, 1.0, size=(int(np.sum(bad)), 2))
        bad = np.hypot(pts[:, -2], pts[:, -1]) <= min_w
    return pts


# ---------------------------------------------------------------------------
# subcommands

def _cmd_verify(settings: _Settings, out_dir: str, seed: int) -> int:
    fam = _family_from(settings)
    count = int(settings.get("points", 1000))
    min_w = float(settings.get("min_w", 1e-3))
    tol = float(settings.get("tol", 1e-10))
    rng = np.random.default_rng(seed)
    pts = _random_points(fam, count, min_w, rng)
    gaps = [verify_identity(fam, p)["abs_gap"] for p in pts]
    report = {
        "family": fam.to_dict(), "points": count, "min_w": min_w,
        "max_gap": max(gaps), "mean_gap": float(np.mean(gaps)), "tol": tol,
    }
    _write_json(os.path.join(out_dir, "verify.json"), report)
    if report["max_gap"] >= tol:
        return _fail(out_dir, "determinant identity gap below tolerance", report)
    return 0


def _cmd_hessian(settings: _Settings, out_dir: str, seed: int) -> int:
    fam = _family_from(settings)
    point = settings.get("point")
    if point is None:
        raise ConfigError("hessian requires a point")
    if isinstance(point, str):
        point = [float(s) for s in point.split(",")]
    point = np.asarray(point, dtype=float)
    h = float(settings.get("h", 1e-2))
    dom = GridDomain(point, np.full(point.size, h), (3,) * point.size)
    u = sample(dom, fam.value)
    fd = complex_hessian_fd(u, (1,) * point.size)
    report = {"family": fam.to_dict(), "point": point.tolist(), "h": h,
              "fd_re": fd.entries.real.tolist(), "fd_im": fd.entries.imag.tolist()}
    if fam.kind in ("pogorelov2", "pogorelov_n"):
        exact = eval_analytic_hessian(fam, point)
        report["analytic_re"] = exact.entries.real.tolist()
        report["analytic_im"] = exact.entries.imag.tolist()
        report["max_entry_gap"] = float(np.max(np.abs(fd.entries - exact.entries)))
    _write_json(os.path.join(out_dir, "hessian.json"), report)
    return 0


def _cmd_solve(settings: _Settings, out_dir: str, seed: int) -> int:
    fam = _family_from(settings)
    if fam.eps <= 0:
        raise ConfigError("solve needs a smooth family (eps > 0)")
    points = int(settings.get("points", 17))
    half_width = float(settings.get("half_width", 1.0))
    m = fam.dim
    dom = GridDomain(np.zeros(2 * m), np.full(2 * m, half_width),
                     (points,) * (2 * m),
                     max_nodes=int(settings.get("max_nodes", 10_000_000)))
    coords = dom.node_coords_flat()
    oracle = sample(dom, fam.value)
    rhs = GridField(dom, np.log(eval_rhs(fam, coords)).reshape(dom.shape))
    prob = DirichletProblem(dom, rhs, oracle,
                            Lambda=float(settings.get("Lambda", 10.0)))
    cfg = NewtonConfig(
        tol_residual=float(settings.get("tol_residual", 1e-10)),
        max_iters=int(settings.get("max_iters", 30)),
    )
    try:
        out = newton_solve(prob, cfg)
    except NonConverged as exc:
        return _fail(out_dir, "newton residual below tolerance",
                     {"final_residual": exc.args[0]["final_residual"],
                      "iterations": exc.args[0]["iterations"]})
    sol = out["solution"]
    _atomic_write(os.path.join(out_dir, "solution.csv"), field_to_csv(sol))
    report = {
        "family": fam.to_dict(), "points": points,
        "iterations": out["iterations"],
        "final_residual": out["final_residual"],
        "residual_history": out["residual_history"],
        "inner_iterations": out["inner_iterations"],
        "max_error_vs_oracle": float(np.max(np.abs(sol.values - oracle.values))),
    }
    _write_json(os.path.join(out_dir, "report.json"), report)
    return 0


def _cmd_probe(settings: _Settings, out_dir: str, seed: int) -> int:
    fam = _family_from(settings)
    report = probe.RegularityReport(family=fam)
    rows = []
    center = np.zeros(2 * fam.dim)
    radii = np.logspace(-4, -1, 10)
    fit = probe.holder_fit(fam, center, radii)
    report.fitted_alpha = fit["alpha"]
    report.alpha_stderr = fit["stderr"]
    rows.append(("holder_alpha", "", fit["alpha"]))
    p_list = settings.get("p_list", [1.0, 3.0])
    scan = probe.w2p_divergence_scan(
        fam, p_list,
        base_points=int(settings.get("base_points", 33)),
        use_laplacian=bool(settings.get("use_laplacian", fam.kind == "blocki")),
        growth=float(settings.get("growth", math.sqrt(2.0))),
        refinements=int(settings.get("refinements", 3)))
    report.w2p_scan = [(e.p, e.slope, e.verdict) for e in scan]
    for e in scan:
        rows.append(("w2p_slope", e.p, e.slope))
    if fam.kind == "pogorelov2":
        eps_list = settings.get("eps_list", [1 / 16, 1 / 64, 1 / 256, 1 / 1024])
        lip = probe.rhs_lipschitz_scaling(eps_list)
        report.lip_F_scaling = lip
        for eps, sup in lip:
            rows.append(("lip_sup_gradient", eps, sup))
    out_json = {
        "family": fam.to_dict(),
        "fitted_alpha": report.fitted_alpha,
        "alpha_stderr": report.alpha_stderr,
        "w2p_scan": report.w2p_scan,
        "lip_F_scaling": report.lip_F_scaling,
    }
    _write_json(os.path.join(out_dir, "probe.json"), out_json)
    _write_csv(os.path.join(out_dir, "probe.csv"),
               ("measurement", "parameter", "value"), rows)
    return 0


def _cmd_moser(settings: _Settings, out_dir: str, seed: int) -> int:
    params = moser.MoserParams(
        n=int(settings.get("n", 2)), a=float(settings.get("a", 1.0)),
        R=float(settings.get("R", 1.0)), r=float(settings.get("r", 0.5)),
        Lambda=float(settings.get("Lambda", 1.0)))
    C = float(settings.get("C", 1.0))
    k_max = int(settings.get("kmax", 60))
    sums = moser.log_a_partial_sums(params, k_max, C)
    rows = []
    for k in range(1, k_max + 1):
        rows.append((k, f"{moser.p_sequence(params, k):.17g}",
                     f"{moser.b_term(params, k):.17g}",
                     f"{moser.b_product(params, k):.17g}",
                     f"{moser.a_coefficient(params, k, C):.17g}",
                     f"{sums[k - 1]:.17g}"))
    _write_csv(os.path.join(out_dir, "moser.csv"),
               ("k", "p_k", "b_k", "b_product", "a_k", "log_a_sum"), rows)
    return 0


def _cmd_viscosity(settings: _Settings, out_dir: str, seed: int) -> int:
    kind = settings.get("family", "pogorelov2")
    dim = int(settings.get("dim", 2))
    fam = SolutionFamily(kind, dim, 0.0)
    base = settings.get("base")
    if base is None:
        base = [0.0] * (2 * dim)
    elif isinstance(base, str):
        base = [float(s) for s in base.split(",")]
    out = viscosity.search_touch_above(
        fam, np.asarray(base, dtype=float),
        radius=float(settings.get("radius", 0.1)),
        attempts=int(settings.get("attempts", 1000)), seed=seed)
    report = {"family": fam.to_dict(), "base": list(base), **out}
    _write_json(os.path.join(out_dir, "viscosity.json"), report)
    if out["found"]:
        return _fail(out_dir, "no quadratic jet touches from above on the "
                     "singular slice", report)
    return 0


_COMMANDS = {
    "verify": _cmd_verify,
    "hessian": _cmd_hessian,
    "solve": _cmd_solve,
    "probe": _cmd_probe,
    "moser": _cmd_moser,
    "viscosity": _cmd_viscosity,
}


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cmalab")
    sub = ap.add_subparsers(dest="subcommand", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None)
    common.add_argument("--out", type=str, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--threads", type=int, default=None)

    p = sub.add_parser("verify", parents=[common])
    p.add_argument("--family", type=str)
    p.add_argument("--dim", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--min-w", dest="min_w", type=float)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("hessian", parents=[common])
    p.add_argument("--family", type=str)
    p.add_argument("--dim", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--point", type=str)
    p.add_argument("--h", type=float)

    p = sub.add_parser("solve", parents=[common])
    p.add_argument("--family", type=str)
    p.add_argument("--dim", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--half-width", dest="half_width", type=float)
    p.add_argument("--tol-residual", dest="tol_residual", type=float)
    p.add_argument("--max-iters", dest="max_iters", type=int)

    p = sub.add_parser("probe", parents=[common])
    p.add_argument("--family", type=str)
    p.add_argument("--dim", type=int)
    p.add_argument("--base-points", dest="base_points", type=int)
    p.add_argument("--growth", type=float)
    p.add_argument("--refinements", type=int)

    p = sub.add_parser("moser", parents=[common])
    p.add_argument("--n", type=int)
    p.add_argument("--a", type=float)
    p.add_argument("--R", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--C", type=float)
    p.add_argument("--kmax", type=int)

    p = sub.add_parser("viscosity", parents=[common])
    p.add_argument("--family", type=str)
    p.add_argument("--dim", type=int)
    p.add_argument("--base", type=str)
    p.add_argument("--radius", type=float)
    p.add_argument("--attempts", type=int)
    return ap


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        config = {}
        if args.config:
            try:
                with open(args.config) as f:
                    config = json.load(f)
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config: {exc}") from exc
        settings = _Settings(args, config)
        out_dir = settings.get("out", ".")
        seed = int(settings.get("seed", 0))
        threads = settings.get("threads")
        if threads is None:
            threads = os.environ.get("CMA_LAB_THREADS", "1")
        _log(out_dir, f"subcommand={args.subcommand} seed={seed} "
                      f"threads={threads} config={args.config or '-'}")
        code = _COMMANDS[args.subcommand](settings, out_dir, seed)
        _log(out_dir, f"exit={code}")
        return code
    except (ConfigError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CmaLabError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
